//! Subgradient ascent on node penalties and the resulting 1-tree bound.
//!
//! cargo run --release --example lower_bound -- data/tsplib/pcb442.tsp 50778

use std::time::Instant;

use banditlk::one_tree::{ascend_penalties, minimum_one_tree, Penalties};
use banditlk::Instance;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/pcb442.tsp").into());
    let optimum: Option<f64> = args.next().and_then(|s| s.parse().ok()).or(Some(50778.0));
    let inst = Instance::load(&path).expect("readable instance");

    let plain = minimum_one_tree(&inst, &Penalties::zeros(inst.len()));
    let start = Instant::now();
    let asc = ascend_penalties(&inst);
    println!("1-tree without penalties: {:.1}", plain.bound());
    println!(
        "after {} ascent iterations: {:.1} ({:.2}s)",
        asc.iterations,
        asc.bound,
        start.elapsed().as_secs_f64()
    );
    if let Some(opt) = optimum {
        println!("bound / optimum = {:.5}", asc.bound / opt);
    }
    let deg2 = asc.tree.degrees().iter().filter(|&&d| d == 2).count();
    println!("{deg2} of {} cities have degree 2 in the final 1-tree", inst.len());
}
