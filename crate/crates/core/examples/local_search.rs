//! Sequential k-opt from random tours: plain depth-first search versus the
//! default chained search with penalized costs.
//!
//! cargo run --release --example local_search

use std::time::Instant;

use banditlk::lk::{KOptSearch, LkConfig};
use banditlk::solver::preprocess;
use banditlk::tour::Tour;
use banditlk::Instance;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/att532.tsp");
    let inst = Instance::load(path).expect("instance");
    let pre = preprocess(&inst, 5).expect("preprocess");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut order: Vec<usize> = (0..inst.len()).collect();
    order.shuffle(&mut rng);
    let start = Tour::from_order(&inst, order).expect("permutation");
    println!("random tour: {}", start.length());

    for (label, cfg) in [("plain", LkConfig::plain(5)), ("chained", LkConfig::default())] {
        for k in [3, 5] {
            let cfg = LkConfig { k_max: k, ..cfg.clone() };
            let mut tour = start.clone();
            let t = Instant::now();
            let mut search = KOptSearch::new(&inst, &pre.candidates, cfg);
            search.set_penalties(pre.penalties.as_slice());
            let moves = search.optimize(&mut tour);
            println!(
                "{label:<8} k={k}: {} after {moves} moves, {:.3}s",
                tour.length(),
                t.elapsed().as_secs_f64()
            );
        }
    }
    println!("optimum: 27686");
}
