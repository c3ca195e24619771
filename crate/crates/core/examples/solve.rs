//! One run, trial by trial, printing each improvement and the bandit's choice.
//!
//! cargo run --release --example solve -- data/tsplib/att532.tsp 27686

use banditlk::solver::{preprocess, Run};
use banditlk::{Instance, Params};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/att532.tsp").into());
    let optimum = args.next().and_then(|s| s.parse().ok()).or(Some(27686));
    let inst = Instance::load(&path).expect("instance").with_known_optimum(optimum);
    let params = Params {
        seed: 3,
        ..Params::default()
    };
    let pre = preprocess(&inst, params.candidate_size).expect("preprocess");
    println!("lower bound {:.1}, preprocessing {:.2}s", pre.lower_bound, pre.time);

    let mut run = Run::new(&inst, &pre, &params, 0);
    while !run.finished() {
        let out = run.trial();
        if out.improved {
            let pick = match (out.arm, out.weight) {
                (Some(a), Some(w)) => format!("arm {a}, w {w:.3}"),
                _ => "alpha order".into(),
            };
            println!("trial {:>4}: {} ({pick})", out.trial, out.length);
        }
    }
    let best = run.best().expect("at least one trial");
    println!(
        "best {} after {} trials, optimum reached: {}",
        best.length(),
        run.trials(),
        run.reached_optimum()
    );
    println!("arm pulls {:?}", run.bandit().pulls());
}
