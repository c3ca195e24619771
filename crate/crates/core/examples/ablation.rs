//! Compare the candidate-ordering modes over seeded runs with a small trial budget.
//!
//! cargo run --release --example ablation -- data/tsplib/pcb442.tsp 50778 150

use banditlk::{run_batch, Instance, Mode, Params};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/pcb442.tsp").into());
    let optimum: i64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(50778);
    let budget: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(150);
    let inst = Instance::load(&path).expect("instance").with_known_optimum(Some(optimum));

    let modes = [Mode::Mabb, Mode::Lkh, Mode::FixedW(0.0), Mode::FixedW(0.5), Mode::FixedW(1.0)];
    println!("{:<12} {:>7} {:>9} {:>11} {:>8}", "mode", "success", "best", "average", "gap%");
    for mode in modes {
        let params = Params {
            mode,
            max_trials: Some(budget),
            bs: budget / 3,
            ..Params::default()
        };
        let s = run_batch(&inst, &params, 8, 0).expect("batch");
        println!(
            "{:<12} {:>7} {:>9} {:>11.1} {:>8.4}",
            mode.to_string(),
            format!("{}/{}", s.successes.unwrap_or(0), s.runs),
            s.best,
            s.average,
            100.0 * s.gap().unwrap_or(0.0)
        );
    }
}
