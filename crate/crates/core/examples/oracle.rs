//! Exhaustive optimum of small random instances next to the solver's answer.
//!
//! cargo run --release --example oracle

use banditlk::instance::WeightKind;
use banditlk::oracle::exact_optimum;
use banditlk::{solve, Instance, Params};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 5..=11 {
        let pts = (0..n)
            .map(|_| (rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0)))
            .collect();
        let inst = Instance::from_coords(format!("r{n}"), WeightKind::Euc2d, pts).expect("instance");
        let exact = exact_optimum(&inst).expect("small enough");
        let found = solve(
            &inst,
            &Params {
                max_trials: Some(n),
                ..Params::default()
            },
        )
        .expect("solve");
        println!(
            "n={n:>2} exact {:>5} solver {:>5} tour {:?}",
            exact.length, found.best_length, exact.tour
        );
    }
}
