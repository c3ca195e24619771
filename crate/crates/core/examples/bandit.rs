//! The UCB bandit on a toy problem where arm 3 pays best.
//!
//! cargo run --example bandit

use banditlk::bandit::{effective_weight, Bandit, BanditConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut bandit = Bandit::new(BanditConfig {
        arms: 5,
        step_size: 0.06,
        ucb_c: 0.5,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let means = [0.1, 0.2, 0.3, 0.6, 0.2];
    for _ in 0..2000 {
        let arm = bandit.pull();
        let r = means[arm] + rng.gen_range(-0.2..0.2);
        bandit.update_value(arm, r);
    }
    println!("arm  weight  pulls  value");
    for a in 0..bandit.arms() {
        println!(
            "{a:>3}  {:>6.2}  {:>5}  {:>5.3}",
            bandit.weights()[a],
            bandit.pulls()[a],
            bandit.values()[a]
        );
    }
    println!("N = {}", bandit.total());
    for t in [101, 200, 500, 1000] {
        println!("weight 0.75 at trial {t}: {:.4}", effective_weight(0.75, t, 100, 0.998));
    }
}
