//! Alpha-nearness candidate lists and how many optimal tour edges they cover.
//!
//! cargo run --release --example candidates

use std::fs;

use banditlk::candidate::build_candidate_sets;
use banditlk::one_tree::{alpha_values, ascend_penalties};
use banditlk::{parse_tour, Instance};

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib");
    let inst = Instance::load(format!("{dir}/pcb442.tsp")).expect("instance");
    let opt = parse_tour(&fs::read_to_string(format!("{dir}/pcb442.opt.tour")).expect("tour")).expect("tour");

    let asc = ascend_penalties(&inst);
    let table = alpha_values(&inst, &asc.tree, &asc.penalties, 10);
    for size in [3, 5, 8] {
        let sets = build_candidate_sets(&table, &inst, size).expect("candidates");
        let n = opt.len();
        let missing = (0..n)
            .filter(|&k| {
                let (a, b) = (opt[k], opt[(k + 1) % n]);
                !sets.contains(a, b) && !sets.contains(b, a)
            })
            .count();
        println!("{size} candidates per city: {missing} optimal edges not covered");
    }

    let sets = build_candidate_sets(&table, &inst, 5).expect("candidates");
    println!("city 0:");
    for c in sets.of(0) {
        println!("  -> {:>3}  alpha {:>7.1}  dist {:>4}", c.to, c.alpha, c.dist);
    }
}
