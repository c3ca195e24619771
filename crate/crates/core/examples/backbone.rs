//! Edge frequencies over locally optimal tours, and the candidate order they induce.
//!
//! cargo run --release --example backbone

use banditlk::backbone::BackboneStore;
use banditlk::lk::{KOptSearch, LkConfig};
use banditlk::metric::resort_blended;
use banditlk::solver::preprocess;
use banditlk::tour::choose_initial_tour;
use banditlk::Instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/pcb442.tsp");
    let inst = Instance::load(path).expect("instance");
    let pre = preprocess(&inst, 5).expect("preprocess");
    let mut sets = pre.candidates.clone();
    let mut backbone = BackboneStore::new(inst.len());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let mut tour = choose_initial_tour(&inst, None, &sets, &mut rng);
        let mut search = KOptSearch::new(&inst, &sets, LkConfig::default());
        search.set_penalties(pre.penalties.as_slice());
        search.optimize(&mut tour);
        backbone.record_tour(tour.order()).expect("valid tour");
    }
    let always = (0..inst.len())
        .flat_map(|i| sets.of(i).iter().map(move |c| (i, c.to)))
        .filter(|&(i, j)| i < j && backbone.frequency(i, j).unwrap() == 1.0)
        .count();
    println!(
        "{} trials, {} distinct edges, {always} candidate edges in every tour",
        backbone.trials(),
        backbone.distinct_edges()
    );

    let city = 7;
    let show = |sets: &banditlk::candidate::CandidateSets, label: &str| {
        let row: Vec<String> = sets
            .of(city)
            .iter()
            .map(|c| format!("{}(b={:.2})", c.to, backbone.frequency(city, c.to).unwrap()))
            .collect();
        println!("{label:<8} {}", row.join(" "));
    };
    show(&sets, "alpha");
    for w in [0.5, 0.0] {
        resort_blended(&mut sets, &backbone, w);
        show(&sets, &format!("w={w}"));
    }
}
