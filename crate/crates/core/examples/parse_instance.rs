//! Load a TSPLIB instance and print a few distances.
//!
//! cargo run --example parse_instance -- data/tsplib/gr17.tsp

use banditlk::Instance;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tsplib/gr17.tsp").into());
    let inst = match Instance::load(&path) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("{}: {} cities, {:?}", inst.name(), inst.len(), inst.weight_kind());
    let k = inst.len().min(5);
    for i in 0..k {
        let row: Vec<String> = (0..k).map(|j| format!("{:>6}", inst.dist(i, j))).collect();
        println!("{}", row.join(" "));
    }
    let identity: Vec<usize> = (0..inst.len()).collect();
    println!("identity tour length {}", inst.tour_length(&identity));
}
