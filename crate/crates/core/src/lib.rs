//! TSP solving with alpha-nearness candidates, sequential k-opt local search,
//! backbone edge frequencies and a bandit that tunes how the two are blended
//! when candidate lists are reordered.

pub mod backbone;
pub mod bandit;
pub mod candidate;
pub mod cli;
pub mod instance;
pub mod lk;
pub mod metric;
pub mod one_tree;
pub mod oracle;
pub mod registry;
pub mod solver;
pub mod tour;

pub use instance::{parse_instance, parse_tour, CostError, Instance, ParseError, WeightKind};
pub use registry::{Registry, RegistryEntry, RegistryError};
pub use solver::{run_batch, solve, BatchSummary, Mode, Params, RunResult};
