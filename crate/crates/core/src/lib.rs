//! Executable versions of the bi-wheel / Hybrid-problem reductions from
//! MAX-E3-LIN2 to metric TSP and ATSP, with exact checkers and oracles.

pub mod atsp;
pub mod biwheel;
pub mod credit;
pub mod e3lin2;
pub mod error;
pub mod graph;
pub mod hybrid;
pub mod mutate;
pub mod oracle;
pub mod pipeline;
pub mod reduction;
pub mod rng;
pub mod tsp;
pub mod weight;

pub use error::{Error, Result};
