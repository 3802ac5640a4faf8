//! Deterministic OFDMA downlink scheduling simulator.
//!
//! A genetic algorithm assigns resource blocks to users each TTI under a
//! weighted two-term objective (rate maximization vs GBR shortfall). A
//! closed machine-learning loop clusters the observed demand patterns,
//! classifies each incoming demand to a cluster, adapts the objective
//! weights from the GBR mask, and warm-starts the GA from the best
//! allocation previously found for that cluster.
//!
//! Everything is seeded: a scenario config plus its seeds reproduces runs
//! byte-for-byte. With the default `parallel` feature, GA generations and
//! independent runs inside comparisons evaluate on a rayon pool; results
//! are identical to the sequential build.

pub mod baselines;
pub mod error;
pub mod fitness;
pub mod ga;
pub mod metrics;
pub mod ml;
pub mod model;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
