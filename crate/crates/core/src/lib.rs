//! Runtime laboratory for the move-acceptance hyper-heuristic and elitist
//! baselines on the OneMax / Jump / Cliff benchmarks.
//!
//! * [`bench`] — search points and the benchmark family.
//! * [`search`] — mutation operators, acceptance rules, and trial loops.
//! * [`chain`] — exact birth-death analysis of the one-bit heuristic on
//!   Jump, in arbitrary-precision rationals.
//! * [`bounds`] — numeric evaluators for the closed-form runtime bounds.
//! * [`sim`] — seeded Monte Carlo batches with phase decomposition and
//!   drift estimation.
//! * [`stats`] — summaries, z-gates, geometric fits, log-log slopes.

pub mod bench;
pub mod bounds;
pub mod chain;
pub mod error;
pub mod search;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
