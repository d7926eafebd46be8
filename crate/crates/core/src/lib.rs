//! Replicable disagreement-based active learning for finite hypothesis
//! classes.
//!
//! The crate contains exact disagreement geometry for explicit classes
//! ([`hypothesis`]), the CAL and A² baselines ([`baselines`]), a replicable
//! statistical-query primitive ([`rstat`]), the replicable learners RepliCAL
//! and ReplicA² ([`replicable`]), the analysis objects used to reason about
//! their thresholds ([`diagnostics`]), and a paired-run experiment harness
//! ([`harness`]).
//!
//! Every internal random choice of a replicable learner comes from a
//! [`shared_randomness::RandomString`]; all data randomness comes from a
//! separate per-run generator. Two runs with equal random strings and
//! independent data are the paired executions whose agreement rate the
//! harness measures.

pub mod baselines;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod hypothesis;
pub mod replicable;
pub mod rstat;
pub mod run;
pub mod shared_randomness;

pub use error::{Error, Result};
pub use run::{Algorithm, Constants, LearnerOptions, RoundRecord, RunResult};
