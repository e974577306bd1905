//! Adaptive restart for stochastic combinatorial optimizers.
//!
//! The core of this crate is a restart procedure that wraps any resumable
//! stochastic minimizer and decides, iteration by iteration, whether to add
//! independent replications of it or to extend the existing ones along time.
//! The decision is driven by a surrogate of the algorithm's failure
//! probability, built from the best-so-far values of the replication pool, so
//! it needs no knowledge of the optimum.
//!
//! What's in the box:
//!
//! - [`restart`]: the adaptive restart procedure itself, plus the pseudo-time
//!   bookkeeping that makes equal-cost comparisons against a single long run
//!   possible.
//! - [`theory`]: closed-form restart mathematics (tail probabilities,
//!   expected-time bounds, brute-force optimal restart times), usable both
//!   for analysis and as test oracles.
//! - [`mmas`]: a Max-Min Ant System for TSP tours and pseudo-Boolean
//!   bitstrings, the underlying algorithm used by the experiments.
//! - [`localsearch`]: 2-opt, 2.5-opt and 3-opt tour improvement with
//!   candidate lists and don't-look bits.
//! - [`tsplib`]: a parser for the TSPLIB instance format (EUC_2D, ATT,
//!   CEIL_2D metrics) and a known-optimum registry reader.
//! - [`harness`]: failure-probability estimation over many independent runs,
//!   a fixed-period restart baseline, and CSV emission.
//!
//! Each major capability has a runnable program under `examples/`; start with
//! `cargo run --release -p mhrestart --example adaptive_rp`. A thin `mhrestart`
//! binary exposes the batch interface (`solve`, `experiment`, `tmin`, `check`).
//!
//! Step indices are 1-based throughout: the first iteration of the underlying
//! algorithm is step 1, matching the usual convention for optimization-time
//! distributions.

pub mod algo;
pub mod cli;
pub mod harness;
pub mod localsearch;
pub mod mmas;
pub mod restart;
pub mod theory;
pub mod tsplib;

pub use algo::{spawn_replication, ObjectiveValue, Problem, ReplicationPool, Resumable, Trajectory};
pub use restart::{run_rp, RestartConfig, RpRun};
pub use theory::FailureCurve;
