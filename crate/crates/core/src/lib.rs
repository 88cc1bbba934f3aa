//! Distributed consensus of Hammerstein and Wiener agents driven by a
//! stochastic approximation controller with expanding truncations.
//!
//! Each agent only sees noisy outputs of its graph neighbors. Its controller
//! nudges its own input toward agreement and, whenever the input leaves a
//! slowly growing admissible region, resets it and shares the updated
//! truncation count with its neighbors.
//!
//! The crate is split the same way a run flows:
//!
//! * [`graph`], [`polynomial`], [`nonlinearity`], [`plant`]: the network and
//!   the block-oriented agents.
//! * [`noise`]: reproducible per-link observation noise.
//! * [`controller`]: the per-agent update.
//! * [`harness`]: scenarios, the synchronous loop, and the log.
//! * [`analysis`]: diagnostics and exact oracles over a finished log.
//! * [`cli`]: the `run` / `verify` / `plotdata` command line.
//!
//! ```
//! use hwconsensus::harness::{builtin_case, run};
//!
//! let scenario = builtin_case(1).unwrap().with_horizon(2_000);
//! let result = run(&scenario, 7).unwrap();
//! assert_eq!(result.summary.steps, 2_000);
//! ```

// `!(x < bound)` is used on purpose so that NaN falls on the rejecting side
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod controller;
pub mod graph;
pub mod harness;
pub mod noise;
pub mod nonlinearity;
pub mod plant;
pub mod polynomial;
