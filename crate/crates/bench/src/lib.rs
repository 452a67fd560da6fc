// SPDX-License-Identifier: Apache-2.0

//! Experiment harness behind the `roadstops` binary: timed solver runs,
//! parameter sweeps and their CSV rows.

pub mod metrics;
pub mod runner;
pub mod sweep;

pub use metrics::{RunMetrics, Sample};
pub use runner::{run_oes, run_oris, OesAlgo, OrisAlgo};
pub use sweep::{run_sweep, Param, Problem, SweepConfig};
