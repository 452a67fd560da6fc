// SPDX-License-Identifier: Apache-2.0

//! Stop planning for a shared vehicle on a road network.
//!
//! Two query families are solved here:
//!
//! * end stops ([`oes`]): given clustered trip queries, pick the pickup and
//!   drop-off nodes `(st, en)` minimising the vehicle's shortest-path cost plus
//!   every rider's walk to `st` and from `en`;
//! * route and intermediate stops ([`oris`]): with `st` and `en` fixed, choose
//!   the vehicle route and the stops where each rider boards and alights.

pub mod error;
pub mod graph;
pub mod heap;
pub mod oes;
pub mod oracle;
pub mod oris;
pub mod query;
pub mod querygen;
pub mod sssp;

pub use error::{Error, Result, Violation};
pub use graph::{Graph, NodeId, Point};
pub use query::QuerySet;
pub use oes::{baseline_end_stops, fast_end_stops, EndStopsResult};
pub use oris::{Constraints, Objective, StopPlan};
