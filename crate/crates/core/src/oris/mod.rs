// SPDX-License-Identifier: Apache-2.0

//! Vehicle route and intermediate stops between fixed end stops.
//!
//! The vehicle leaves `st`, ends at `en`, and stops along the way so that
//! each rider can board and alight. A plan costs its vehicle route plus every
//! rider's walk to the boarding stop and from the alighting stop, or a
//! weighted mix of the two (see [`Objective`]).

mod constraints;
pub mod exact;
pub mod heuristic;
mod plan;

pub use constraints::{Constraints, Objective};
pub use exact::{enumerate_valid_masks, opt_stops, opt_stops_r4, ExactOptions, ExactOutcome};
pub use heuristic::{heur_stops, HeuristicOptions, HeuristicOutcome, HeuristicStats, Stepper, Version};
pub use plan::StopPlan;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::query::QuerySet;
use crate::sssp::{Dijkstra, SoloCosts};

/// Precomputed data shared by the route solvers for one instance.
#[derive(Debug, Clone)]
pub struct OrisContext<'g> {
    pub graph: &'g Graph,
    pub queries: QuerySet,
    pub st: NodeId,
    pub en: NodeId,
    pub solo: SoloCosts,
    /// `SPC(v, en)` for every node.
    pub to_en: Vec<f64>,
    /// `SPC(st, en)`.
    pub direct: f64,
    /// Stand-in cost for solo legs longer than R1.
    pub penalty: f64,
}

impl<'g> OrisContext<'g> {
    pub fn new(graph: &'g Graph, queries: &QuerySet, st: NodeId, en: NodeId) -> Result<Self> {
        let gt = graph.transpose();
        Self::with_transpose(graph, &gt, queries, st, en)
    }

    pub fn with_transpose(
        graph: &'g Graph,
        transpose: &Graph,
        queries: &QuerySet,
        st: NodeId,
        en: NodeId,
    ) -> Result<Self> {
        graph.check_node(st)?;
        graph.check_node(en)?;
        queries.validate(graph)?;
        let solo = SoloCosts::compute_with_transpose(graph, transpose, queries);
        Ok(Self::with_solo(graph, transpose, queries, st, en, solo))
    }

    /// Uses caller-supplied solo cost tables.
    pub fn with_solo(
        graph: &'g Graph,
        transpose: &Graph,
        queries: &QuerySet,
        st: NodeId,
        en: NodeId,
        solo: SoloCosts,
    ) -> Self {
        let mut d = Dijkstra::new(graph.node_count());
        let to_en = d.run(transpose, en, None).to_vec();
        let direct = to_en[st.index()];
        OrisContext {
            graph,
            queries: queries.clone(),
            st,
            en,
            solo,
            to_en,
            direct,
            penalty: Constraints::penalty(queries.len(), graph.total_cost()),
        }
    }

    pub fn q(&self) -> usize {
        self.queries.len()
    }

    pub(crate) fn check_reachable(&self) -> Result<()> {
        if self.direct.is_finite() {
            Ok(())
        } else {
            Err(Error::infeasible(crate::error::Violation::Disconnected))
        }
    }
}
