// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::constraints::{Constraints, Objective};
use super::OrisContext;
use crate::error::{Error, Result, Violation};
use crate::graph::NodeId;
use crate::sssp::Dijkstra;

/// Answer to a route-and-stops query.
///
/// `stops[0] = st` and the last stop is `en`. Rider `i` boards at
/// `stops[board[i]]` and alights at `stops[alight[i]]`, with
/// `board[i] <= alight[i]`. The vehicle drives a shortest path between
/// consecutive stops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopPlan {
    pub stops: Vec<NodeId>,
    pub board: Vec<usize>,
    pub alight: Vec<usize>,
    /// `SPC(s_i, stops[board[i]])`.
    pub access: Vec<f64>,
    /// `SPC(stops[alight[i]], d_i)`.
    pub egress: Vec<f64>,
    /// Sum of `SPC` between consecutive stops.
    pub vehicle_cost: f64,
    pub total_cost: f64,
    pub objective: Objective,
    /// Node-by-node vehicle route.
    pub route: Vec<NodeId>,
}

impl StopPlan {
    /// Evaluates stops and assignments from scratch on `ctx`.
    pub fn build(
        ctx: &OrisContext<'_>,
        stops: Vec<NodeId>,
        board: Vec<usize>,
        alight: Vec<usize>,
        objective: Objective,
    ) -> Result<StopPlan> {
        let q = ctx.q();
        if stops.len() < 2 || stops[0] != ctx.st || *stops.last().unwrap() != ctx.en {
            return Err(Error::InvalidArgument("stops must run from st to en".into()));
        }
        if board.len() != q || alight.len() != q {
            return Err(Error::InvalidArgument("one board and one alight index per rider".into()));
        }
        for i in 0..q {
            if board[i] > alight[i] || alight[i] >= stops.len() {
                return Err(Error::InvalidArgument(format!(
                    "rider {i}: board {} / alight {} out of order",
                    board[i], alight[i]
                )));
            }
        }
        let mut dij = Dijkstra::new(ctx.graph.node_count());
        let mut vehicle_cost = 0.0;
        let mut route = vec![stops[0]];
        for w in stops.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a == b {
                continue;
            }
            let d = dij.run(ctx.graph, a, Some(b))[b.index()];
            if !d.is_finite() {
                return Err(Error::infeasible(Violation::Disconnected));
            }
            vehicle_cost += d;
            let parents = dij.parents();
            let mut seg = vec![b];
            let mut cur = b;
            while cur != a {
                cur = parents[cur.index()].expect("settled node has a parent");
                seg.push(cur);
            }
            route.extend(seg.into_iter().rev().skip(1));
        }
        let access: Vec<f64> = (0..q).map(|i| ctx.solo.access(i, stops[board[i]])).collect();
        let egress: Vec<f64> = (0..q).map(|i| ctx.solo.egress(i, stops[alight[i]])).collect();
        if access.iter().chain(&egress).any(|x| !x.is_finite()) {
            return Err(Error::infeasible(Violation::Disconnected));
        }
        let mut plan = StopPlan {
            stops,
            board,
            alight,
            access,
            egress,
            vehicle_cost,
            total_cost: 0.0,
            objective,
            route,
        };
        plan.total_cost = plan.recompute_total();
        Ok(plan)
    }

    pub fn solo_cost(&self) -> f64 {
        self.access.iter().chain(&self.egress).fold(0.0, |a, b| a + b)
    }

    /// Objective value from the stored components.
    pub fn recompute_total(&self) -> f64 {
        self.objective.combine(self.vehicle_cost, self.solo_cost())
    }

    /// Boardings plus alightings at each stop.
    pub fn stop_events(&self) -> Vec<usize> {
        let mut ev = vec![0; self.stops.len()];
        for (&b, &a) in self.board.iter().zip(&self.alight) {
            ev[b] += 1;
            ev[a] += 1;
        }
        ev
    }

    /// First constraint the plan breaks, if any. `direct` is `SPC(st, en)`.
    pub fn violation(&self, cons: &Constraints, direct: f64) -> Option<Violation> {
        if !self.access.iter().chain(&self.egress).all(|&x| cons.leg_ok(x)) {
            return Some(Violation::SoloLimit);
        }
        if self.vehicle_cost > cons.route_limit(direct) {
            return Some(Violation::RouteStretch);
        }
        if cons.r3 > 0 {
            let ev = self.stop_events();
            let last = ev.len() - 1;
            if ev[1..last].iter().any(|&e| e < cons.r3 as usize) {
                return Some(Violation::MinActivity);
            }
        }
        if cons.r4.is_some_and(|r4| self.stops.len() > r4) {
            return Some(Violation::MaxStops);
        }
        None
    }

    pub fn check(&self, cons: &Constraints, direct: f64) -> Result<()> {
        match self.violation(cons, direct) {
            Some(v) => Err(Error::infeasible(v)),
            None => Ok(()),
        }
    }
}
