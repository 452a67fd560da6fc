// SPDX-License-Identifier: Apache-2.0

//! Greedy route and stops search.
//!
//! Like Dijkstra, but each node keeps one partial plan: the vehicle's route
//! cost from `st` plus, per rider, the cheapest board/alight legs found along
//! that route. Extending the route to `v` lets each rider keep their legs,
//! alight at `v` instead, or board and alight at `v`. The key is the plan's
//! objective value, which can go down along an edge, so keys are not
//! monotone along a route.
//!
//! With R3 or R4 active every node also carries its explicit stop list, and a
//! would-be improvement that breaks a constraint is repaired by dropping a
//! stop and moving its riders to their cheapest remaining stops.

use serde::{Deserialize, Serialize};

use super::{Constraints, OrisContext, StopPlan};
use crate::error::{Error, Result, Violation};
use crate::graph::{Graph, NodeId};
use crate::heap::IndexedHeap;
use crate::query::QuerySet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Version {
    /// A node is never updated after it has been extracted.
    #[default]
    NoRevisit,
    /// Extracted nodes may be improved and extracted again.
    AllowRevisit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeuristicOptions {
    pub version: Version,
    /// Stop once an extracted node's vehicle cost alone exceeds the key at `en`.
    pub prune: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicStats {
    pub extractions: u64,
    pub relaxations: u64,
    pub peak_frontier: u64,
    /// Most extractions of any single node.
    pub max_node_extractions: u64,
    /// Constraint repairs attempted.
    pub repairs: u64,
    /// Route labels created; one per committed improvement.
    pub labels: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub plan: StopPlan,
    /// Key of `en` when the search ended.
    pub search_cost: f64,
    /// Vehicle cost of the searched route, edge by edge.
    pub route_cost: f64,
    pub stats: HeuristicStats,
}

pub fn heur_stops(
    g: &Graph,
    qs: &QuerySet,
    st: NodeId,
    en: NodeId,
    cons: &Constraints,
    opts: HeuristicOptions,
) -> Result<HeuristicOutcome> {
    let ctx = OrisContext::new(g, qs, st, en)?;
    solve(&ctx, cons, opts)
}

const NO_LABEL: u32 = u32::MAX;

/// Route tree entry; a node's current label points at its parent's label at
/// the time of the update, so routes stay valid when nodes are revisited.
#[derive(Debug, Clone, Copy)]
struct RouteLabel {
    node: u32,
    parent: u32,
}

/// Explicit stops of a partial route, in route order. `stops[0]` is `st`.
#[derive(Debug, Clone, PartialEq)]
struct StopList {
    stops: Vec<NodeId>,
    board: Vec<u32>,
    alight: Vec<u32>,
}

/// One rider's legs in a candidate ledger.
#[derive(Debug, Clone, Copy)]
struct Legs {
    access: f64,
    egress: f64,
    /// Stop indices, used only with explicit stop lists.
    board: u32,
    alight: u32,
}

struct Search<'a, 'g> {
    ctx: &'a OrisContext<'g>,
    cons: &'a Constraints,
    opts: HeuristicOptions,
    q: usize,
    explicit: bool,
    route_limit: f64,
    key: Vec<f64>,
    vehicle: Vec<f64>,
    /// `access[v * q + i]`, `egress[v * q + i]`: rider legs at `v`.
    access: Vec<f64>,
    egress: Vec<f64>,
    stops: Vec<Option<StopList>>,
    label: Vec<u32>,
    labels: Vec<RouteLabel>,
    marked: Vec<bool>,
    extracted: Vec<u32>,
    frontier: IndexedHeap,
    stats: HeuristicStats,
}

impl<'a, 'g> Search<'a, 'g> {
    fn new(ctx: &'a OrisContext<'g>, cons: &'a Constraints, opts: HeuristicOptions) -> Self {
        let n = ctx.graph.node_count();
        let q = ctx.q();
        // Constraints that cannot bind need no stop lists.
        let r4_binds = cons.r4.is_some_and(|r4| r4 < 2 * q + 2);
        Search {
            ctx,
            cons,
            opts,
            q,
            explicit: cons.r3_active() || r4_binds,
            route_limit: cons.route_limit(ctx.direct),
            key: vec![f64::INFINITY; n],
            vehicle: vec![f64::INFINITY; n],
            access: vec![f64::INFINITY; n * q],
            egress: vec![f64::INFINITY; n * q],
            stops: vec![None; n],
            label: vec![NO_LABEL; n],
            labels: Vec::new(),
            marked: vec![false; n],
            extracted: vec![0; n],
            frontier: IndexedHeap::new(n),
            stats: HeuristicStats::default(),
        }
    }

    #[inline]
    fn leg(&self, x: f64) -> f64 {
        self.cons.leg_cost(x, self.ctx.penalty)
    }

    fn objective(&self, vehicle: f64, legs: &[Legs]) -> f64 {
        let solo: f64 = legs.iter().map(|l| self.leg(l.access) + self.leg(l.egress)).sum();
        self.cons.objective.vehicle_weight() * vehicle + solo
    }

    /// Everyone boards and alights at `st`.
    fn init(&mut self) {
        let st = self.ctx.st;
        let s = st.index();
        let legs: Vec<Legs> = (0..self.q)
            .map(|i| Legs {
                access: self.ctx.solo.access(i, st),
                egress: self.ctx.solo.egress(i, st),
                board: 0,
                alight: 0,
            })
            .collect();
        let key = self.objective(0.0, &legs);
        self.commit(s, NO_LABEL, 0.0, &legs, key, None);
        if self.explicit {
            self.stops[s] = Some(StopList {
                stops: vec![st],
                board: vec![0; self.q],
                alight: vec![0; self.q],
            });
        }
        self.frontier.push_or_update(s, key);
        self.stats.peak_frontier = 1;
    }

    fn commit(&mut self, v: usize, parent_label: u32, vehicle: f64, legs: &[Legs], key: f64, stops: Option<StopList>) {
        let q = self.q;
        self.key[v] = key;
        self.vehicle[v] = vehicle;
        for (i, l) in legs.iter().enumerate() {
            self.access[v * q + i] = l.access;
            self.egress[v * q + i] = l.egress;
        }
        if self.explicit {
            self.stops[v] = stops;
        }
        self.label[v] = self.labels.len() as u32;
        self.labels.push(RouteLabel {
            node: v as u32,
            parent: parent_label,
        });
    }

    /// Candidate ledger for extending `u`'s route to `v`.
    fn candidate(&self, u: usize, v: usize, legs: &mut Vec<Legs>) {
        let q = self.q;
        let vn = NodeId::from(v);
        let (stops_u, new_idx) = match &self.stops[u] {
            Some(s) => (Some(s), s.stops.len() as u32),
            None => (None, 0),
        };
        legs.clear();
        for i in 0..q {
            let (acc_u, egr_u) = (self.access[u * q + i], self.egress[u * q + i]);
            let (b_u, a_u) = stops_u.map_or((0, 0), |s| (s.board[i], s.alight[i]));
            let (acc_v, egr_v) = (self.ctx.solo.access(i, vn), self.ctx.solo.egress(i, vn));
            // Keep the boarding; alight where it is cheaper, keeping ties.
            let (egr_a, a_a) = if self.leg(egr_v) < self.leg(egr_u) {
                (egr_v, new_idx)
            } else {
                (egr_u, a_u)
            };
            let keep = self.leg(acc_u) + self.leg(egr_a);
            let fresh = self.leg(acc_v) + self.leg(egr_v);
            legs.push(if keep < fresh {
                Legs {
                    access: acc_u,
                    egress: egr_a,
                    board: b_u,
                    alight: a_a,
                }
            } else {
                Legs {
                    access: acc_v,
                    egress: egr_v,
                    board: new_idx,
                    alight: new_idx,
                }
            });
        }
    }

    fn relax(&mut self, u: usize, v: usize, c: f64, legs: &mut Vec<Legs>) -> bool {
        self.stats.relaxations += 1;
        let vehicle = self.vehicle[u] + c;
        if vehicle + self.ctx.to_en[v] > self.route_limit {
            return false;
        }
        self.candidate(u, v, legs);
        let mut key = self.objective(vehicle, legs);
        if key >= self.key[v] {
            return false;
        }
        let mut stops = None;
        if self.explicit {
            let mut list = self.extend_stops(u, v, legs);
            if self.repair(&mut list, legs, v) {
                self.stats.repairs += 1;
                key = self.objective(vehicle, legs);
                if key >= self.key[v] {
                    return false;
                }
            }
            stops = Some(list);
        }
        self.commit(v, self.label[u], vehicle, legs, key, stops);
        self.frontier.push_or_update(v, key);
        self.stats.peak_frontier = self.stats.peak_frontier.max(self.frontier.len() as u64);
        true
    }

    /// `u`'s stop list with `v` appended, and the legs' indices applied.
    fn extend_stops(&self, u: usize, v: usize, legs: &[Legs]) -> StopList {
        let base = self.stops[u].as_ref().expect("explicit mode keeps stop lists");
        let mut list = base.clone();
        list.stops.push(NodeId::from(v));
        for (i, l) in legs.iter().enumerate() {
            list.board[i] = l.board;
            list.alight[i] = l.alight;
        }
        list
    }

    /// Enforces R3 and R4 on a candidate at `v`; returns whether anything
    /// changed. The last stop is the vehicle's current position.
    fn repair(&self, list: &mut StopList, legs: &mut [Legs], v: usize) -> bool {
        let at_en = v == self.ctx.en.index();
        let mut changed = drop_idle_stops(list, legs);
        loop {
            let events = stop_events(list);
            let last = list.stops.len() - 1;
            let removable: Vec<usize> = if at_en { (1..last).collect() } else { (1..=last).collect() };
            // Stops in the finished plan: the current list, plus `en` unless we are there.
            let count = list.stops.len() + usize::from(!at_en);
            let victim = if self.cons.r4.is_some_and(|r4| count > r4) {
                self.cheapest_stop(list, legs, &removable, &events)
            } else if self.cons.r3_active() {
                let short: Vec<usize> = (1..last).filter(|&j| events[j] < self.cons.r3 as usize).collect();
                self.cheapest_stop(list, legs, &short, &events)
            } else {
                None
            };
            let Some(victim) = victim else {
                return changed;
            };
            changed = true;
            self.eliminate(list, legs, victim);
            drop_idle_stops(list, legs);
        }
    }

    /// Stop among `candidates` with the fewest riders, then the lowest leg
    /// cost, then the earliest.
    fn cheapest_stop(&self, list: &StopList, legs: &[Legs], candidates: &[usize], events: &[usize]) -> Option<usize> {
        candidates.iter().copied().min_by(|&a, &b| {
            events[a]
                .cmp(&events[b])
                .then(stop_cost(list, legs, a).total_cmp(&stop_cost(list, legs, b)))
                .then(a.cmp(&b))
        })
    }

    /// Removes stop `j` and gives each displaced rider the cheapest remaining
    /// board/alight pair.
    fn eliminate(&self, list: &mut StopList, legs: &mut [Legs], j: usize) {
        list.stops.remove(j);
        let j = j as u32;
        for i in 0..self.q {
            let displaced = list.board[i] == j || list.alight[i] == j;
            for idx in [&mut list.board[i], &mut list.alight[i]] {
                if *idx > j {
                    *idx -= 1;
                }
            }
            legs[i].board = list.board[i];
            legs[i].alight = list.alight[i];
            if displaced {
                let (b, a, acc, egr) = self.best_pair(i, &list.stops);
                list.board[i] = b;
                list.alight[i] = a;
                legs[i] = Legs {
                    access: acc,
                    egress: egr,
                    board: b,
                    alight: a,
                };
            }
        }
    }

    /// Cheapest `(board, alight)` over `stops` with board not after alight;
    /// ties go to the earliest positions.
    fn best_pair(&self, i: usize, stops: &[NodeId]) -> (u32, u32, f64, f64) {
        let mut best: Option<(f64, u32, u32)> = None;
        let mut best_access: Option<(f64, u32)> = None;
        for (k, &node) in stops.iter().enumerate() {
            let acc = self.leg(self.ctx.solo.access(i, node));
            if best_access.is_none_or(|(a, _)| acc < a) {
                best_access = Some((acc, k as u32));
            }
            let (a, b) = best_access.expect("set above");
            let total = a + self.leg(self.ctx.solo.egress(i, node));
            if best.is_none_or(|(c, _, _)| total < c) {
                best = Some((total, b, k as u32));
            }
        }
        let (_, b, k) = best.expect("at least one stop");
        (
            b,
            k,
            self.ctx.solo.access(i, stops[b as usize]),
            self.ctx.solo.egress(i, stops[k as usize]),
        )
    }

    fn run(&mut self) -> Result<()> {
        self.init();
        let n = self.ctx.graph.node_count();
        let en = self.ctx.en.index();
        let wv = self.cons.objective.vehicle_weight();
        let mut legs = Vec::with_capacity(self.q);
        while let Some((u, _)) = self.frontier.pop() {
            self.stats.extractions += 1;
            self.marked[u] = true;
            self.extracted[u] += 1;
            let times = self.extracted[u];
            self.stats.max_node_extractions = self.stats.max_node_extractions.max(times as u64);
            if times as usize > n.max(2) {
                return Err(Error::RevisitCap {
                    node: NodeId::from(u),
                    cap: n.max(2),
                });
            }
            if self.opts.prune && wv * self.vehicle[u] > self.key[en] {
                break;
            }
            let g = self.ctx.graph;
            let (heads, costs) = g.out(u);
            for (&h, &c) in heads.iter().zip(costs) {
                let v = h as usize;
                if self.opts.version == Version::NoRevisit && self.marked[v] {
                    continue;
                }
                self.relax(u, v, c, &mut legs);
            }
        }
        Ok(())
    }

    /// Node sequence of the route to `v`.
    fn route_to(&self, v: usize) -> Vec<NodeId> {
        let mut route = Vec::new();
        let mut cur = self.label[v];
        while cur != NO_LABEL {
            let l = self.labels[cur as usize];
            route.push(NodeId(l.node));
            cur = l.parent;
        }
        route.reverse();
        route
    }

    /// Boards each rider at the route position nearest their source and
    /// alights them at the nearest position to their destination, choosing
    /// the pair jointly so boarding never follows alighting. Ties go to the
    /// positions closest to `st`.
    fn vehicle_stops(&self, route: &[NodeId]) -> (Vec<NodeId>, Vec<usize>, Vec<usize>) {
        let len = route.len();
        let mut pos_board = vec![0; self.q];
        let mut pos_alight = vec![0; self.q];
        for i in 0..self.q {
            let (b, a, _, _) = self.best_pair(i, route);
            pos_board[i] = b as usize;
            pos_alight[i] = a as usize;
        }
        let mut used = vec![false; len];
        used[0] = true;
        used[len - 1] = true;
        for i in 0..self.q {
            used[pos_board[i]] = true;
            used[pos_alight[i]] = true;
        }
        let mut index = vec![0; len];
        let mut stops = Vec::new();
        for p in 0..len {
            if used[p] {
                index[p] = stops.len();
                stops.push(route[p]);
            }
        }
        if len == 1 {
            // st == en and the vehicle never moved.
            stops.push(route[0]);
        }
        let board = pos_board.iter().map(|&p| index[p]).collect();
        let alight = pos_alight.iter().map(|&p| index[p]).collect();
        (stops, board, alight)
    }

    fn explicit_plan(&self, en: usize) -> Option<(Vec<NodeId>, Vec<usize>, Vec<usize>)> {
        let list = self.stops[en].as_ref()?;
        let mut stops = list.stops.clone();
        let board: Vec<usize> = list.board.iter().map(|&b| b as usize).collect();
        let alight: Vec<usize> = list.alight.iter().map(|&a| a as usize).collect();
        if stops.len() == 1 || *stops.last().unwrap() != self.ctx.en {
            stops.push(self.ctx.en);
        }
        Some((stops, board, alight))
    }
}

/// Single relaxations on a fresh search, for inspecting the ledger by hand.
/// Only `st` holds a plan at the start.
pub struct Stepper<'a, 'g> {
    search: Search<'a, 'g>,
    legs: Vec<Legs>,
}

impl<'a, 'g> Stepper<'a, 'g> {
    pub fn new(ctx: &'a OrisContext<'g>, cons: &'a Constraints) -> Self {
        let mut search = Search::new(ctx, cons, HeuristicOptions::default());
        search.init();
        Stepper {
            search,
            legs: Vec::new(),
        }
    }

    /// Extends `u`'s route along an edge of cost `c` to `v`; true when `v`
    /// took the new plan.
    pub fn relax(&mut self, u: NodeId, v: NodeId, c: f64) -> bool {
        self.search.relax(u.index(), v.index(), c, &mut self.legs)
    }

    pub fn key(&self, v: NodeId) -> f64 {
        self.search.key[v.index()]
    }

    pub fn vehicle(&self, v: NodeId) -> f64 {
        self.search.vehicle[v.index()]
    }

    /// Per rider `(access, egress)` at `v`.
    pub fn legs(&self, v: NodeId) -> Vec<(f64, f64)> {
        let q = self.search.q;
        let v = v.index();
        (0..q).map(|i| (self.search.access[v * q + i], self.search.egress[v * q + i])).collect()
    }

    pub fn route(&self, v: NodeId) -> Vec<NodeId> {
        self.search.route_to(v.index())
    }
}

/// Boardings plus alightings per stop.
fn stop_events(list: &StopList) -> Vec<usize> {
    let mut ev = vec![0; list.stops.len()];
    for (&b, &a) in list.board.iter().zip(&list.alight) {
        ev[b as usize] += 1;
        ev[a as usize] += 1;
    }
    ev
}

/// Solo legs served at stop `j`.
fn stop_cost(list: &StopList, legs: &[Legs], j: usize) -> f64 {
    let j = j as u32;
    legs.iter()
        .zip(list.board.iter().zip(&list.alight))
        .map(|(l, (&b, &a))| if b == j { l.access } else { 0.0 } + if a == j { l.egress } else { 0.0 })
        .sum()
}

/// Removes intermediate stops nobody uses, except the last one (the
/// vehicle's position). Returns whether any were removed.
fn drop_idle_stops(list: &mut StopList, legs: &mut [Legs]) -> bool {
    let mut changed = false;
    let mut j = 1;
    while j + 1 < list.stops.len() {
        if stop_events(list)[j] == 0 {
            list.stops.remove(j);
            for i in 0..list.board.len() {
                for idx in [&mut list.board[i], &mut list.alight[i]] {
                    if *idx > j as u32 {
                        *idx -= 1;
                    }
                }
                legs[i].board = list.board[i];
                legs[i].alight = list.alight[i];
            }
            changed = true;
        } else {
            j += 1;
        }
    }
    changed
}

/// Heuristic solver on a prepared context.
pub fn solve(ctx: &OrisContext<'_>, cons: &Constraints, opts: HeuristicOptions) -> Result<HeuristicOutcome> {
    cons.validate(ctx.q())?;
    ctx.check_reachable()?;
    let mut search = Search::new(ctx, cons, opts);
    search.run()?;
    let en = ctx.en.index();
    if search.label[en] == NO_LABEL {
        let v = if cons.r2.is_some() { Violation::RouteStretch } else { Violation::Disconnected };
        return Err(Error::infeasible(v));
    }
    search.stats.labels = search.labels.len() as u64;
    let route = search.route_to(en);
    let (stops, board, alight) = search.vehicle_stops(&route);
    let mut plan = StopPlan::build(ctx, stops, board, alight, cons.objective)?;
    if search.explicit {
        let greedy_ok = plan.violation(cons, ctx.direct).is_none();
        let (stops, board, alight) = search.explicit_plan(en).expect("explicit mode keeps stop lists");
        let kept = StopPlan::build(ctx, stops, board, alight, cons.objective)?;
        if !greedy_ok || kept.total_cost < plan.total_cost {
            plan = kept;
        }
    }
    plan.route = route;
    plan.check(cons, ctx.direct)?;
    Ok(HeuristicOutcome {
        plan,
        search_cost: search.key[en],
        route_cost: search.vehicle[en],
        stats: search.stats,
    })
}
