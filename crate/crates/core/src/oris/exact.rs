// SPDX-License-Identifier: Apache-2.0

//! Exact route and stops by Dijkstra over `(node, served set)` states.
//!
//! A state records where the vehicle is and which sources and destinations
//! have been served. Moving along an edge keeps the set and costs the edge.
//! Serving source `i` at `u` costs `SPC(s_i, u)`, serving destination `i`
//! costs `SPC(u, d_i)` and needs source `i` served first. The answer is the
//! cheapest way to reach `(en, everything served)`.
//!
//! R3 and R4 extend the state with the vehicle's stop status, the activity
//! count at the current stop, and the number of stops so far. R2 keeps a
//! Pareto set of (cost, route length) labels per state.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Constraints, OrisContext, StopPlan};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::query::QuerySet;

/// Served sets as 2 bits per query: bit `2i` for the source, `2i + 1` for
/// the destination. Valid sets never hold a destination without its source.
pub fn mask_is_valid(mask: u32, q: usize) -> bool {
    (0..q).all(|i| mask >> (2 * i + 1) & 1 == 0 || mask >> (2 * i) & 1 == 1)
}

pub fn full_mask(q: usize) -> u32 {
    if q == 0 {
        0
    } else {
        u32::MAX >> (32 - 2 * q)
    }
}

/// All `3^q` valid served sets, by increasing size, then by value.
pub fn enumerate_valid_masks(q: usize) -> Vec<u32> {
    assert!(q <= 16, "at most 16 queries fit a 32-bit mask");
    let mut masks = vec![0u32];
    for i in 0..q {
        let mut next = Vec::with_capacity(masks.len() * 3);
        for &m in &masks {
            next.push(m);
            next.push(m | 1 << (2 * i));
            next.push(m | 3 << (2 * i));
        }
        masks = next;
    }
    masks.sort_by_key(|&m| (m.count_ones(), m));
    masks
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Stop at the first extraction of a finished state.
    pub early_stop: bool,
    /// Largest state space the solver will allocate.
    pub state_budget: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            early_stop: true,
            state_budget: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactStats {
    pub extractions: u64,
    pub relaxations: u64,
    pub peak_frontier: u64,
    /// Distinct states reached.
    pub peak_states: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub plan: StopPlan,
    /// Objective value found by the search.
    pub search_cost: f64,
    pub stats: ExactStats,
}

/// Exact optimum for `qs` with end stops `st`, `en`.
pub fn opt_stops(
    g: &Graph,
    qs: &QuerySet,
    st: NodeId,
    en: NodeId,
    cons: &Constraints,
    early_stop: bool,
) -> Result<ExactOutcome> {
    let ctx = OrisContext::new(g, qs, st, en)?;
    solve(&ctx, cons, ExactOptions { early_stop, ..ExactOptions::default() })
}

/// [`opt_stops`] for a finite stop budget R4.
pub fn opt_stops_r4(g: &Graph, qs: &QuerySet, st: NodeId, en: NodeId, cons: &Constraints) -> Result<ExactOutcome> {
    if cons.r4.is_none() {
        return Err(Error::InvalidConstraint("R4 must be set".into()));
    }
    opt_stops(g, qs, st, en, cons, true)
}

const INITIAL: u32 = 0;
const PASSING: u32 = 1;
const STOPPED: u32 = 2;
const NO_PARENT: u32 = u32::MAX;

/// Vehicle status kept alongside the served set when R3 or R4 is active.
#[derive(Debug, Clone, Copy)]
struct AuxCodec {
    enabled: bool,
    /// Activity count saturates here; moving on needs `k == k_max`.
    k_max: u32,
    /// Stop budget when R4 is set.
    s_max: Option<u32>,
}

impl AuxCodec {
    fn new(cons: &Constraints) -> Self {
        let k_max = if cons.r3_active() { cons.r3 } else { 0 };
        let s_max = cons.r4.map(|r| r.min(u32::MAX as usize - 1) as u32);
        AuxCodec {
            enabled: k_max > 0 || s_max.is_some(),
            k_max,
            s_max,
        }
    }

    fn s_range(&self) -> u32 {
        self.s_max.map_or(1, |s| s + 1)
    }

    fn size(&self) -> u64 {
        if self.enabled {
            3 * (self.k_max as u64 + 1) * self.s_range() as u64
        } else {
            1
        }
    }

    fn encode(&self, status: u32, k: u32, s: u32) -> u32 {
        if !self.enabled {
            return 0;
        }
        let s = if self.s_max.is_some() { s } else { 0 };
        (status * (self.k_max + 1) + k) * self.s_range() + s
    }

    fn decode(&self, aux: u32) -> (u32, u32, u32) {
        if !self.enabled {
            return (PASSING, 0, 1);
        }
        let s = aux % self.s_range();
        let rest = aux / self.s_range();
        let s = if self.s_max.is_some() { s } else { 1 };
        (rest / (self.k_max + 1), rest % (self.k_max + 1), s)
    }

    fn initial(&self) -> u32 {
        self.encode(INITIAL, 0, 1)
    }

    fn after_join(&self, aux: u32) -> Option<u32> {
        if !self.enabled {
            return Some(0);
        }
        let (status, k, s) = self.decode(aux);
        match status {
            INITIAL => Some(aux),
            PASSING => {
                let s = s + 1;
                if self.s_max.is_some_and(|m| s > m) {
                    return None;
                }
                Some(self.encode(STOPPED, 1.min(self.k_max), s))
            }
            _ => Some(self.encode(STOPPED, (k + 1).min(self.k_max), s)),
        }
    }

    fn after_move(&self, aux: u32) -> Option<u32> {
        if !self.enabled {
            return Some(0);
        }
        let (status, k, s) = self.decode(aux);
        if status == STOPPED && k < self.k_max {
            return None;
        }
        Some(self.encode(PASSING, 0, s))
    }

    /// Whether a state at `en` with everything served is an acceptable end.
    fn can_finish(&self, aux: u32) -> bool {
        if !self.enabled {
            return true;
        }
        let (status, _, s) = self.decode(aux);
        let stops = match status {
            INITIAL => 2,
            PASSING => s + 1,
            _ => s,
        };
        self.s_max.is_none_or(|m| stops <= m)
    }
}

#[derive(Debug, Clone, Copy)]
struct Label {
    node: u32,
    mask: u32,
    tern: u32,
    aux: u32,
    cost: f64,
    vehicle: f64,
    parent: u32,
}

#[derive(Debug, Clone, Copy)]
struct Queued {
    cost: f64,
    vehicle: f64,
    id: u32,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    /// Reversed so `BinaryHeap` pops the cheapest label first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then(other.vehicle.total_cmp(&self.vehicle))
            .then(other.id.cmp(&self.id))
    }
}

/// Search engine over the product state space of one instance.
struct Engine<'a, 'g> {
    ctx: &'a OrisContext<'g>,
    cons: &'a Constraints,
    aux: AuxCodec,
    q: usize,
    n_masks: u64,
    pow3: Vec<u32>,
    full: u32,
    route_limit: f64,
    pareto: bool,
    labels: Vec<Label>,
    heap: BinaryHeap<Queued>,
    /// Best tentative cost per state (single-label mode).
    best: Vec<f64>,
    settled: Vec<bool>,
    /// Route lengths of settled labels per state (Pareto mode).
    front: HashMap<u64, Vec<f64>>,
    reached: Vec<bool>,
    stats: ExactStats,
}

impl<'a, 'g> Engine<'a, 'g> {
    fn new(ctx: &'a OrisContext<'g>, cons: &'a Constraints, opts: &ExactOptions) -> Result<Self> {
        let q = ctx.q();
        if q > 16 {
            return Err(Error::Capacity {
                states: u64::MAX,
                budget: opts.state_budget,
            });
        }
        let states = (ctx.graph.node_count() as u64)
            .saturating_mul(3u64.pow(q as u32))
            .saturating_mul(AuxCodec::new(cons).size());
        if states > opts.state_budget {
            return Err(Error::Capacity {
                states,
                budget: opts.state_budget,
            });
        }
        let states = states as usize;
        let mut e = Engine::new_unsized(ctx, cons);
        if !e.pareto {
            e.best = vec![f64::INFINITY; states];
            e.settled = vec![false; states];
        }
        e.reached = vec![false; states];
        Ok(e)
    }

    #[inline]
    fn state(&self, node: u32, tern: u32, aux: u32) -> u64 {
        (node as u64 * self.n_masks + tern as u64) * self.aux.size() + aux as u64
    }

    fn offer(&mut self, lab: Label) {
        let s = self.state(lab.node, lab.tern, lab.aux);
        if self.pareto {
            if let Some(vs) = self.front.get(&s) {
                if vs.iter().any(|&v| v <= lab.vehicle) {
                    return;
                }
            }
        } else {
            if lab.cost >= self.best[s as usize] {
                return;
            }
            self.best[s as usize] = lab.cost;
        }
        if !self.reached[s as usize] {
            self.reached[s as usize] = true;
            self.stats.peak_states += 1;
        }
        let id = self.labels.len() as u32;
        self.labels.push(lab);
        self.heap.push(Queued {
            cost: lab.cost,
            vehicle: lab.vehicle,
            id,
        });
        self.stats.peak_frontier = self.stats.peak_frontier.max(self.heap.len() as u64);
    }

    /// Successor labels of `lab` (which has id `id`), in a fixed order:
    /// joins by query index, then moves in adjacency order.
    fn successors(&self, lab: &Label, id: u32, out: &mut Vec<Label>) {
        out.clear();
        let ctx = self.ctx;
        let u = NodeId(lab.node);
        if let Some(aux) = self.aux.after_join(lab.aux) {
            for i in 0..self.q {
                let (bit, x) = if lab.mask >> (2 * i) & 1 == 0 {
                    (2 * i, ctx.solo.access(i, u))
                } else if lab.mask >> (2 * i + 1) & 1 == 0 {
                    (2 * i + 1, ctx.solo.egress(i, u))
                } else {
                    continue;
                };
                let leg = self.cons.leg_cost(x, ctx.penalty);
                if leg.is_finite() {
                    out.push(Label {
                        node: lab.node,
                        mask: lab.mask | 1 << bit,
                        tern: lab.tern + self.pow3[i],
                        aux,
                        cost: lab.cost + leg,
                        vehicle: lab.vehicle,
                        parent: id,
                    });
                }
            }
        }
        if let Some(aux) = self.aux.after_move(lab.aux) {
            let wv = self.cons.objective.vehicle_weight();
            let (heads, costs) = ctx.graph.out(lab.node as usize);
            for (&h, &c) in heads.iter().zip(costs) {
                let vehicle = lab.vehicle + c;
                if self.pareto && vehicle + ctx.to_en[h as usize] > self.route_limit {
                    continue;
                }
                out.push(Label {
                    node: h,
                    mask: lab.mask,
                    tern: lab.tern,
                    aux,
                    cost: lab.cost + wv * c,
                    vehicle,
                    parent: id,
                });
            }
        }
    }

    fn run(&mut self, early_stop: bool) -> Option<u32> {
        let st = self.ctx.st.0;
        self.offer(Label {
            node: st,
            mask: 0,
            tern: 0,
            aux: self.aux.initial(),
            cost: 0.0,
            vehicle: 0.0,
            parent: NO_PARENT,
        });
        let en = self.ctx.en.0;
        let mut answer: Option<u32> = None;
        let mut buf = Vec::new();
        while let Some(Queued { id, .. }) = self.heap.pop() {
            let lab = self.labels[id as usize];
            let s = self.state(lab.node, lab.tern, lab.aux);
            if self.pareto {
                let vs = self.front.entry(s).or_default();
                if vs.iter().any(|&v| v <= lab.vehicle) {
                    continue;
                }
                vs.push(lab.vehicle);
            } else {
                if self.settled[s as usize] {
                    continue;
                }
                self.settled[s as usize] = true;
            }
            self.stats.extractions += 1;
            if lab.node == en && lab.mask == self.full && self.aux.can_finish(lab.aux) {
                let better = answer.is_none_or(|a| self.labels[a as usize].cost > lab.cost);
                if better {
                    answer = Some(id);
                }
                if early_stop {
                    break;
                }
            }
            self.successors(&lab, id, &mut buf);
            for next in buf.drain(..) {
                self.stats.relaxations += 1;
                self.offer(next);
            }
        }
        answer
    }

    /// Replays the label chain into stops and rider assignments.
    fn compute_stops(&self, terminal: u32) -> (Vec<NodeId>, Vec<usize>, Vec<usize>) {
        let mut chain = Vec::new();
        let mut cur = terminal;
        while cur != NO_PARENT {
            chain.push(cur);
            cur = self.labels[cur as usize].parent;
        }
        chain.reverse();
        let q = self.q;
        let mut stops = vec![self.ctx.st];
        let mut board = vec![0; q];
        let mut alight = vec![0; q];
        let mut moved = false;
        for w in chain.windows(2) {
            let (prev, next) = (&self.labels[w[0] as usize], &self.labels[w[1] as usize]);
            if prev.mask == next.mask {
                moved = true;
                continue;
            }
            if moved {
                stops.push(NodeId(next.node));
                moved = false;
            }
            let grown = (prev.mask ^ next.mask).trailing_zeros() as usize;
            let slot = if grown % 2 == 0 { &mut board } else { &mut alight };
            slot[grown / 2] = stops.len() - 1;
        }
        if moved || stops.len() == 1 {
            stops.push(self.ctx.en);
        }
        (stops, board, alight)
    }
}

/// Exact solver on a prepared context.
pub fn solve(ctx: &OrisContext<'_>, cons: &Constraints, opts: ExactOptions) -> Result<ExactOutcome> {
    cons.validate(ctx.q())?;
    ctx.check_reachable()?;
    let mut engine = Engine::new(ctx, cons, &opts)?;
    let terminal = engine.run(opts.early_stop);
    let Some(terminal) = terminal else {
        let violation = if cons.r4.is_some() {
            crate::error::Violation::MaxStops
        } else if cons.r3_active() {
            crate::error::Violation::MinActivity
        } else if cons.r2.is_some() {
            crate::error::Violation::RouteStretch
        } else {
            crate::error::Violation::Disconnected
        };
        return Err(Error::infeasible(violation));
    };
    let search_cost = engine.labels[terminal as usize].cost;
    let (stops, board, alight) = engine.compute_stops(terminal);
    let plan = StopPlan::build(ctx, stops, board, alight, cons.objective)?;
    plan.check(cons, ctx.direct)?;
    Ok(ExactOutcome {
        plan,
        search_cost,
        stats: engine.stats,
    })
}

/// Relaxes every successor of state `(u, mask)` at cost `cost` against the
/// tentative costs in `table`, writing back improvements. Returns the
/// improved states with their new costs. Unconstrained objective only.
pub fn relax_state(
    ctx: &OrisContext<'_>,
    cons: &Constraints,
    u: NodeId,
    mask: u32,
    cost: f64,
    table: &mut HashMap<(NodeId, u32), f64>,
) -> Vec<((NodeId, u32), f64)> {
    let engine = Engine::new_unsized(ctx, cons);
    let tern = (0..ctx.q())
        .map(|i| (mask >> (2 * i) & 1) + (mask >> (2 * i + 1) & 1))
        .zip(&engine.pow3)
        .map(|(t, p)| t * p)
        .sum();
    let lab = Label {
        node: u.0,
        mask,
        tern,
        aux: 0,
        cost,
        vehicle: 0.0,
        parent: NO_PARENT,
    };
    let mut out = Vec::new();
    engine.successors(&lab, 0, &mut out);
    let mut improved = Vec::new();
    for next in out {
        let key = (NodeId(next.node), next.mask);
        let cur = table.get(&key).copied().unwrap_or(f64::INFINITY);
        if next.cost < cur {
            table.insert(key, next.cost);
            improved.push((key, next.cost));
        }
    }
    improved
}

impl<'a, 'g> Engine<'a, 'g> {
    /// Engine without per-state tables.
    fn new_unsized(ctx: &'a OrisContext<'g>, cons: &'a Constraints) -> Self {
        let q = ctx.q();
        Engine {
            ctx,
            cons,
            aux: AuxCodec::new(cons),
            q,
            n_masks: 3u64.pow(q as u32),
            pow3: (0..q as u32).map(|i| 3u32.pow(i)).collect(),
            full: full_mask(q),
            route_limit: cons.route_limit(ctx.direct),
            pareto: cons.r2.is_some(),
            labels: Vec::new(),
            heap: BinaryHeap::new(),
            best: Vec::new(),
            settled: Vec::new(),
            front: HashMap::new(),
            reached: Vec::new(),
            stats: ExactStats::default(),
        }
    }
}
