// SPDX-License-Identifier: Apache-2.0

//! Optimal end stops for clustered trip queries.
//!
//! The vehicle picks everyone up at `st` and drops everyone at `en`. The
//! cost of a pair is `SPC(st, en) + sum_i SPC(s_i, st) + SPC(en, d_i)`.
//!
//! [`baseline_end_stops`] tries every pair. [`fast_end_stops`] runs one
//! simultaneous search from all sources on the graph and one from all
//! destinations on its transpose, then meets in the middle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::graph::{Graph, NodeId};
use crate::heap::IndexedHeap;
use crate::query::QuerySet;
use crate::sssp::Dijkstra;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndStopsResult {
    pub st: NodeId,
    pub en: NodeId,
    pub total_cost: f64,
    /// `SPC(st, en)`.
    pub vehicle_cost: f64,
    /// `SPC(s_i, st)` per query.
    pub access_costs: Vec<f64>,
    /// `SPC(en, d_i)` per query.
    pub egress_costs: Vec<f64>,
}

impl EndStopsResult {
    /// Evaluates the pair from scratch.
    pub fn evaluate(g: &Graph, gt: &Graph, qs: &QuerySet, st: NodeId, en: NodeId) -> EndStopsResult {
        let mut d = Dijkstra::new(g.node_count());
        let access_costs: Vec<f64> = {
            let to_st = d.run(gt, st, None);
            qs.pairs.iter().map(|p| to_st[p.0.index()]).collect()
        };
        let egress_costs: Vec<f64> = {
            let from_en = d.run(g, en, None);
            qs.pairs.iter().map(|p| from_en[p.1.index()]).collect()
        };
        let vehicle_cost = d.run(g, st, Some(en))[en.index()];
        let total_cost = vehicle_cost + access_costs.iter().sum::<f64>() + egress_costs.iter().sum::<f64>();
        EndStopsResult {
            st,
            en,
            total_cost,
            vehicle_cost,
            access_costs,
            egress_costs,
        }
    }
}

/// Work counters of one end-stops run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OesStats {
    pub extractions: u64,
    pub relaxations: u64,
    pub peak_frontier: u64,
    /// Most times any single node was extracted by one search. Every
    /// out-edge of a node is relaxed once per extraction.
    pub max_node_extractions: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OesOutcome {
    pub result: EndStopsResult,
    pub stats: OesStats,
}

fn check_queries(g: &Graph, qs: &QuerySet) -> Result<()> {
    if qs.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    qs.validate(g)
}

/// Tries every `(st, en)` pair. Ties go to the smaller `st`, then `en`.
pub fn baseline_end_stops(g: &Graph, qs: &QuerySet) -> Result<OesOutcome> {
    check_queries(g, qs)?;
    let n = g.node_count();
    let gt = g.transpose();
    let mut dij = Dijkstra::new(n);
    let mut s_sum = vec![0.0; n];
    let mut d_sum = vec![0.0; n];
    for &(s, d) in &qs.pairs {
        for (acc, x) in s_sum.iter_mut().zip(dij.run(g, s, None)) {
            *acc += x;
        }
        for (acc, x) in d_sum.iter_mut().zip(dij.run(&gt, d, None)) {
            *acc += x;
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for u in 0..n {
        if !s_sum[u].is_finite() {
            continue;
        }
        let row = dij.run(g, NodeId::from(u), None);
        for v in 0..n {
            let c = row[v] + s_sum[u] + d_sum[v];
            if c.is_finite() && best.is_none_or(|b| c < b.0) {
                best = Some((c, u, v));
            }
        }
    }
    let (_, st, en) = best.ok_or(Error::infeasible(Violation::Disconnected))?;
    let stats = OesStats {
        extractions: dij.settled(),
        relaxations: 0,
        peak_frontier: 0,
        max_node_extractions: 0,
    };
    Ok(OesOutcome {
        result: EndStopsResult::evaluate(g, &gt, qs, st.into(), en.into()),
        stats,
    })
}

/// Simultaneous search from a group of sources.
///
/// Every node `v` keeps the cost of each query that has reached it so far
/// (`reaching`) plus a key. The key is the smaller of the summed reaching
/// costs and, once every query has reached a predecessor `u`, `key(u) + w(u,
/// v)` with `u` recorded as parent. A parent of `None` marks the point where
/// the riders meet the vehicle. Nodes re-enter the frontier whenever their
/// reaching costs or key change, so the search is label-correcting.
#[derive(Debug, Clone)]
pub struct GroupSearch<'g> {
    g: &'g Graph,
    q: usize,
    key: Vec<f64>,
    parent: Vec<Option<NodeId>>,
    /// `reach[v * q + i]`, infinite when query `i` has not reached `v`.
    reach: Vec<f64>,
    count: Vec<u32>,
    /// Reaching costs not yet passed on to neighbours, same layout as `reach`.
    pending: Vec<bool>,
    frontier: IndexedHeap,
    extracted: Vec<u32>,
    pub stats: OesStats,
}

impl<'g> GroupSearch<'g> {
    pub fn new(g: &'g Graph, sources: &[NodeId]) -> Self {
        let n = g.node_count();
        let q = sources.len();
        let mut s = GroupSearch {
            g,
            q,
            key: vec![f64::INFINITY; n],
            parent: vec![None; n],
            reach: vec![f64::INFINITY; n * q],
            count: vec![0; n],
            pending: vec![false; n * q],
            frontier: IndexedHeap::new(n),
            extracted: vec![0; n],
            stats: OesStats::default(),
        };
        for (i, &src) in sources.iter().enumerate() {
            let v = src.index();
            if s.reach[v * q + i].is_infinite() {
                s.reach[v * q + i] = 0.0;
                s.pending[v * q + i] = true;
                s.count[v] += 1;
            }
            s.key[v] = 0.0;
            s.frontier.push_or_update(v, 0.0);
        }
        s.stats.peak_frontier = s.frontier.len() as u64;
        s
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn key(&self, v: NodeId) -> f64 {
        self.key[v.index()]
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    /// `(query, cost)` pairs that have reached `v`, by query index.
    pub fn reaching(&self, v: NodeId) -> Vec<(usize, f64)> {
        let row = &self.reach[v.index() * self.q..(v.index() + 1) * self.q];
        row.iter()
            .enumerate()
            .filter(|(_, c)| c.is_finite())
            .map(|(i, &c)| (i, c))
            .collect()
    }

    /// Reaching cost of query `i` at `v`.
    pub fn reach_cost(&self, v: NodeId, i: usize) -> f64 {
        self.reach[v.index() * self.q + i]
    }

    /// All queries have reached `v`.
    pub fn is_complete(&self, v: NodeId) -> bool {
        self.count[v.index()] as usize == self.q
    }

    pub fn in_frontier(&self, v: NodeId) -> bool {
        self.frontier.contains(v.index())
    }

    /// Smallest key still queued.
    pub fn peek_key(&self) -> Option<f64> {
        self.frontier.peek().map(|(_, k)| k)
    }

    pub fn extraction_count(&self, v: NodeId) -> u32 {
        self.extracted[v.index()]
    }

    /// Offers every query that reached `u` to `v` over an edge of cost `c`
    /// and updates the key and parent of `v`. Returns whether anything at
    /// `v` changed in a way that needs `v` (re)queued.
    pub fn merge(&mut self, u: NodeId, v: NodeId, c: f64) -> bool {
        let q = self.q;
        let (u, v) = (u.index(), v.index());
        let prev_count = self.count[v];
        let mut updated = false;
        for i in 0..q {
            let l = self.reach[u * q + i];
            if l.is_infinite() {
                continue;
            }
            let slot = &mut self.reach[v * q + i];
            if l + c < *slot {
                if slot.is_infinite() {
                    self.count[v] += 1;
                }
                *slot = l + c;
                self.pending[v * q + i] = true;
                updated = true;
            }
        }
        if updated {
            let sum: f64 = self.reach[v * q..(v + 1) * q].iter().filter(|c| c.is_finite()).sum();
            if self.count[v] > prev_count || sum < self.key[v] {
                self.key[v] = sum;
                self.parent[v] = None;
            }
        }
        if self.count[u] as usize == q && self.key[u] + c < self.key[v] {
            self.key[v] = self.key[u] + c;
            self.parent[v] = Some(NodeId::from(u));
            updated = true;
        }
        updated
    }

    /// Extracts the minimum-key node and relaxes its out-edges.
    pub fn step(&mut self) -> Option<NodeId> {
        let (u, _) = self.frontier.pop()?;
        self.pending[u * self.q..(u + 1) * self.q].fill(false);
        self.stats.extractions += 1;
        self.extracted[u] += 1;
        self.stats.max_node_extractions = self.stats.max_node_extractions.max(self.extracted[u] as u64);
        let g = self.g;
        let (heads, costs) = g.out(u);
        for (&h, &c) in heads.iter().zip(costs) {
            self.stats.relaxations += 1;
            let v = NodeId(h);
            if self.merge(NodeId::from(u), v, c) {
                self.frontier.push_or_update(v.index(), self.key[v.index()]);
            }
        }
        self.stats.peak_frontier = self.stats.peak_frontier.max(self.frontier.len() as u64);
        Some(NodeId::from(u))
    }

    /// Lower bound on every key this search can still assign, including
    /// keys of nodes already extracted. Infinite once the frontier is empty.
    ///
    /// The smallest queued key alone is not enough: a node's summed reaching
    /// costs can drop below its predecessor's key when a late query arrives.
    /// No future reaching cost of query `i` can be below `r_i`, the least
    /// cost of `i` still waiting to be passed on. So the sum at a node can
    /// only change when some query there costs more than its `r_i`, and it
    /// cannot fall below `Σ_k min(reach_k, r_k)`.
    pub fn lower_bound(&self) -> f64 {
        let q = self.q;
        let Some(peek) = self.peek_key() else {
            return f64::INFINITY;
        };
        let mut r = vec![f64::INFINITY; q];
        for (j, (&c, &p)) in self.reach.iter().zip(&self.pending).enumerate() {
            if p && c < r[j % q] {
                r[j % q] = c;
            }
        }
        let mut bound = peek;
        for row in self.reach.chunks_exact(q.max(1)).take(self.key.len()) {
            if !row.iter().zip(&r).any(|(&c, &rk)| c > rk) {
                continue;
            }
            let sum: f64 = row.iter().zip(&r).map(|(&c, &rk)| c.min(rk)).sum();
            bound = bound.min(sum);
        }
        bound
    }

    pub fn run(&mut self) {
        while self.step().is_some() {}
    }

    /// Follows parents from `v` to the node where the vehicle starts.
    pub fn walk_to_root(&self, v: NodeId) -> Result<NodeId> {
        let mut cur = v;
        for _ in 0..=self.g.node_count() {
            match self.parent[cur.index()] {
                Some(p) => cur = p,
                None => return Ok(cur),
            }
        }
        Err(Error::InvalidArgument(format!("parent chain from {v} does not terminate")))
    }
}

/// Runs the two group searches and recovers `(st, en)` from the meeting node.
///
/// With `prune`, the searches take turns and share the best meeting cost
/// found at extraction time; each one stops once its smallest queued key
/// reaches that bound and [`GroupSearch::lower_bound`] confirms that no
/// later key can fall below it. The confirming scan is repeated at most
/// every `n / 4` extractions.
pub fn fast_end_stops(g: &Graph, qs: &QuerySet, prune: bool) -> Result<OesOutcome> {
    let gt = g.transpose();
    fast_end_stops_with_transpose(g, &gt, qs, prune)
}

pub fn fast_end_stops_with_transpose(g: &Graph, gt: &Graph, qs: &QuerySet, prune: bool) -> Result<OesOutcome> {
    check_queries(g, qs)?;
    let mut fwd = GroupSearch::new(g, &qs.sources());
    let mut bwd = GroupSearch::new(gt, &qs.destinations());
    let mut best: Option<(f64, NodeId)> = None;

    if prune {
        let meet = |u: NodeId, a: &GroupSearch, b: &GroupSearch, best: &mut Option<(f64, NodeId)>| {
            if a.is_complete(u) && b.is_complete(u) {
                let c = a.key(u) + b.key(u);
                if best.is_none_or(|(bc, bm)| c < bc || (c == bc && u < bm)) {
                    *best = Some((c, u));
                }
            }
        };
        let bound = |best: &Option<(f64, NodeId)>| best.map_or(f64::INFINITY, |b| b.0);
        let interval = (g.node_count() as u64 / 4).max(1);
        // Extraction count at which each side may rescan.
        let mut next_check = [0u64; 2];
        let mut live = [true, true];
        while live[0] || live[1] {
            for side in 0..2 {
                if !live[side] {
                    continue;
                }
                let (this, other) = if side == 0 { (&mut fwd, &bwd) } else { (&mut bwd, &fwd) };
                let b = bound(&best);
                live[side] = match this.peek_key() {
                    None => false,
                    Some(k) if k < b => true,
                    Some(_) if this.stats.extractions < next_check[side] => true,
                    Some(_) => {
                        next_check[side] = this.stats.extractions + interval;
                        this.lower_bound() < b
                    }
                };
                if live[side] {
                    let u = this.step().expect("frontier not empty");
                    meet(u, this, other, &mut best);
                }
            }
        }
    } else {
        fwd.run();
        bwd.run();
        for v in g.nodes() {
            if fwd.is_complete(v) && bwd.is_complete(v) {
                let c = fwd.key(v) + bwd.key(v);
                if best.is_none_or(|b| c < b.0) {
                    best = Some((c, v));
                }
            }
        }
    }

    let (_, mid) = best.ok_or(Error::infeasible(Violation::Disconnected))?;
    let st = fwd.walk_to_root(mid)?;
    let en = bwd.walk_to_root(mid)?;
    let stats = OesStats {
        extractions: fwd.stats.extractions + bwd.stats.extractions,
        relaxations: fwd.stats.relaxations + bwd.stats.relaxations,
        peak_frontier: fwd.stats.peak_frontier + bwd.stats.peak_frontier,
        max_node_extractions: fwd.stats.max_node_extractions.max(bwd.stats.max_node_extractions),
    };
    Ok(OesOutcome {
        result: EndStopsResult::evaluate(g, gt, qs, st, en),
        stats,
    })
}
