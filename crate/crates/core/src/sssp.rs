// SPDX-License-Identifier: Apache-2.0

//! Dijkstra shortest paths and the per-rider solo cost tables built from them.

use crate::graph::{Graph, NodeId};
use crate::heap::IndexedHeap;
use crate::query::QuerySet;

/// Shortest-path tree from one source.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMap {
    pub source: NodeId,
    /// `f64::INFINITY` for unreachable nodes.
    pub cost: Vec<f64>,
    pub parent: Vec<Option<NodeId>>,
}

impl CostMap {
    pub fn get(&self, v: NodeId) -> f64 {
        self.cost[v.index()]
    }

    /// Nodes from the source to `v`, or `None` when `v` is unreachable.
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.cost[v.index()].is_finite() {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur.index()] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Reusable buffers for repeated Dijkstra runs on graphs of one size.
#[derive(Debug, Clone)]
pub struct Dijkstra {
    heap: IndexedHeap,
    dist: Vec<f64>,
    parent: Vec<Option<NodeId>>,
    touched: Vec<usize>,
    settled: u64,
}

impl Dijkstra {
    pub fn new(n: usize) -> Self {
        Dijkstra {
            heap: IndexedHeap::new(n),
            dist: vec![f64::INFINITY; n],
            parent: vec![None; n],
            touched: Vec::new(),
            settled: 0,
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.parent[v] = None;
        }
        self.touched.clear();
        self.heap.clear();
    }

    /// Runs from `source`; stops once `target` is settled if given.
    /// Returns the distance array, valid until the next run.
    pub fn run(&mut self, g: &Graph, source: NodeId, target: Option<NodeId>) -> &[f64] {
        self.reset();
        let s = source.index();
        self.dist[s] = 0.0;
        self.touched.push(s);
        self.heap.push_or_update(s, 0.0);
        while let Some((u, du)) = self.heap.pop() {
            self.settled += 1;
            if Some(NodeId::from(u)) == target {
                break;
            }
            let (heads, costs) = g.out(u);
            for (&h, &c) in heads.iter().zip(costs) {
                let v = h as usize;
                let nd = du + c;
                if nd < self.dist[v] {
                    if self.dist[v] == f64::INFINITY {
                        self.touched.push(v);
                    }
                    self.dist[v] = nd;
                    self.parent[v] = Some(NodeId::from(u));
                    self.heap.push_or_update(v, nd);
                }
            }
        }
        &self.dist
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    /// Total nodes settled over all runs.
    pub fn settled(&self) -> u64 {
        self.settled
    }
}

pub fn dijkstra(g: &Graph, source: NodeId) -> CostMap {
    let mut d = Dijkstra::new(g.node_count());
    let cost = d.run(g, source, None).to_vec();
    CostMap {
        source,
        cost,
        parent: d.parents().to_vec(),
    }
}

/// `SPC(s, t)`, infinite when unreachable.
pub fn spc(g: &Graph, s: NodeId, t: NodeId) -> f64 {
    let mut d = Dijkstra::new(g.node_count());
    d.run(g, s, Some(t))[t.index()]
}

/// For each target `t`, a map whose `cost[v]` is `SPC(v, t)` in `g`.
/// The searches run on the transpose, so parents point towards `t`.
pub fn spc_to_targets(g: &Graph, targets: &[NodeId]) -> Vec<CostMap> {
    let gt = g.transpose();
    targets.iter().map(|&t| dijkstra(&gt, t)).collect()
}

/// Solo legs of every rider: `access[i][v] = SPC(s_i, v)` and
/// `egress[i][v] = SPC(v, d_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoloCosts {
    pub access: Vec<Vec<f64>>,
    pub egress: Vec<Vec<f64>>,
}

impl SoloCosts {
    pub fn compute(g: &Graph, qs: &QuerySet) -> Self {
        Self::compute_with_transpose(g, &g.transpose(), qs)
    }

    pub fn compute_with_transpose(g: &Graph, gt: &Graph, qs: &QuerySet) -> Self {
        let mut d = Dijkstra::new(g.node_count());
        let access = qs.pairs.iter().map(|&(s, _)| d.run(g, s, None).to_vec()).collect();
        let egress = qs.pairs.iter().map(|&(_, t)| d.run(gt, t, None).to_vec()).collect();
        SoloCosts { access, egress }
    }

    pub fn q(&self) -> usize {
        self.access.len()
    }

    #[inline]
    pub fn access(&self, i: usize, v: NodeId) -> f64 {
        self.access[i][v.index()]
    }

    #[inline]
    pub fn egress(&self, i: usize, v: NodeId) -> f64 {
        self.egress[i][v.index()]
    }
}
