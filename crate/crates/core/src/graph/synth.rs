// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic graphs for tests and benchmarks.
//!
//! All generated costs are integers stored as `f64`, so path sums are exact
//! and solvers can be compared with `==`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Graph, NodeId, Point};

/// `rows x cols` lattice with unit spacing and 4-neighbour bidirectional
/// edges of equal cost. Node `(r, c)` has id `r * cols + c` and sits at `(c, r)`.
pub fn grid(rows: usize, cols: usize, cost: f64) -> Graph {
    let coords = (0..rows * cols)
        .map(|i| Point::new((i % cols) as f64, (i / cols) as f64))
        .collect();
    let mut pairs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                pairs.push((u, u + 1, cost));
            }
            if r + 1 < rows {
                pairs.push((u, u + cols, cost));
            }
        }
    }
    Graph::from_undirected(coords, &pairs).expect("grid is valid")
}

/// Jittered grid that behaves like a small city: every eighth row and column
/// is a fast arterial, side streets are slower by a random factor.
#[derive(Debug, Clone, Copy)]
pub struct RoadNetworkConfig {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

const SPACING: f64 = 100.0;
const JITTER: f64 = 25.0;
const ARTERIAL_EVERY: usize = 8;

impl RoadNetworkConfig {
    /// Roughly square network with at least `n` nodes.
    pub fn with_nodes(n: usize, seed: u64) -> Self {
        let side = (n as f64).sqrt().ceil().max(1.0) as usize;
        let rows = n.div_ceil(side).max(1);
        RoadNetworkConfig { rows, cols: side, seed }
    }
}

pub fn road_network(cfg: RoadNetworkConfig) -> Graph {
    let RoadNetworkConfig { rows, cols, seed } = cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Point> = (0..rows * cols)
        .map(|i| {
            let x = (i % cols) as f64 * SPACING + rng.gen_range(-JITTER..=JITTER);
            let y = (i / cols) as f64 * SPACING + rng.gen_range(-JITTER..=JITTER);
            Point::new(x, y)
        })
        .collect();
    let mut pairs = Vec::new();
    let mut link = |u: usize, v: usize, arterial: bool, rng: &mut ChaCha8Rng| {
        let factor = if arterial { 1.0 } else { rng.gen_range(1.4..2.2) };
        let cost = (coords[u].dist(coords[v]) * factor).round().max(1.0);
        pairs.push((u, v, cost));
    };
    for r in 0..rows {
        for c in 0..cols {
            let u = r * cols + c;
            if c + 1 < cols {
                link(u, u + 1, r % ARTERIAL_EVERY == 0, &mut rng);
            }
            if r + 1 < rows {
                link(u, u + cols, c % ARTERIAL_EVERY == 0, &mut rng);
            }
        }
    }
    Graph::from_undirected(coords, &pairs).expect("road network is valid")
}

/// Random planar-ish graph on `n` nodes scattered over a square.
///
/// Each node is tied to its nearest earlier node (so the graph is connected
/// when every edge is two-way) and to `extra` further near neighbours. With
/// `directed`, extra edges get one direction only half of the time and the two
/// directions of a two-way edge may differ in cost.
#[derive(Debug, Clone, Copy)]
pub struct RandomGraphConfig {
    pub n: usize,
    pub extra: usize,
    pub directed: bool,
    pub max_cost: u32,
    pub seed: u64,
}

pub fn random_graph(cfg: RandomGraphConfig) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let side = 1000.0;
    let coords: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect();
    let max_cost = cfg.max_cost.max(1);
    let mut edges = Vec::new();
    let mut push = |u: usize, v: usize, one_way: bool, rng: &mut ChaCha8Rng| {
        let mut cost = || {
            let base = coords[u].dist(coords[v]) / side * max_cost as f64;
            (base * rng.gen_range(1.0..1.5)).round().clamp(1.0, max_cost as f64 * 2.0)
        };
        let c1 = cost();
        let c2 = if cfg.directed { cost() } else { c1 };
        edges.push(Edge { from: NodeId::from(u), to: NodeId::from(v), cost: c1 });
        if !one_way {
            edges.push(Edge { from: NodeId::from(v), to: NodeId::from(u), cost: c2 });
        }
    };
    for v in 1..n {
        let nearest = (0..v)
            .min_by(|&a, &b| coords[v].dist(coords[a]).total_cmp(&coords[v].dist(coords[b])))
            .expect("v > 0");
        push(nearest, v, false, &mut rng);
    }
    if cfg.extra > 0 && n > 2 {
        for v in 0..n {
            let mut others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            others.sort_by(|&a, &b| {
                coords[v].dist(coords[a]).total_cmp(&coords[v].dist(coords[b])).then(a.cmp(&b))
            });
            let pool = &others[..others.len().min(cfg.extra * 2 + 1)];
            for &u in pool.choose_multiple(&mut rng, cfg.extra.min(pool.len())) {
                let one_way = cfg.directed && rng.gen_bool(0.5);
                let (a, b) = if rng.gen_bool(0.5) { (v, u) } else { (u, v) };
                push(a, b, one_way, &mut rng);
            }
        }
    }
    Graph::from_edges(coords, &edges).expect("random graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_edge_count() {
        let g = grid(10, 10, 1.0);
        assert_eq!(g.node_count(), 100);
        assert_eq!(g.edge_count(), 2 * (2 * 10 * 9));
    }

    #[test]
    fn road_network_is_deterministic_and_integral() {
        let cfg = RoadNetworkConfig { rows: 12, cols: 9, seed: 7 };
        let a = road_network(cfg);
        let b = road_network(cfg);
        assert_eq!(a, b);
        assert!(a.edges().all(|e| e.cost >= 1.0 && e.cost.fract() == 0.0));
        assert_eq!(a.edge_count(), 2 * (12 * 8 + 11 * 9));
    }

    #[test]
    fn with_nodes_covers_request() {
        for n in [1, 50, 99, 2000, 10_000] {
            let c = RoadNetworkConfig::with_nodes(n, 0);
            assert!(c.rows * c.cols >= n);
        }
    }

    #[test]
    fn random_graph_undirected_is_connected() {
        let g = random_graph(RandomGraphConfig { n: 60, extra: 2, directed: false, max_cost: 50, seed: 3 });
        assert!(g.reachable_from(NodeId(0)).iter().all(|&r| r));
    }
}
