// SPDX-License-Identifier: Apache-2.0

//! Directed road network in compressed adjacency form.
//!
//! Node ids are dense `0..n`. Every node carries planar coordinates, which the
//! instance generators and the elliptical reduction use; the solvers only see
//! edge costs.

mod ellipse;
mod io;
pub mod synth;

pub use ellipse::{reduce_ellipse, Ellipse, ReducedGraph};
pub use io::{load_graph, parse_graph, write_graph};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a node in a [`Graph`].
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    #[inline]
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub cost: f64,
}

/// Axis-aligned bounds of the node coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// Immutable directed graph with non-negative edge costs.
///
/// Outgoing edges of node `u` occupy `first_out[u]..first_out[u + 1]` in
/// `head`/`cost`, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    coords: Vec<Point>,
    first_out: Vec<usize>,
    head: Vec<u32>,
    cost: Vec<f64>,
}

impl Graph {
    /// Builds a graph from coordinates and directed edges.
    pub fn from_edges(coords: Vec<Point>, edges: &[Edge]) -> Result<Graph> {
        let n = coords.len();
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("{n} nodes exceed the id range")));
        }
        let mut degree = vec![0usize; n + 1];
        for e in edges {
            for id in [e.from, e.to] {
                if id.index() >= n {
                    return Err(Error::InvalidNode(id));
                }
            }
            if !(e.cost >= 0.0) || !e.cost.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "edge {}->{} has cost {}",
                    e.from, e.to, e.cost
                )));
            }
            degree[e.from.index() + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let first_out = degree;
        let mut fill = first_out.clone();
        let mut head = vec![0u32; edges.len()];
        let mut cost = vec![0f64; edges.len()];
        for e in edges {
            let slot = &mut fill[e.from.index()];
            head[*slot] = e.to.0;
            cost[*slot] = e.cost;
            *slot += 1;
        }
        Ok(Graph {
            coords,
            first_out,
            head,
            cost,
        })
    }

    /// Like [`Graph::from_edges`] but every pair becomes two directed edges.
    pub fn from_undirected(coords: Vec<Point>, pairs: &[(usize, usize, f64)]) -> Result<Graph> {
        let edges: Vec<Edge> = pairs
            .iter()
            .flat_map(|&(u, v, c)| {
                [
                    Edge { from: u.into(), to: v.into(), cost: c },
                    Edge { from: v.into(), to: u.into(), cost: c },
                ]
            })
            .collect();
        Graph::from_edges(coords, &edges)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.head.len()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::InvalidNode(v))
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    #[inline]
    pub fn coord(&self, v: NodeId) -> Point {
        self.coords[v.index()]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        let u = v.index();
        self.first_out[u + 1] - self.first_out[u]
    }

    /// Outgoing `(target, cost)` pairs of `v`.
    pub fn adjacent(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        let (heads, costs) = self.out(v.index());
        heads.iter().zip(costs).map(|(&h, &c)| (NodeId(h), c))
    }

    #[inline]
    pub(crate) fn out(&self, u: usize) -> (&[u32], &[f64]) {
        let r = self.first_out[u]..self.first_out[u + 1];
        (&self.head[r.clone()], &self.cost[r])
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            let (heads, costs) = self.out(u);
            heads.iter().zip(costs).map(move |(&h, &c)| Edge {
                from: NodeId::from(u),
                to: NodeId(h),
                cost: c,
            })
        })
    }

    pub fn total_cost(&self) -> f64 {
        self.cost.iter().sum()
    }

    /// Graph with every edge reversed; coordinates are shared unchanged.
    pub fn transpose(&self) -> Graph {
        let reversed: Vec<Edge> = self
            .edges()
            .map(|e| Edge {
                from: e.to,
                to: e.from,
                cost: e.cost,
            })
            .collect();
        Graph::from_edges(self.coords.clone(), &reversed)
            .expect("reversing a valid graph keeps it valid")
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.coords {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        if self.coords.is_empty() {
            min = Point::new(0.0, 0.0);
            max = min;
        }
        BoundingBox { min, max }
    }

    /// Nodes reachable from `source` following edge directions.
    pub fn reachable_from(&self, source: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![source.index()];
        seen[source.index()] = true;
        while let Some(u) = stack.pop() {
            for &h in self.out(u).0 {
                let h = h as usize;
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }
}
