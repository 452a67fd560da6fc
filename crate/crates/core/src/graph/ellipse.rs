// SPDX-License-Identifier: Apache-2.0

//! Elliptical working sub-graph around a pair of focal nodes.

use super::{Edge, Graph, NodeId, Point};
use crate::error::{Error, Result};

/// Ellipse given by its foci and semi-major axis `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub f1: Point,
    pub f2: Point,
    pub a: f64,
}

impl Ellipse {
    /// Ellipse with the given foci whose area is `area`.
    ///
    /// With `c` the half focal distance, `pi*a*b = area` and `b^2 = a^2 - c^2`
    /// give `a^2 = (c^2 + sqrt(c^4 + 4 (area/pi)^2)) / 2`. A zero area yields
    /// the degenerate ellipse `a = c`, the focal segment itself.
    pub fn with_area(f1: Point, f2: Point, area: f64) -> Ellipse {
        let c = f1.dist(f2) / 2.0;
        let k = area.max(0.0) / std::f64::consts::PI;
        let c2 = c * c;
        let a2 = (c2 + (c2 * c2 + 4.0 * k * k).sqrt()) / 2.0;
        Ellipse { f1, f2, a: a2.sqrt().max(c) }
    }

    pub fn c(&self) -> f64 {
        self.f1.dist(self.f2) / 2.0
    }

    pub fn b(&self) -> f64 {
        let c = self.c();
        (self.a * self.a - c * c).max(0.0).sqrt()
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.a * self.b()
    }

    pub fn contains(&self, p: Point) -> bool {
        let lhs = p.dist(self.f1) + p.dist(self.f2);
        lhs <= 2.0 * self.a * (1.0 + 1e-12)
    }
}

/// Induced sub-graph returned by [`reduce_ellipse`].
#[derive(Debug, Clone)]
pub struct ReducedGraph {
    pub graph: Graph,
    /// `original_ids[new] = old`.
    pub original_ids: Vec<NodeId>,
    /// Old id to new id, `None` when the node was dropped.
    pub new_ids: Vec<Option<NodeId>>,
    pub f1: NodeId,
    pub f2: NodeId,
    /// False when `f2` is unreachable from `f1` inside the sub-graph.
    pub foci_connected: bool,
}

impl ReducedGraph {
    pub fn to_original(&self, v: NodeId) -> NodeId {
        self.original_ids[v.index()]
    }

    pub fn to_reduced(&self, old: NodeId) -> Option<NodeId> {
        self.new_ids.get(old.index()).copied().flatten()
    }
}

/// Keeps the nodes inside the ellipse with foci at `f1`, `f2` covering
/// `area_fraction` of the bounding-box area. The foci are always kept.
/// Fractions `>= 1` keep every node, since the area formula alone does not
/// reach the bounding-box corners.
pub fn reduce_ellipse(g: &Graph, f1: NodeId, f2: NodeId, area_fraction: f64) -> Result<ReducedGraph> {
    g.check_node(f1)?;
    g.check_node(f2)?;
    if !(area_fraction > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "area fraction must be positive, got {area_fraction}"
        )));
    }
    let keep: Vec<bool> = if area_fraction >= 1.0 {
        vec![true; g.node_count()]
    } else {
        let e = Ellipse::with_area(g.coord(f1), g.coord(f2), area_fraction * g.bounding_box().area());
        g.nodes()
            .map(|v| v == f1 || v == f2 || e.contains(g.coord(v)))
            .collect()
    };
    Ok(induced(g, &keep, f1, f2))
}

fn induced(g: &Graph, keep: &[bool], f1: NodeId, f2: NodeId) -> ReducedGraph {
    let mut new_ids = vec![None; g.node_count()];
    let mut original_ids = Vec::new();
    let mut coords = Vec::new();
    for v in g.nodes() {
        if keep[v.index()] {
            new_ids[v.index()] = Some(NodeId::from(original_ids.len()));
            original_ids.push(v);
            coords.push(g.coord(v));
        }
    }
    let edges: Vec<Edge> = g
        .edges()
        .filter_map(|e| {
            Some(Edge {
                from: new_ids[e.from.index()]?,
                to: new_ids[e.to.index()]?,
                cost: e.cost,
            })
        })
        .collect();
    let graph = Graph::from_edges(coords, &edges).expect("sub-graph of a valid graph");
    let nf1 = new_ids[f1.index()].expect("focus kept");
    let nf2 = new_ids[f2.index()].expect("focus kept");
    let foci_connected = graph.reachable_from(nf1)[nf2.index()];
    ReducedGraph {
        graph,
        original_ids,
        new_ids,
        f1: nf1,
        f2: nf2,
        foci_connected,
    }
}
