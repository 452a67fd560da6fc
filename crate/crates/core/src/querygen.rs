// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic instances.
//!
//! End-stop instances draw sources from one square window and destinations
//! from another, the two windows centred on nodes a chosen fraction of the
//! graph's Euclidean diameter apart. Route instances pick `st` and `en` the
//! same way and draw every query node from the ellipse with those foci.
//!
//! "Area" always means the coordinate bounding box area. Randomness comes
//! from ChaCha8 seeded with the config's `seed`, so an instance is a pure
//! function of the graph and the config.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Ellipse;
use crate::graph::{Graph, NodeId, Point};
use crate::oris::{Constraints, Objective};
use crate::query::QuerySet;

/// Relative slack when matching a target distance.
pub const DISTANCE_TOLERANCE: f64 = 0.02;

/// Growth factor applied to a window with no nodes in it.
const INFLATE: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OesGenConfig {
    /// Window centre distance, % of the Euclidean diameter.
    pub cluster_distance_pct: f64,
    /// Area of each window, % of the bounding box area.
    pub cluster_area_pct: f64,
    pub q: usize,
    pub seed: u64,
}

impl Default for OesGenConfig {
    fn default() -> Self {
        OesGenConfig {
            cluster_distance_pct: 60.0,
            cluster_area_pct: 7.0,
            q: 30,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrisGenConfig {
    /// `st`–`en` distance, % of the Euclidean diameter.
    pub euclid_distance_pct: f64,
    /// Ellipse area, % of the bounding box area.
    pub query_space_pct: f64,
    pub q: usize,
    pub seed: u64,
    /// Longest solo leg, % of `SPC(st, en)`; `None` leaves legs unbounded.
    pub r1_pct: Option<f64>,
    /// Vehicle weight when the weighted objective is used.
    pub r5: f64,
}

impl Default for OrisGenConfig {
    fn default() -> Self {
        OrisGenConfig {
            euclid_distance_pct: 75.0,
            query_space_pct: 50.0,
            q: 30,
            seed: 0,
            r1_pct: None,
            r5: 0.5,
        }
    }
}

impl OrisGenConfig {
    /// R1 for an instance whose direct route costs `direct`; the objective
    /// is left unweighted.
    pub fn constraints(&self, direct: f64) -> Constraints {
        let mut c = Constraints::none();
        if let Some(p) = self.r1_pct {
            c = c.with_r1(p / 100.0 * direct);
        }
        c
    }

    pub fn weighted_objective(&self) -> Objective {
        Objective::Weighted { r5: self.r5 }
    }
}

/// Axis-aligned square window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Point,
    pub side: f64,
}

impl Window {
    pub fn contains(&self, p: Point) -> bool {
        let h = self.side / 2.0;
        (p.x - self.center.x).abs() <= h && (p.y - self.center.y).abs() <= h
    }
}

/// Provenance written next to a generated query file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub kind: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub diameter: f64,
    pub endpoints: (NodeId, NodeId),
    /// Endpoint distance as a % of the diameter.
    pub achieved_distance_pct: f64,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

impl InstanceMeta {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metadata serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OesInstance {
    pub queries: QuerySet,
    pub source_window: Window,
    pub destination_window: Window,
    pub meta: InstanceMeta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrisInstance {
    pub st: NodeId,
    pub en: NodeId,
    pub queries: QuerySet,
    pub ellipse: Ellipse,
    pub meta: InstanceMeta,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Indices of the convex hull of `pts`, counter-clockwise, without
/// collinear points.
pub fn convex_hull(pts: &[Point]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| pts[a].x.total_cmp(&pts[b].x).then(pts[a].y.total_cmp(&pts[b].y)));
    idx.dedup_by(|a, b| pts[*a] == pts[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Largest Euclidean distance between two points and the pair attaining it.
/// Rotating calipers over the convex hull.
pub fn euclidean_diameter(pts: &[Point]) -> (f64, usize, usize) {
    let hull = convex_hull(pts);
    match hull.len() {
        0 => (0.0, 0, 0),
        1 => (0.0, hull[0], hull[0]),
        2 => (pts[hull[0]].dist(pts[hull[1]]), hull[0], hull[1]),
        m => {
            let p = |k: usize| pts[hull[k % m]];
            let mut best = (0.0, hull[0], hull[0]);
            let mut j = 1;
            for i in 0..m {
                let (a, b) = (p(i), p(i + 1));
                while cross(a, b, p(j + 1)).abs() > cross(a, b, p(j)).abs() {
                    j = (j + 1) % m;
                }
                for (u, k) in [(i, j), (i + 1, j)] {
                    let d = p(u).dist(p(k));
                    if d > best.0 {
                        best = (d, hull[u % m], hull[k % m]);
                    }
                }
            }
            best
        }
    }
}

/// Node pair whose distance is within the tolerance of `target`, found by
/// sampling a first node and drawing the second from all matches. Falls
/// back to the closest distance seen.
fn endpoint_pair(g: &Graph, target: f64, rng: &mut ChaCha8Rng, warnings: &mut Vec<String>) -> (NodeId, NodeId) {
    let n = g.node_count();
    let coords = g.coords();
    let slack = DISTANCE_TOLERANCE * target;
    let attempts = 64.min(n).max(1) * 4;
    let mut closest: Option<(f64, usize, usize)> = None;
    let mut matches = Vec::new();
    for _ in 0..attempts {
        let a = rng.gen_range(0..n);
        matches.clear();
        for (b, &p) in coords.iter().enumerate() {
            let d = coords[a].dist(p);
            if b != a && (d - target).abs() <= slack {
                matches.push(b);
            }
            let gap = (d - target).abs();
            if b != a && closest.is_none_or(|(c, _, _)| gap < c) {
                closest = Some((gap, a, b));
            }
        }
        if let Some(&b) = matches.choose(rng) {
            return (NodeId::from(a), NodeId::from(b));
        }
    }
    let (gap, a, b) = closest.expect("graph has at least two nodes");
    warnings.push(format!(
        "no node pair within {:.0}% of the target distance; closest is off by {gap:.3}",
        DISTANCE_TOLERANCE * 100.0
    ));
    (NodeId::from(a), NodeId::from(b))
}

fn diameter_of(g: &Graph) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::Generation("need at least two nodes".into()));
    }
    let (ed, _, _) = euclidean_diameter(g.coords());
    if ed <= 0.0 {
        return Err(Error::Generation("all nodes share one coordinate".into()));
    }
    Ok(ed)
}

fn check_pct(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

fn members(g: &Graph, inside: impl Fn(Point) -> bool) -> Vec<NodeId> {
    g.nodes().filter(|&v| inside(g.coord(v))).collect()
}

/// Nodes in `w`, inflating it until at least one node falls inside.
fn window_members(g: &Graph, w: &mut Window, warnings: &mut Vec<String>) -> Vec<NodeId> {
    loop {
        let m = members(g, |p| w.contains(p));
        if !m.is_empty() {
            return m;
        }
        w.side = if w.side > 0.0 { w.side * INFLATE } else { 1.0 };
        warnings.push(format!("empty window inflated to side {}", w.side));
    }
}

pub fn gen_oes_instance(g: &Graph, cfg: &OesGenConfig) -> Result<OesInstance> {
    check_pct("cluster distance", cfg.cluster_distance_pct)?;
    check_pct("cluster area", cfg.cluster_area_pct)?;
    if cfg.q == 0 {
        return Err(Error::EmptyQuerySet);
    }
    let ed = diameter_of(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut warnings = Vec::new();
    let (a, b) = endpoint_pair(g, cfg.cluster_distance_pct / 100.0 * ed, &mut rng, &mut warnings);
    let side = (cfg.cluster_area_pct / 100.0 * g.bounding_box().area()).sqrt();
    let mut w1 = Window { center: g.coord(a), side };
    let mut w2 = Window { center: g.coord(b), side };
    let m1 = window_members(g, &mut w1, &mut warnings);
    let m2 = window_members(g, &mut w2, &mut warnings);
    let pairs = (0..cfg.q)
        .map(|_| (*m1.choose(&mut rng).unwrap(), *m2.choose(&mut rng).unwrap()))
        .collect();
    let meta = InstanceMeta {
        kind: "oes".into(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("config serializes"),
        diameter: ed,
        endpoints: (a, b),
        achieved_distance_pct: 100.0 * g.coord(a).dist(g.coord(b)) / ed,
        tolerance: DISTANCE_TOLERANCE,
        warnings,
    };
    Ok(OesInstance {
        queries: QuerySet::new(pairs),
        source_window: w1,
        destination_window: w2,
        meta,
    })
}

pub fn gen_oris_instance(g: &Graph, cfg: &OrisGenConfig) -> Result<OrisInstance> {
    check_pct("euclidean distance", cfg.euclid_distance_pct)?;
    check_pct("query space", cfg.query_space_pct)?;
    // q = 0 is allowed: a route with no riders is the direct route.
    let ed = diameter_of(g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut warnings = Vec::new();
    let (st, en) = endpoint_pair(g, cfg.euclid_distance_pct / 100.0 * ed, &mut rng, &mut warnings);
    let (f1, f2) = (g.coord(st), g.coord(en));
    let ellipse = Ellipse::with_area(f1, f2, cfg.query_space_pct / 100.0 * g.bounding_box().area());
    // The foci lie inside any ellipse built on them, so this is never empty.
    let inside = members(g, |p| ellipse.contains(p));
    let pairs = (0..cfg.q)
        .map(|_| (*inside.choose(&mut rng).unwrap(), *inside.choose(&mut rng).unwrap()))
        .collect();
    let meta = InstanceMeta {
        kind: "oris".into(),
        seed: cfg.seed,
        config: serde_json::to_value(cfg).expect("config serializes"),
        diameter: ed,
        endpoints: (st, en),
        achieved_distance_pct: 100.0 * f1.dist(f2) / ed,
        tolerance: DISTANCE_TOLERANCE,
        warnings,
    };
    Ok(OrisInstance {
        st,
        en,
        queries: QuerySet::new(pairs),
        ellipse,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::synth::grid;

    fn brute_diameter(pts: &[Point]) -> f64 {
        let mut best: f64 = 0.0;
        for a in pts {
            for b in pts {
                best = best.max(a.dist(*b));
            }
        }
        best
    }

    #[test]
    fn diameter_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 5, 20, 200] {
            let pts: Vec<Point> = (0..n)
                .map(|_| Point::new(rng.gen_range(-50..50) as f64, rng.gen_range(-50..50) as f64))
                .collect();
            let (d, a, b) = euclidean_diameter(&pts);
            assert_eq!(d, brute_diameter(&pts), "n = {n}");
            assert_eq!(pts[a].dist(pts[b]), d);
        }
    }

    #[test]
    fn diameter_of_collinear_points() {
        let pts: Vec<Point> = (0..6).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(euclidean_diameter(&pts).0, pts[0].dist(pts[5]));
    }

    #[test]
    fn oes_defaults() {
        let c = OesGenConfig::default();
        assert_eq!((c.cluster_distance_pct, c.cluster_area_pct, c.q), (60.0, 7.0, 30));
        let c = OrisGenConfig::default();
        assert_eq!((c.euclid_distance_pct, c.query_space_pct, c.q, c.r1_pct, c.r5), (75.0, 50.0, 30, None, 0.5));
    }

    #[test]
    fn oes_nodes_fall_in_their_windows() {
        let g = grid(10, 10, 1.0);
        let cfg = OesGenConfig {
            cluster_distance_pct: 50.0,
            cluster_area_pct: 10.0,
            q: 5,
            seed: 11,
        };
        let inst = gen_oes_instance(&g, &cfg).unwrap();
        assert_eq!(inst.queries.len(), 5);
        for &(s, d) in &inst.queries.pairs {
            assert!(inst.source_window.contains(g.coord(s)));
            assert!(inst.destination_window.contains(g.coord(d)));
        }
        assert!((inst.meta.achieved_distance_pct - 50.0).abs() <= 50.0 * DISTANCE_TOLERANCE + 1e-9);
    }

    #[test]
    fn full_area_windows_cover_everything() {
        let g = grid(6, 6, 1.0);
        let cfg = OesGenConfig {
            cluster_area_pct: 400.0,
            ..Default::default()
        };
        let inst = gen_oes_instance(&g, &cfg).unwrap();
        assert!(g.nodes().all(|v| inst.source_window.contains(g.coord(v))));
    }

    #[test]
    fn oris_is_deterministic_and_inside_ellipse() {
        let g = grid(12, 12, 1.0);
        let cfg = OrisGenConfig {
            q: 8,
            seed: 3,
            ..Default::default()
        };
        let a = gen_oris_instance(&g, &cfg).unwrap();
        let b = gen_oris_instance(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.queries.to_text(), b.queries.to_text());
        for &(s, d) in &a.queries.pairs {
            assert!(a.ellipse.contains(g.coord(s)) && a.ellipse.contains(g.coord(d)));
        }
        let other = gen_oris_instance(&g, &OrisGenConfig { seed: 4, ..cfg }).unwrap();
        assert_ne!(a.queries, other.queries);
    }

    #[test]
    fn degenerate_graphs_are_rejected() {
        let g = Graph::from_edges(vec![Point::new(1.0, 1.0); 3], &[]).unwrap();
        assert!(matches!(gen_oes_instance(&g, &OesGenConfig::default()), Err(Error::Generation(_))));
        let g = grid(3, 3, 1.0);
        let bad = OesGenConfig { q: 0, ..Default::default() };
        assert!(matches!(gen_oes_instance(&g, &bad), Err(Error::EmptyQuerySet)));
    }
}
