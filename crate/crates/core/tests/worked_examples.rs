// SPDX-License-Identifier: Apache-2.0

//! Small hand-checked instances for each solver.

use std::collections::HashMap;

use roadstops::graph::Edge;
use roadstops::oes::{fast_end_stops, GroupSearch};
use roadstops::oris::exact::relax_state;
use roadstops::oris::{heur_stops, opt_stops, Constraints, HeuristicOptions, OrisContext, Stepper, Version};
use roadstops::{Graph, NodeId, Point, QuerySet};

fn line_coords(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::new(i as f64, 0.0)).collect()
}

// a b c d e f g
const A: u32 = 0;
const B: u32 = 1;
const C: u32 = 2;
const D: u32 = 3;
const E: u32 = 4;
const F: u32 = 5;
const G: u32 = 6;
const H: u32 = 7;

fn group_graph() -> Graph {
    let e = [
        (0, 1, 20.0),
        (0, 2, 5.0),
        (2, 5, 2.0),
        (1, 3, 1.0),
        (3, 5, 3.0),
        (5, 6, 3.0),
        (1, 2, 7.0),
        (2, 4, 4.0),
        (4, 5, 4.0),
    ];
    Graph::from_undirected(line_coords(7), &e).unwrap()
}

#[test]
fn group_search_first_step_and_final_state() {
    let g = group_graph();
    let mut s = GroupSearch::new(&g, &[NodeId(A), NodeId(B)]);
    assert_eq!(s.step(), Some(NodeId(A)));
    assert_eq!(s.reaching(NodeId(B)), vec![(0, 20.0), (1, 0.0)]);
    assert_eq!(s.key(NodeId(B)), 20.0);
    assert_eq!(s.reaching(NodeId(C)), vec![(0, 5.0)]);
    assert_eq!(s.key(NodeId(C)), 5.0);

    s.run();
    assert_eq!(s.reaching(NodeId(G)), vec![(0, 10.0), (1, 7.0)]);
    assert_eq!(s.key(NodeId(G)), 14.0);
    assert_eq!(s.parent(NodeId(G)), Some(NodeId(F)));
    // Both riders walk to f on their own.
    assert_eq!(s.key(NodeId(F)), 11.0);
    assert_eq!(s.parent(NodeId(F)), None);
    assert_eq!(s.walk_to_root(NodeId(G)).unwrap(), NodeId(F));
}

#[test]
fn group_search_end_stops_on_the_same_graph() {
    let g = group_graph();
    let qs = QuerySet::from_indices(&[(A as usize, G as usize), (B as usize, G as usize)]);
    for prune in [false, true] {
        let r = fast_end_stops(&g, &qs, prune).unwrap().result;
        assert_eq!(r.total_cost, 14.0);
    }
}

#[test]
fn exact_relaxation_step() {
    // s1 = 0, d1 = 1, a = 2, b = 3, c = 4.
    let e = [(0, 2, 3.0), (2, 1, 6.0), (2, 3, 5.0), (2, 4, 3.0)];
    let g = Graph::from_undirected(line_coords(5), &e).unwrap();
    let qs = QuerySet::from_indices(&[(0, 1)]);
    let ctx = OrisContext::new(&g, &qs, NodeId(2), NodeId(4)).unwrap();
    let (a, b, c) = (NodeId(2), NodeId(3), NodeId(4));
    let (s1, s1d1) = (0b01, 0b11);
    let mut table = HashMap::from([((b, s1), 17.0), ((c, s1), 20.0), ((a, s1d1), 23.0)]);
    relax_state(&ctx, &Constraints::none(), a, s1, 15.0, &mut table);
    assert_eq!(table[&(b, s1)], 17.0);
    assert_eq!(table[&(c, s1)], 18.0);
    assert_eq!(table[&(a, s1d1)], 21.0);
}

/// Two sources feed a route from a to e; every route node reaches the
/// common destination z for free.
fn greedy_trap() -> (Graph, QuerySet) {
    let (s1, s2, z) = (5u32, 6u32, 7u32);
    let mut edges = Vec::new();
    let mut add = |from: u32, to: u32, cost: f64| edges.push(Edge { from: NodeId(from), to: NodeId(to), cost });
    for (u, v, c) in [(A, B, 5.0), (A, C, 4.0), (B, D, 4.0), (C, D, 8.0), (D, E, 5.0)] {
        add(u, v, c);
    }
    for (v, c) in [(A, 9.0), (B, 3.0), (E, 4.0), (C, 11.0)] {
        add(s1, v, c);
    }
    for (v, c) in [(C, 2.0), (A, 10.0), (B, 8.0)] {
        add(s2, v, c);
    }
    for v in [A, B, C, D, E] {
        add(v, z, 0.0);
    }
    let g = Graph::from_edges(line_coords(8), &edges).unwrap();
    (g, QuerySet::from_indices(&[(5, 7), (6, 7)]))
}

#[test]
fn greedy_choice_misses_the_optimum() {
    let (g, qs) = greedy_trap();
    let cons = Constraints::none();
    let exact = opt_stops(&g, &qs, NodeId(A), NodeId(E), &cons, true).unwrap();
    assert_eq!(exact.plan.total_cost, 23.0);
    assert_eq!(exact.plan.route, [A, C, D, E].map(NodeId));
    for version in [Version::NoRevisit, Version::AllowRevisit] {
        let opts = HeuristicOptions { version, prune: false };
        let h = heur_stops(&g, &qs, NodeId(A), NodeId(E), &cons, opts).unwrap();
        assert_eq!(h.plan.total_cost, 25.0, "{version:?}");
        assert_eq!(h.plan.route, [A, B, D, E].map(NodeId));
    }
}

#[test]
fn greedy_trap_step_by_step() {
    let (g, qs) = greedy_trap();
    let ctx = OrisContext::new(&g, &qs, NodeId(A), NodeId(E)).unwrap();
    let cons = Constraints::none();
    let mut s = Stepper::new(&ctx, &cons);
    let n = NodeId;
    assert!(s.relax(n(A), n(C), 4.0));
    assert!(s.relax(n(C), n(D), 8.0));
    assert_eq!(s.key(n(D)), 21.0);
    assert_eq!(s.legs(n(D)), vec![(7.0, 0.0), (2.0, 0.0)]);
    assert!(s.relax(n(A), n(B), 5.0));
    assert!(s.relax(n(B), n(D), 4.0));
    assert_eq!(s.key(n(D)), 20.0);
    assert_eq!(s.legs(n(D)), vec![(3.0, 0.0), (8.0, 0.0)]);
    // The costlier path no longer wins at d.
    assert!(!s.relax(n(C), n(D), 8.0));
    assert!(s.relax(n(D), n(E), 5.0));
    assert_eq!(s.key(n(E)), 25.0);
    assert_eq!(s.vehicle(n(E)), 14.0);
    assert_eq!(s.route(n(E)), [A, B, D, E].map(NodeId));
}

fn heuristic_example() -> (Graph, QuerySet) {
    let e = [
        (0, 1, 1.0),
        (0, 2, 3.0),
        (1, 2, 4.0),
        (1, 3, 2.0),
        (2, 3, 5.0),
        (2, 4, 4.0),
        (3, 5, 4.0),
        (4, 5, 4.0),
        (5, 6, 3.0),
        (5, 7, 5.0),
        (6, 7, 1.0),
    ];
    let g = Graph::from_undirected(line_coords(8), &e).unwrap();
    (g, QuerySet::from_indices(&[(B as usize, F as usize), (C as usize, G as usize)]))
}

#[test]
fn heuristic_route_and_stops() {
    let (g, qs) = heuristic_example();
    let cons = Constraints::none();
    let h = heur_stops(&g, &qs, NodeId(A), NodeId(H), &cons, HeuristicOptions::default()).unwrap();
    let plan = &h.plan;
    assert_eq!(plan.route, [A, B, D, F, G, H].map(NodeId));
    assert_eq!(plan.stops, [A, B, F, G, H].map(NodeId));
    assert_eq!((plan.board.clone(), plan.alight.clone()), (vec![1, 0], vec![2, 3]));
    assert_eq!(plan.total_cost, 14.0);
    assert_eq!(h.search_cost, 14.0);

    let exact = opt_stops(&g, &qs, NodeId(A), NodeId(H), &cons, true).unwrap();
    assert_eq!(exact.plan.total_cost, 14.0);
}

#[test]
fn heuristic_ledger_after_first_relaxations() {
    // Start-stop entry: vehicle 0, legs (1, 7) and (3, 10), total 21.
    let (g, qs) = heuristic_example();
    let ctx = OrisContext::new(&g, &qs, NodeId(A), NodeId(H)).unwrap();
    let a = NodeId(A);
    assert_eq!(
        [ctx.solo.access(0, a), ctx.solo.egress(0, a), ctx.solo.access(1, a), ctx.solo.egress(1, a)],
        [1.0, 7.0, 3.0, 10.0]
    );
    let d = NodeId(D);
    assert_eq!(
        [ctx.solo.access(0, d), ctx.solo.egress(0, d), ctx.solo.access(1, d), ctx.solo.egress(1, d)],
        [2.0, 4.0, 5.0, 7.0]
    );
    let cons = Constraints::none();
    let mut s = Stepper::new(&ctx, &cons);
    assert_eq!(s.key(a), 21.0);
    assert!(s.relax(a, NodeId(B), 1.0));
    assert!(s.relax(a, NodeId(C), 3.0));
    assert_eq!(s.legs(NodeId(B)), vec![(0.0, 6.0), (3.0, 9.0)]);
    assert_eq!(s.key(NodeId(B)), 19.0);
    assert_eq!(s.legs(NodeId(C)), vec![(1.0, 7.0), (0.0, 11.0)]);
    assert_eq!(s.key(NodeId(C)), 22.0);
}
