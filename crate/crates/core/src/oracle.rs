// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference answers for testing.
//!
//! Nothing here calls the production shortest-path or search code: distances
//! come from a private FIFO Bellman-Ford or Floyd-Warshall over adjacency
//! lists built directly from the edge list.

use std::collections::VecDeque;

use crate::error::{Error, Result, Violation};
use crate::graph::{Graph, NodeId};
use crate::oes::EndStopsResult;
use crate::oris::Constraints;
use crate::query::QuerySet;

type Adj = Vec<Vec<(usize, f64)>>;

fn adjacency(g: &Graph, reverse: bool) -> Adj {
    let mut adj = vec![Vec::new(); g.node_count()];
    for e in g.edges() {
        let (a, b) = if reverse { (e.to, e.from) } else { (e.from, e.to) };
        adj[a.index()].push((b.index(), e.cost));
    }
    adj
}

/// FIFO label-correcting shortest paths.
fn bellman_ford(adj: &Adj, src: usize) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    dist[src] = 0.0;
    queue.push_back(src);
    queued[src] = true;
    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        for &(v, c) in &adj[u] {
            let nd = dist[u] + c;
            if nd < dist[v] {
                dist[v] = nd;
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    dist
}

fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in g.edges() {
        let cell = &mut d[e.from.index()][e.to.index()];
        *cell = cell.min(e.cost);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Single-source distances by Bellman-Ford; exposed for cross-checks.
pub fn bellman_ford_costs(g: &Graph, source: NodeId) -> Vec<f64> {
    bellman_ford(&adjacency(g, false), source.index())
}

/// End stops by trying every `(st, en)` pair. Ties go to the smaller `st`,
/// then the smaller `en`.
pub fn oes_oracle(g: &Graph, qs: &QuerySet) -> Result<EndStopsResult> {
    if qs.is_empty() {
        return Err(Error::EmptyQuerySet);
    }
    qs.validate(g)?;
    let n = g.node_count();
    let fwd = adjacency(g, false);
    let rev = adjacency(g, true);
    let from_s: Vec<Vec<f64>> = qs.pairs.iter().map(|p| bellman_ford(&fwd, p.0.index())).collect();
    let to_d: Vec<Vec<f64>> = qs.pairs.iter().map(|p| bellman_ford(&rev, p.1.index())).collect();
    let s_sum: Vec<f64> = (0..n).map(|u| from_s.iter().map(|m| m[u]).sum()).collect();
    let d_sum: Vec<f64> = (0..n).map(|v| to_d.iter().map(|m| m[v]).sum()).collect();

    let mut best: Option<(f64, usize, usize, f64)> = None;
    for u in 0..n {
        if !s_sum[u].is_finite() {
            continue;
        }
        let row = bellman_ford(&fwd, u);
        for v in 0..n {
            let c = row[v] + s_sum[u] + d_sum[v];
            if c.is_finite() && best.is_none_or(|b| c < b.0) {
                best = Some((c, u, v, row[v]));
            }
        }
    }
    let (total, st, en, vehicle) = best.ok_or(Error::infeasible(Violation::Disconnected))?;
    Ok(EndStopsResult {
        st: st.into(),
        en: en.into(),
        total_cost: total,
        vehicle_cost: vehicle,
        access_costs: from_s.iter().map(|m| m[st]).collect(),
        egress_costs: to_d.iter().map(|m| m[en]).collect(),
    })
}

/// Optimal route-and-stops cost by listing every stop sequence of length
/// `2..=max_stops` from `st` to `en` and every boarding/alighting choice.
/// `None` when no plan meets the constraints. Meant for about a dozen nodes
/// and at most two riders.
pub fn oris_oracle_exhaustive(
    g: &Graph,
    qs: &QuerySet,
    st: NodeId,
    en: NodeId,
    max_stops: usize,
    cons: &Constraints,
) -> Option<f64> {
    let n = g.node_count();
    let d = floyd_warshall(g);
    let (st, en) = (st.index(), en.index());
    let max_len = cons.r4.map_or(max_stops, |r4| r4.min(max_stops)).max(2);
    let limit = cons.route_limit(d[st][en]);
    // Raw solo legs; `None` marks a leg that is unusable.
    let leg = |x: f64| cons.leg_ok(x).then_some(x);
    let access: Vec<Vec<Option<f64>>> = qs
        .pairs
        .iter()
        .map(|p| (0..n).map(|v| leg(d[p.0.index()][v])).collect())
        .collect();
    let egress: Vec<Vec<Option<f64>>> = qs
        .pairs
        .iter()
        .map(|p| (0..n).map(|v| leg(d[v][p.1.index()])).collect())
        .collect();

    let mut best: Option<f64> = None;
    let mut visit = |seq: &[usize]| {
        let vehicle: f64 = seq.windows(2).map(|w| d[w[0]][w[1]]).sum();
        if !(vehicle.is_finite() && vehicle <= limit) {
            return;
        }
        let solo = if cons.r3 > 0 {
            joint_assignment(seq, &access, &egress, cons.r3 as usize)
        } else {
            independent_assignment(seq, &access, &egress)
        };
        if let Some(solo) = solo {
            let c = cons.objective.combine(vehicle, solo);
            if best.is_none_or(|b| c < b) {
                best = Some(c);
            }
        }
    };
    for len in 2..=max_len {
        sequences(&mut vec![st], len - 2, n, en, &mut visit);
    }
    best
}

/// Calls `f` on `prefix + [any node; middle] + [last]` for every choice.
fn sequences(prefix: &mut Vec<usize>, middle: usize, n: usize, last: usize, f: &mut impl FnMut(&[usize])) {
    if middle == 0 {
        prefix.push(last);
        f(prefix);
        prefix.pop();
        return;
    }
    for v in 0..n {
        prefix.push(v);
        sequences(prefix, middle - 1, n, last, f);
        prefix.pop();
    }
}

/// Each rider independently picks the cheapest board/alight pair.
fn independent_assignment(seq: &[usize], access: &[Vec<Option<f64>>], egress: &[Vec<Option<f64>>]) -> Option<f64> {
    let mut total = 0.0;
    for (acc, egr) in access.iter().zip(egress) {
        let mut best: Option<f64> = None;
        for k in 0..seq.len() {
            for j in 0..=k {
                if let (Some(a), Some(e)) = (acc[seq[j]], egr[seq[k]]) {
                    let c = a + e;
                    if best.is_none_or(|b| c < b) {
                        best = Some(c);
                    }
                }
            }
        }
        total += best?;
    }
    Some(total)
}

/// Riders choose jointly so that every intermediate stop sees at least `r3`
/// boardings plus alightings.
fn joint_assignment(
    seq: &[usize],
    access: &[Vec<Option<f64>>],
    egress: &[Vec<Option<f64>>],
    r3: usize,
) -> Option<f64> {
    let len = seq.len();
    let options: Vec<Vec<(usize, usize, f64)>> = access
        .iter()
        .zip(egress)
        .map(|(acc, egr)| {
            let mut o = Vec::new();
            for j in 0..len {
                for k in j..len {
                    if let (Some(a), Some(e)) = (acc[seq[j]], egr[seq[k]]) {
                        o.push((j, k, a + e));
                    }
                }
            }
            o
        })
        .collect();
    let mut events = vec![0usize; len];
    let mut best = None;
    fn rec(
        i: usize,
        options: &[Vec<(usize, usize, f64)>],
        events: &mut Vec<usize>,
        acc: f64,
        r3: usize,
        best: &mut Option<f64>,
    ) {
        if i == options.len() {
            let len = events.len();
            if events[1..len - 1].iter().all(|&e| e >= r3) && best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for &(j, k, c) in &options[i] {
            events[j] += 1;
            events[k] += 1;
            rec(i + 1, options, events, acc + c, r3, best);
            events[j] -= 1;
            events[k] -= 1;
        }
    }
    rec(0, &options, &mut events, 0.0, r3, &mut best);
    best
}

/// Optimal route-and-stops cost as the fixpoint of repeated relaxation over
/// `(node, served set)` states, with no priority queue. Handles R1, R2 and
/// the weighted objective; R3 and R4 must be off.
pub fn oris_oracle_bellman(g: &Graph, qs: &QuerySet, st: NodeId, en: NodeId, cons: &Constraints) -> Option<f64> {
    assert!(cons.r3 <= 1 && cons.r4.is_none(), "R3/R4 are not modelled here");
    let n = g.node_count();
    let q = qs.len();
    let fwd = adjacency(g, false);
    let rev = adjacency(g, true);
    let access: Vec<Vec<f64>> = qs.pairs.iter().map(|p| bellman_ford(&fwd, p.0.index())).collect();
    let egress: Vec<Vec<f64>> = qs.pairs.iter().map(|p| bellman_ford(&rev, p.1.index())).collect();
    let direct = bellman_ford(&fwd, st.index())[en.index()];
    let limit = cons.route_limit(direct);
    let wv = cons.objective.vehicle_weight();
    let ws = cons.objective.solo_weight();

    let raw_masks = 1usize << (2 * q);
    let valid = |m: usize| (0..q).all(|i| m >> (2 * i + 1) & 1 == 0 || m >> (2 * i) & 1 == 1);
    // Pareto front of (cost, vehicle) labels per state.
    let mut labels: Vec<Vec<(f64, f64)>> = vec![Vec::new(); n * raw_masks];
    let insert = |set: &mut Vec<(f64, f64)>, lab: (f64, f64), pareto: bool| -> bool {
        if pareto {
            if set.iter().any(|&(c, v)| c <= lab.0 && v <= lab.1) {
                return false;
            }
            set.retain(|&(c, v)| !(lab.0 <= c && lab.1 <= v));
            set.push(lab);
            true
        } else if set.first().is_none_or(|&(c, _)| lab.0 < c) {
            set.clear();
            set.push(lab);
            true
        } else {
            false
        }
    };
    let pareto = cons.r2.is_some();
    labels[st.index() * raw_masks].push((0.0, 0.0));
    let mut changed = true;
    while changed {
        changed = false;
        for mask in (0..raw_masks).filter(|&m| valid(m)) {
            for u in 0..n {
                let here = labels[u * raw_masks + mask].clone();
                for (cost, veh) in here {
                    for &(v, c) in &fwd[u] {
                        let nv = veh + c;
                        if nv <= limit {
                            changed |= insert(&mut labels[v * raw_masks + mask], (cost + wv * c, nv), pareto);
                        }
                    }
                    for i in 0..q {
                        let (bit, x) = if mask >> (2 * i) & 1 == 0 {
                            (2 * i, access[i][u])
                        } else if mask >> (2 * i + 1) & 1 == 0 {
                            (2 * i + 1, egress[i][u])
                        } else {
                            continue;
                        };
                        if cons.leg_ok(x) {
                            let slot = &mut labels[u * raw_masks + (mask | 1 << bit)];
                            changed |= insert(slot, (cost + ws * x, veh), pareto);
                        }
                    }
                }
            }
        }
    }
    labels[en.index() * raw_masks + raw_masks - 1]
        .iter()
        .map(|l| l.0)
        .min_by(f64::total_cmp)
}
