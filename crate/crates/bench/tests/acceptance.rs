// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion's PASS/FAIL line is always printed; exits non-zero on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use roadstops::graph::synth::{random_graph, road_network, RandomGraphConfig, RoadNetworkConfig};
use roadstops::graph::Edge;
use roadstops::oes::{baseline_end_stops, fast_end_stops};
use roadstops::oracle::{oes_oracle, oris_oracle_bellman, oris_oracle_exhaustive};
use roadstops::oris::exact::{self, ExactOptions};
use roadstops::oris::heuristic;
use roadstops::oris::{heur_stops, opt_stops, HeuristicOptions, OrisContext, Version};
use roadstops::querygen::{gen_oes_instance, gen_oris_instance, OesGenConfig, OrisGenConfig};
use roadstops::{Constraints, EndStopsResult, Error, Graph, NodeId, Point, QuerySet};
use roadstops_bench::metrics::{mean, median, relative_error};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rgraph(n: usize, seed: u64, directed: bool, max_cost: u32) -> Graph {
    random_graph(RandomGraphConfig {
        n,
        extra: 2,
        directed,
        max_cost,
        seed,
    })
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed().as_secs_f64())
}

fn exact_cost(ctx: &OrisContext<'_>, cons: &Constraints) -> Option<f64> {
    match exact::solve(ctx, cons, ExactOptions::default()) {
        Ok(o) => Some(o.plan.total_cost),
        Err(Error::Infeasible { .. }) => None,
        Err(e) => panic!("exact solver: {e}"),
    }
}

fn oes_exactness() -> Outcome {
    let mut count = 0;
    let mut ties = 0;
    for i in 0..50u64 {
        let n = (50.0 * 40f64.powf(i as f64 / 49.0)).round() as usize;
        let g = rgraph(n, 1000 + i, i % 2 == 1, 100);
        let gen = OesGenConfig {
            q: 1 + (i as usize % 20),
            seed: i,
            ..OesGenConfig::default()
        };
        let qs = gen_oes_instance(&g, &gen).unwrap().queries;
        let base = baseline_end_stops(&g, &qs).unwrap().result;
        let oracle = oes_oracle(&g, &qs).unwrap();
        let gt = g.transpose();
        for prune in [true, false] {
            let fast = fast_end_stops(&g, &qs, prune).unwrap().result;
            for other in [&base, &oracle] {
                if fast.total_cost != other.total_cost {
                    return Err(format!("instance {i} (n {n}, prune {prune}): fast {} vs {}", fast.total_cost, other.total_cost));
                }
                if (fast.st, fast.en) != (other.st, other.en) {
                    let re = EndStopsResult::evaluate(&g, &gt, &qs, other.st, other.en);
                    if re.total_cost != fast.total_cost {
                        return Err(format!("instance {i}: pairs differ without a cost tie"));
                    }
                    ties += 1;
                }
            }
        }
        count += 1;
    }
    Ok(format!("{count} instances, n 50..2000, {ties} verified tie(s)"))
}

fn oes_speedup() -> Outcome {
    let g = road_network(RoadNetworkConfig::with_nodes(10_000, 2));
    let qs = gen_oes_instance(&g, &OesGenConfig::default()).unwrap().queries;
    let mut fast_t = Vec::new();
    let mut base_t = Vec::new();
    for _ in 0..5 {
        let (f, tf) = timed(|| fast_end_stops(&g, &qs, true).unwrap());
        let (b, tb) = timed(|| baseline_end_stops(&g, &qs).unwrap());
        assert_eq!(f.result.total_cost, b.result.total_cost);
        fast_t.push(tf);
        base_t.push(tb);
    }
    let (mf, mb) = (median(&fast_t).unwrap(), median(&base_t).unwrap());
    let ratio = mb / mf;
    check(
        ratio >= 10.0,
        format!("n {}, median fast {mf:.3}s, baseline {mb:.3}s, speedup {ratio:.1}x", g.node_count()),
    )
}

fn oes_cluster_distance_trend() -> Outcome {
    let g = road_network(RoadNetworkConfig::with_nodes(3600, 4));
    let values = [30.0, 45.0, 60.0, 75.0, 90.0];
    let mut fast_med = Vec::new();
    let mut base_med = Vec::new();
    for &cd in &values {
        let mut ft = Vec::new();
        let mut bt = Vec::new();
        for seed in 0..3 {
            let gen = OesGenConfig {
                cluster_distance_pct: cd,
                seed,
                ..OesGenConfig::default()
            };
            let qs = gen_oes_instance(&g, &gen).unwrap().queries;
            let best = (0..3)
                .map(|_| timed(|| fast_end_stops(&g, &qs, true).unwrap()).1)
                .fold(f64::INFINITY, f64::min);
            ft.push(best);
            bt.push(timed(|| baseline_end_stops(&g, &qs).unwrap()).1);
        }
        fast_med.push(median(&ft).unwrap());
        base_med.push(median(&bt).unwrap());
    }
    let bmin = base_med.iter().cloned().fold(f64::INFINITY, f64::min);
    let bmax = base_med.iter().cloned().fold(0.0, f64::max);
    let spread = (bmax - bmin) / bmin;
    let fmt = |v: &[f64]| v.iter().map(|t| format!("{:.4}", t)).collect::<Vec<_>>().join(" ");
    check(
        fast_med[4] < fast_med[0] && spread < 0.2,
        format!(
            "fast medians [{}]s, baseline medians [{}]s (spread {:.1}%)",
            fmt(&fast_med),
            fmt(&base_med),
            100.0 * spread
        ),
    )
}

fn oris_exact_correctness() -> Outcome {
    let mut exhaustive = 0;
    let mut used = [false; 4];
    for i in 0..120u64 {
        let n = 6 + (i as usize % 7);
        let q = 1 + (i as usize % 2);
        let g = rgraph(n, 7000 + i, i % 3 != 0, 20);
        let raw: Vec<(usize, usize)> = (0..q).map(|k| ((i as usize * 7 + k * 5) % n, (i as usize * 3 + k * 11 + 1) % n)).collect();
        let qs = QuerySet::from_indices(&raw);
        let (st, en) = (NodeId::from((i as usize * 5) % n), NodeId::from((i as usize * 13 + 2) % n));
        let ctx = OrisContext::new(&g, &qs, st, en).unwrap();
        let variant = (i % 4) as usize;
        let cons = match variant {
            0 => Constraints::none().with_r1(4.0 + (i % 9) as f64),
            1 => Constraints::none().with_r2(1.0 + 0.25 * (i % 4) as f64),
            2 => Constraints::none().with_r3(2 + (i % 2) as u32),
            _ => Constraints::none().with_r4(2 + (i as usize % (2 * q + 1))),
        };
        for c in [cons, Constraints::none(), Constraints::none().weighted(0.7)] {
            let want = oris_oracle_exhaustive(&g, &qs, st, en, 2 * q + 2, &c);
            let got = exact_cost(&ctx, &c);
            if got != want {
                return Err(format!("exhaustive instance {i}: exact {got:?} vs oracle {want:?} under {c:?}"));
            }
        }
        used[variant] = true;
        exhaustive += 1;
    }
    let mut bellman = 0;
    for i in 0..32u64 {
        let n = 50 + (i as usize * 47) % 151;
        let q = 1 + (i as usize % 4);
        let g = rgraph(n, 9000 + i, i % 2 == 0, 30);
        let raw: Vec<(usize, usize)> = (0..q).map(|k| ((i as usize * 31 + k * 17) % n, (i as usize * 19 + k * 29 + 3) % n)).collect();
        let qs = QuerySet::from_indices(&raw);
        let (st, en) = (NodeId::from((i as usize * 11) % n), NodeId::from((i as usize * 23 + 5) % n));
        let ctx = OrisContext::new(&g, &qs, st, en).unwrap();
        let cons = match i % 4 {
            0 => Constraints::none(),
            1 => Constraints::none().with_r1(20.0),
            2 => Constraints::none().with_r2(1.2),
            // Dyadic weight: the oracle sums weighted edges one by one, so
            // weights like 0.6 round differently from a single final product.
            _ => Constraints::none().weighted(0.625),
        };
        let want = oris_oracle_bellman(&g, &qs, st, en, &cons);
        let got = exact_cost(&ctx, &cons);
        if got != want {
            return Err(format!("bellman instance {i}: exact {got:?} vs oracle {want:?} under {cons:?}"));
        }
        bellman += 1;
    }
    check(
        used.iter().all(|&u| u),
        format!("{exhaustive} instances vs exhaustive (R1-R4 each), {bellman} vs fixpoint oracle"),
    )
}

fn greedy_trap() -> (Graph, QuerySet) {
    const A: u32 = 0;
    const B: u32 = 1;
    const C: u32 = 2;
    const D: u32 = 3;
    const E: u32 = 4;
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
    let coords = (0..8).map(|i| Point::new(i as f64, 0.0)).collect();
    (Graph::from_edges(coords, &edges).unwrap(), QuerySet::from_indices(&[(5, 7), (6, 7)]))
}

fn greedy_fixture() -> Outcome {
    let (g, qs) = greedy_trap();
    let cons = Constraints::none();
    let e = opt_stops(&g, &qs, NodeId(0), NodeId(4), &cons, true).unwrap().plan.total_cost;
    let opts = HeuristicOptions {
        version: Version::NoRevisit,
        prune: false,
    };
    let h = heur_stops(&g, &qs, NodeId(0), NodeId(4), &cons, opts).unwrap().plan.total_cost;
    check(e == 23.0 && h == 25.0, format!("exact {e}, heuristic {h}"))
}

/// Table-2-shaped instances with q = 5 on a ~2,000-node network.
fn error_instances() -> (Graph, Vec<(NodeId, NodeId, QuerySet)>) {
    let g = road_network(RoadNetworkConfig::with_nodes(2000, 1));
    let inst = (0..20)
        .map(|seed| {
            let gen = OrisGenConfig {
                q: 5,
                seed,
                ..OrisGenConfig::default()
            };
            let i = gen_oris_instance(&g, &gen).unwrap();
            (i.st, i.en, i.queries)
        })
        .collect();
    (g, inst)
}

/// Mean heuristic relative error; `Err` if the heuristic ever beats the optimum.
fn mean_error(g: &Graph, set: &[(NodeId, NodeId, QuerySet)], cons: &Constraints) -> Result<f64, String> {
    let mut errs = Vec::new();
    for (k, (st, en, qs)) in set.iter().enumerate() {
        let ctx = OrisContext::new(g, qs, *st, *en).unwrap();
        let e = exact::solve(&ctx, cons, ExactOptions::default()).unwrap().plan.total_cost;
        let h = heuristic::solve(&ctx, cons, HeuristicOptions::default()).unwrap().plan.total_cost;
        if h < e {
            return Err(format!("instance {k}: heuristic {h} below exact {e}"));
        }
        errs.push(relative_error(h, e));
    }
    Ok(mean(&errs).unwrap())
}

fn heuristic_error(g: &Graph, set: &[(NodeId, NodeId, QuerySet)]) -> Outcome {
    let m = mean_error(g, set, &Constraints::none())?;
    check(m <= 0.10, format!("{} instances, mean relative error {:.2}%", set.len(), 100.0 * m))
}

fn growth() -> Outcome {
    let g = road_network(RoadNetworkConfig::with_nodes(400, 5));
    let gen = OrisGenConfig {
        q: 50,
        seed: 3,
        ..OrisGenConfig::default()
    };
    let inst = gen_oris_instance(&g, &gen).unwrap();
    let prefix = |q: usize| QuerySet::new(inst.queries.pairs[..q].to_vec());
    let mut states = Vec::new();
    for q in 2..=6 {
        let qs = prefix(q);
        let ctx = OrisContext::new(&g, &qs, inst.st, inst.en).unwrap();
        let o = exact::solve(&ctx, &Constraints::none(), ExactOptions::default()).unwrap();
        states.push(o.stats.peak_states as f64);
    }
    let ratios: Vec<f64> = states.windows(2).map(|w| w[1] / w[0]).collect();
    let mut extractions = Vec::new();
    for q in [10, 50] {
        let qs = prefix(q);
        let ctx = OrisContext::new(&g, &qs, inst.st, inst.en).unwrap();
        let o = heuristic::solve(&ctx, &Constraints::none(), HeuristicOptions::default()).unwrap();
        extractions.push(o.stats.extractions as f64);
    }
    let heur_growth = extractions[1] / extractions[0];

    let big = road_network(RoadNetworkConfig::with_nodes(100_000, 5));
    let inst = gen_oris_instance(&big, &gen).unwrap();
    let (_, secs) = timed(|| {
        let ctx = OrisContext::new(&big, &inst.queries, inst.st, inst.en).unwrap();
        heuristic::solve(&ctx, &Constraints::none(), HeuristicOptions::default()).unwrap()
    });
    let ratio_text = ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(" ");
    check(
        ratios.iter().all(|&r| r >= 2.5) && heur_growth < 10.0 && secs < 60.0,
        format!(
            "exact state growth per query [{ratio_text}], heuristic extractions q50/q10 {heur_growth:.2}x, q=50 on {} nodes {secs:.2}s",
            big.node_count()
        ),
    )
}

fn identities() -> Outcome {
    let mut per = 0;
    for i in 0..24u64 {
        let n = 8 + (i as usize % 10);
        let q = 1 + (i as usize % 3);
        let g = rgraph(n, 500 + i, true, 20);
        let raw: Vec<(usize, usize)> = (0..q).map(|k| ((i as usize * 5 + k * 3) % n, (i as usize * 7 + k * 13 + 1) % n)).collect();
        let qs = QuerySet::from_indices(&raw);
        let (st, en) = (NodeId::from((i as usize * 3) % n), NodeId::from((i as usize * 17 + 4) % n));
        let ctx = OrisContext::new(&g, &qs, st, en).unwrap();
        let opts = ExactOptions::default();
        let solve = |c: Constraints| exact::solve(&ctx, &c, opts).unwrap().plan;
        let free = solve(Constraints::none());

        let tspp = solve(Constraints::none().with_r1(0.0));
        for &(s, d) in &qs.pairs {
            if !tspp.route.contains(&s) || !tspp.route.contains(&d) {
                return Err(format!("instance {i}: R1=0 route misses a query node"));
            }
        }
        let r2 = solve(Constraints::none().with_r2(1.0));
        if r2.vehicle_cost != ctx.direct {
            return Err(format!("instance {i}: R2=1 vehicle {} vs direct {}", r2.vehicle_cost, ctx.direct));
        }
        for c in [
            Constraints::none().with_r3(0),
            Constraints::none().with_r3(1),
            Constraints::none().with_r4(2 * q + 2),
        ] {
            let p = solve(c);
            if p.total_cost != free.total_cost {
                return Err(format!("instance {i}: {c:?} cost {} vs free {}", p.total_cost, free.total_cost));
            }
        }
        let r5 = solve(Constraints::none().weighted(1.0));
        if r5.vehicle_cost != ctx.direct {
            return Err(format!("instance {i}: R5=1 route {} vs direct {}", r5.vehicle_cost, ctx.direct));
        }
        per += 1;
    }
    Ok(format!("{per} instances for each identity"))
}

fn r5_trend(g: &Graph, set: &[(NodeId, NodeId, QuerySet)]) -> Outcome {
    let mut errs = Vec::new();
    for r5 in [0.4, 0.5, 0.6, 0.7, 0.8] {
        errs.push(mean_error(g, set, &Constraints::none().weighted(r5))?);
    }
    let at75 = mean_error(g, set, &Constraints::none().weighted(0.75))?;
    let text = errs.iter().map(|e| format!("{:.2}%", 100.0 * e)).collect::<Vec<_>>().join(" ");
    check(
        errs.windows(2).all(|w| w[1] <= w[0]) && at75 <= 0.02,
        format!("mean error over R5 0.4..0.8 [{text}], at 0.75 {:.2}%", 100.0 * at75),
    )
}

/// CSV text without the wall-time column.
fn strip_wall_time(path: &Path) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "wall_time_s").unwrap();
    text.lines()
        .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != col).map(|(_, f)| f).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["solve", "oes", "--nodes", "1500", "--q", "12", "--seed", "4", "--algo", "fast"],
        vec!["solve", "oes", "--nodes", "600", "--q", "5", "--seed", "4", "--algo", "baseline"],
        vec!["solve", "oris", "--nodes", "1500", "--q", "20", "--seed", "4", "--algo", "heur"],
        vec!["solve", "oris", "--nodes", "300", "--q", "3", "--seed", "4", "--algo", "exact", "--r2", "1.3"],
        vec![
            "sweep", "--problem", "oris", "--param", "r5", "--nodes", "300", "--q", "3", "--reps", "2", "--seed", "9",
        ],
        vec![
            "sweep", "--problem", "oes", "--param", "cluster-area", "--nodes", "400", "--q", "6", "--reps", "2",
        ],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let csv = dir.path().join(format!("run{k}_{round}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_roadstops"))
                .args(args)
                .arg("--csv")
                .arg(&csv)
                .output()
                .unwrap();
            if !status.status.success() {
                return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)));
            }
            outputs.push(strip_wall_time(&csv));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{args:?} produced different CSV rows"));
        }
    }
    Ok(format!("{} commands, identical CSV rows on repeat", runs.len()))
}

fn main() -> std::process::ExitCode {
    let mut failed = Vec::new();
    let (g6, set6) = error_instances();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("C1 OES exactness", Box::new(oes_exactness)),
        ("C2 OES speedup", Box::new(oes_speedup)),
        ("C3 OES cluster-distance trend", Box::new(oes_cluster_distance_trend)),
        ("C4 exact route correctness", Box::new(oris_exact_correctness)),
        ("C5 greedy-trap fixture", Box::new(greedy_fixture)),
        ("C6 heuristic error", Box::new(|| heuristic_error(&g6, &set6))),
        ("C7 growth", Box::new(growth)),
        ("C8 constraint identities", Box::new(identities)),
        ("C9 R5 error trend", Box::new(|| r5_trend(&g6, &set6))),
        ("C10 CLI determinism", Box::new(cli_determinism)),
    ];
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(|| f())).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                println!("FAIL {name}: {d}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
