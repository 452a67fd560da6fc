// SPDX-License-Identifier: Apache-2.0

//! `roadstops`: solve single end-stop or route-and-stops instances, generate
//! instances, and run parameter sweeps that write CSV metrics.
//!
//! Exit status: 0 on success, 2 for bad arguments, 3 for infeasible
//! instances, 1 for anything else (including a failed `--verify`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use roadstops::graph::synth::{grid, random_graph, road_network, RandomGraphConfig, RoadNetworkConfig};
use roadstops::graph::{load_graph, write_graph};
use roadstops::oracle::{oes_oracle, oris_oracle_bellman, oris_oracle_exhaustive};
use roadstops::oris::{ExactOptions, HeuristicOptions, OrisContext, Version};
use roadstops::querygen::{gen_oes_instance, gen_oris_instance, InstanceMeta, OesGenConfig, OrisGenConfig};
use roadstops::{Constraints, Error, Graph, NodeId, Objective, QuerySet};
use roadstops_bench::metrics::{relative_error, write_csv_file, RunMetrics};
use roadstops_bench::runner::{run_oes, run_oris, OesAlgo, OrisAlgo};
use roadstops_bench::sweep::{run_sweep, value_range, Param, Problem, SweepConfig};

#[derive(Parser)]
#[command(name = "roadstops", version, about = "Shared-vehicle stop planning on road networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a synthetic graph in the plain-text graph format.
    GenGraph {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a query file (and a `.meta.json` sidecar).
    Gen {
        #[command(subcommand)]
        problem: GenCmd,
    },
    /// Solve one instance.
    Solve {
        #[command(subcommand)]
        problem: SolveCmd,
    },
    /// Vary one parameter and write averaged metrics as CSV.
    Sweep(SweepArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    Oes {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        gen: OesGenArgs,
        #[arg(long)]
        out: PathBuf,
    },
    Oris {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        gen: OrisGenArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum SolveCmd {
    Oes(SolveOesArgs),
    Oris(SolveOrisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Road,
    Grid,
    Random,
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Graph file; when absent a synthetic graph is generated.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GraphKind::Road)]
    kind: GraphKind,
    #[arg(long, default_value_t = 2000)]
    nodes: usize,
    #[arg(long, default_value_t = 1)]
    graph_seed: u64,
}

impl GraphArgs {
    fn build(&self) -> anyhow::Result<Graph> {
        if let Some(p) = &self.graph {
            return Ok(load_graph(p)?);
        }
        if self.nodes == 0 {
            return Err(Error::InvalidArgument("--nodes must be positive".into()).into());
        }
        Ok(match self.kind {
            GraphKind::Road => road_network(RoadNetworkConfig::with_nodes(self.nodes, self.graph_seed)),
            GraphKind::Grid => {
                let side = (self.nodes as f64).sqrt().ceil() as usize;
                grid(self.nodes.div_ceil(side), side, 1.0)
            }
            GraphKind::Random => random_graph(RandomGraphConfig {
                n: self.nodes,
                extra: 2,
                directed: false,
                max_cost: 100,
                seed: self.graph_seed,
            }),
        })
    }
}

#[derive(Args, Clone)]
struct OesGenArgs {
    /// Cluster distance, % of the Euclidean diameter.
    #[arg(long, default_value_t = 60.0)]
    cluster_distance: f64,
    /// Cluster window area, % of the bounding box.
    #[arg(long, default_value_t = 7.0)]
    cluster_area: f64,
    #[arg(long, default_value_t = 30)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OesGenArgs {
    fn config(&self) -> OesGenConfig {
        OesGenConfig {
            cluster_distance_pct: self.cluster_distance,
            cluster_area_pct: self.cluster_area,
            q: self.q,
            seed: self.seed,
        }
    }
}

#[derive(Args, Clone)]
struct OrisGenArgs {
    /// `st`–`en` distance, % of the Euclidean diameter.
    #[arg(long, default_value_t = 75.0)]
    euclid_distance: f64,
    /// Query ellipse area, % of the bounding box.
    #[arg(long, default_value_t = 50.0)]
    query_space: f64,
    #[arg(long, default_value_t = 30)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OrisGenArgs {
    fn config(&self) -> OrisGenConfig {
        OrisGenConfig {
            euclid_distance_pct: self.euclid_distance,
            query_space_pct: self.query_space,
            q: self.q,
            seed: self.seed,
            ..OrisGenConfig::default()
        }
    }
}

#[derive(Args)]
struct SolveOesArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Query file; when absent queries are generated.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[command(flatten)]
    gen: OesGenArgs,
    #[arg(long, value_enum, default_value_t = OesAlgo::Fast)]
    algo: OesAlgo,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    prune: bool,
    /// Cross-check against the all-pairs oracle.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Unweighted,
    Weighted,
}

#[derive(Args)]
struct ConstraintArgs {
    /// Longest solo leg, absolute cost.
    #[arg(long, conflicts_with = "r1_pct")]
    r1: Option<f64>,
    /// Longest solo leg, % of SPC(st, en).
    #[arg(long)]
    r1_pct: Option<f64>,
    /// Route at most `r2 * SPC(st, en)`.
    #[arg(long)]
    r2: Option<f64>,
    /// Minimum boardings plus alightings per intermediate stop.
    #[arg(long, default_value_t = 0)]
    r3: u32,
    /// Most stops, endpoints included.
    #[arg(long)]
    r4: Option<usize>,
    /// Vehicle weight; implies the weighted objective.
    #[arg(long)]
    r5: Option<f64>,
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
}

impl ConstraintArgs {
    fn build(&self, direct: f64) -> anyhow::Result<Constraints> {
        let mut c = Constraints::none().with_r3(self.r3);
        if let Some(r1) = self.r1 {
            c = c.with_r1(r1);
        }
        if let Some(p) = self.r1_pct {
            c = c.with_r1(p / 100.0 * direct);
        }
        if let Some(r2) = self.r2 {
            c = c.with_r2(r2);
        }
        if let Some(r4) = self.r4 {
            c = c.with_r4(r4);
        }
        let weighted = match (self.objective, self.r5) {
            (Some(ObjectiveArg::Unweighted), Some(_)) => {
                return Err(Error::InvalidArgument("--r5 needs the weighted objective".into()).into())
            }
            (Some(ObjectiveArg::Weighted), r5) => Some(r5.unwrap_or(OrisGenConfig::default().r5)),
            (_, r5) => r5,
        };
        if let Some(r5) = weighted {
            c = c.weighted(r5);
        }
        Ok(c)
    }
}

#[derive(Args)]
struct SolveOrisArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Query file; end stops come from `--st/--en` or its `.meta.json`.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long, requires = "en")]
    st: Option<u32>,
    #[arg(long, requires = "st")]
    en: Option<u32>,
    #[command(flatten)]
    gen: OrisGenArgs,
    #[command(flatten)]
    cons: ConstraintArgs,
    #[arg(long, value_enum, default_value_t = OrisAlgo::Heur)]
    algo: OrisAlgo,
    #[arg(long, value_enum, default_value_t = VersionArg::NoRevisit)]
    version: VersionArg,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    prune: bool,
    /// State budget for the exact solver.
    #[arg(long, default_value_t = ExactOptions::default().state_budget)]
    budget: u64,
    /// Cross-check against an oracle (or the exact solver for large inputs).
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VersionArg {
    NoRevisit,
    AllowRevisit,
}

impl From<VersionArg> for Version {
    fn from(v: VersionArg) -> Version {
        match v {
            VersionArg::NoRevisit => Version::NoRevisit,
            VersionArg::AllowRevisit => Version::AllowRevisit,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long, value_enum)]
    param: Param,
    /// Range start; the standard range is used when unset.
    #[arg(long, requires_all = ["to", "step"])]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Multiply by `--step` instead of adding it.
    #[arg(long)]
    multiplicative: bool,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Base seed; repetition `r` uses `seed + r`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Algorithms to run (comma separated); defaults to both for the problem.
    #[arg(long, value_delimiter = ',')]
    algo: Vec<String>,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    prune: bool,
    #[arg(long, value_enum, default_value_t = VersionArg::NoRevisit)]
    version: VersionArg,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Unweighted)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 60.0)]
    cluster_distance: f64,
    #[arg(long, default_value_t = 7.0)]
    cluster_area: f64,
    #[arg(long, default_value_t = 75.0)]
    euclid_distance: f64,
    #[arg(long, default_value_t = 50.0)]
    query_space: f64,
    #[arg(long, default_value_t = 30)]
    q: usize,
    #[arg(long)]
    r1_pct: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    r5: f64,
    #[arg(long, default_value_t = ExactOptions::default().state_budget)]
    budget: u64,
    #[arg(long)]
    csv: PathBuf,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(err) = e.downcast_ref::<Error>() {
        match err {
            Error::Infeasible { .. } => 3,
            Error::InvalidArgument(_)
            | Error::InvalidConstraint(_)
            | Error::EmptyQuerySet
            | Error::InvalidNode(_)
            | Error::Parse { .. } => 2,
            _ => 1,
        }
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.cmd {
        Cmd::GenGraph { graph, out } => {
            let g = graph.build()?;
            std::fs::write(&out, write_graph(&g)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), out.display());
        }
        Cmd::Gen { problem } => gen(problem)?,
        Cmd::Solve { problem: SolveCmd::Oes(a) } => solve_oes(a)?,
        Cmd::Solve { problem: SolveCmd::Oris(a) } => solve_oris(a)?,
        Cmd::Sweep(a) => sweep(a)?,
    }
    Ok(())
}

fn meta_path(queries: &Path) -> PathBuf {
    let mut s = queries.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn write_instance(out: &Path, qs: &QuerySet, meta: &InstanceMeta) -> anyhow::Result<()> {
    std::fs::write(out, qs.to_text()).with_context(|| format!("writing {}", out.display()))?;
    std::fs::write(meta_path(out), meta.to_json())?;
    for w in &meta.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn gen(cmd: GenCmd) -> anyhow::Result<()> {
    match cmd {
        GenCmd::Oes { graph, gen, out } => {
            let g = graph.build()?;
            let inst = gen_oes_instance(&g, &gen.config())?;
            write_instance(&out, &inst.queries, &inst.meta)?;
            println!("wrote {} queries to {}", inst.queries.len(), out.display());
        }
        GenCmd::Oris { graph, gen, out } => {
            let g = graph.build()?;
            let inst = gen_oris_instance(&g, &gen.config())?;
            write_instance(&out, &inst.queries, &inst.meta)?;
            println!(
                "wrote {} queries to {} (st {}, en {})",
                inst.queries.len(),
                out.display(),
                inst.st,
                inst.en
            );
        }
    }
    Ok(())
}

fn print_metrics(m: &RunMetrics) {
    println!(
        "extractions {} relaxations {} peak_frontier {}{} wall_time_s {:.6}",
        m.extractions,
        m.relaxations,
        m.peak_frontier,
        m.peak_states.map(|s| format!(" peak_states {s}")).unwrap_or_default(),
        m.wall_time_s
    );
}

fn emit(csv: Option<&Path>, row: RunMetrics) -> anyhow::Result<()> {
    print_metrics(&row);
    if let Some(p) = csv {
        write_csv_file(p, &[row])?;
    }
    Ok(())
}

fn solve_oes(a: SolveOesArgs) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let qs = match &a.queries {
        Some(p) => QuerySet::load(p)?,
        None => gen_oes_instance(&g, &a.gen.config())?.queries,
    };
    let gt = g.transpose();
    let (r, s) = run_oes(&g, &gt, &qs, a.algo, a.prune)?;
    println!("st {} en {}", r.st, r.en);
    println!(
        "total {} = vehicle {} + access {} + egress {}",
        r.total_cost,
        r.vehicle_cost,
        r.access_costs.iter().sum::<f64>(),
        r.egress_costs.iter().sum::<f64>()
    );
    if a.verify {
        let o = oes_oracle(&g, &qs)?;
        if o.total_cost != r.total_cost {
            bail!("verify failed: oracle cost {} but solver returned {}", o.total_cost, r.total_cost);
        }
        println!("verify ok: oracle cost {}", o.total_cost);
    }
    let row = RunMetrics::single("q", &qs.len().to_string(), a.algo.name(), a.gen.seed, &s, None);
    emit(a.csv.as_deref(), row)
}

fn oris_reference(ctx: &OrisContext<'_>, cons: &Constraints, budget: u64) -> anyhow::Result<Option<f64>> {
    let g = ctx.graph;
    let (n, q) = (g.node_count(), ctx.q());
    if n <= 12 && q <= 2 {
        return Ok(oris_oracle_exhaustive(g, &ctx.queries, ctx.st, ctx.en, n + 2 * q + 2, cons));
    }
    if cons.r3 <= 1 && cons.r4.is_none() && n <= 2000 && q <= 6 {
        return Ok(oris_oracle_bellman(g, &ctx.queries, ctx.st, ctx.en, cons));
    }
    let opts = ExactOptions {
        early_stop: true,
        state_budget: budget,
    };
    match run_oris(ctx, cons, OrisAlgo::Exact, HeuristicOptions::default(), opts) {
        Ok((p, _)) => Ok(Some(p.total_cost)),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn solve_oris(a: SolveOrisArgs) -> anyhow::Result<()> {
    let g = a.graph.build()?;
    let (qs, st, en) = match (&a.queries, a.st, a.en) {
        (Some(p), Some(s), Some(e)) => (QuerySet::load(p)?, NodeId(s), NodeId(e)),
        (Some(p), None, None) => {
            let mp = meta_path(p);
            let text = std::fs::read_to_string(&mp)
                .map_err(|_| Error::InvalidArgument(format!("--st/--en missing and {} unreadable", mp.display())))?;
            let meta: InstanceMeta = serde_json::from_str(&text).with_context(|| format!("parsing {}", mp.display()))?;
            (QuerySet::load(p)?, meta.endpoints.0, meta.endpoints.1)
        }
        (None, Some(s), Some(e)) => {
            let inst = gen_oris_instance(&g, &a.gen.config())?;
            (inst.queries, NodeId(s), NodeId(e))
        }
        _ => {
            let inst = gen_oris_instance(&g, &a.gen.config())?;
            (inst.queries, inst.st, inst.en)
        }
    };
    let ctx = OrisContext::new(&g, &qs, st, en)?;
    let cons = a.cons.build(ctx.direct)?;
    let heur = HeuristicOptions {
        version: a.version.into(),
        prune: a.prune,
    };
    let exact = ExactOptions {
        early_stop: true,
        state_budget: a.budget,
    };
    let (plan, s) = run_oris(&ctx, &cons, a.algo, heur, exact)?;
    let fmt = |v: &[NodeId]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    println!("st {st} en {en} direct {}", ctx.direct);
    println!("route {}", fmt(&plan.route));
    println!("stops {}", fmt(&plan.stops));
    for i in 0..qs.len() {
        println!(
            "query {i}: board {} (walk {}) alight {} (walk {})",
            plan.stops[plan.board[i]],
            plan.access[i],
            plan.stops[plan.alight[i]],
            plan.egress[i]
        );
    }
    let weight = match cons.objective {
        Objective::Unweighted => String::new(),
        o => format!(" (weights {} / {})", o.vehicle_weight(), o.solo_weight()),
    };
    println!("total {} = vehicle {} + solo {}{weight}", plan.total_cost, plan.vehicle_cost, plan.solo_cost());

    let mut rel = None;
    if a.verify {
        let reference = oris_reference(&ctx, &cons, a.budget)?;
        let Some(best) = reference else {
            bail!("verify failed: reference finds the instance infeasible");
        };
        let ok = match a.algo {
            OrisAlgo::Exact => plan.total_cost == best,
            OrisAlgo::Heur => plan.total_cost >= best,
        };
        if !ok {
            bail!("verify failed: reference cost {best} but solver returned {}", plan.total_cost);
        }
        rel = (a.algo == OrisAlgo::Heur).then(|| relative_error(plan.total_cost, best));
        println!("verify ok: reference cost {best}");
    }
    let row = RunMetrics::single("q", &qs.len().to_string(), a.algo.name(), a.gen.seed, &s, rel);
    emit(a.csv.as_deref(), row)
}

fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    if !a.param.applies_to(a.problem) {
        return Err(Error::InvalidArgument(format!("--param {} does not apply here", a.param.name())).into());
    }
    let g = a.graph.build()?;
    let mut cfg = SweepConfig::new(a.problem, a.param);
    if let (Some(from), Some(to), Some(step)) = (a.from, a.to, a.step) {
        cfg.values = value_range(from, to, step, a.multiplicative);
    }
    cfg.reps = a.reps;
    cfg.seed = a.seed;
    cfg.prune = a.prune;
    cfg.version = a.version.into();
    cfg.weighted = a.objective == ObjectiveArg::Weighted;
    cfg.exact_budget = a.budget;
    cfg.oes = OesGenConfig {
        cluster_distance_pct: a.cluster_distance,
        cluster_area_pct: a.cluster_area,
        q: a.q,
        seed: a.seed,
    };
    cfg.oris = OrisGenConfig {
        euclid_distance_pct: a.euclid_distance,
        query_space_pct: a.query_space,
        q: a.q,
        seed: a.seed,
        r1_pct: a.r1_pct,
        r5: a.r5,
    };
    if !a.algo.is_empty() {
        let bad = |s: &str| Error::InvalidArgument(format!("unknown algorithm {s:?}"));
        match a.problem {
            Problem::Oes => {
                cfg.oes_algos = a
                    .algo
                    .iter()
                    .map(|s| OesAlgo::from_str(s, true).map_err(|_| bad(s)))
                    .collect::<Result<_, _>>()?
            }
            Problem::Oris => {
                cfg.oris_algos = a
                    .algo
                    .iter()
                    .map(|s| OrisAlgo::from_str(s, true).map_err(|_| bad(s)))
                    .collect::<Result<_, _>>()?
            }
        }
    }
    let rows = run_sweep(&g, &cfg)?;
    write_csv_file(&a.csv, &rows)?;
    let sidecar = a.csv.with_extension("config.json");
    let mut replay = serde_json::to_value(&cfg)?;
    replay["graph"] = serde_json::json!({
        "file": a.graph.graph,
        "kind": format!("{:?}", a.graph.kind).to_lowercase(),
        "nodes": a.graph.nodes,
        "seed": a.graph.graph_seed,
    });
    std::fs::write(&sidecar, serde_json::to_string_pretty(&replay)?)?;
    println!("wrote {} rows to {} (config in {})", rows.len(), a.csv.display(), sidecar.display());
    Ok(())
}
