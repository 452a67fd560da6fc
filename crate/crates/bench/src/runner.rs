// SPDX-License-Identifier: Apache-2.0

//! Timed solver calls. Times cover the solver alone; shared precomputation
//! (transpose, solo cost tables) is built once by the caller.

use std::time::Instant;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use roadstops::oes::{baseline_end_stops, fast_end_stops_with_transpose, EndStopsResult};
use roadstops::oris::exact::{self, ExactOptions};
use roadstops::oris::heuristic::{self, HeuristicOptions};
use roadstops::oris::{Constraints, OrisContext, StopPlan};
use roadstops::{Graph, QuerySet, Result};

use crate::metrics::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OesAlgo {
    Baseline,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrisAlgo {
    Exact,
    Heur,
}

impl OesAlgo {
    pub fn name(self) -> &'static str {
        match self {
            OesAlgo::Baseline => "baseline",
            OesAlgo::Fast => "fast",
        }
    }
}

impl OrisAlgo {
    pub fn name(self) -> &'static str {
        match self {
            OrisAlgo::Exact => "exact",
            OrisAlgo::Heur => "heur",
        }
    }
}

pub fn run_oes(g: &Graph, gt: &Graph, qs: &QuerySet, algo: OesAlgo, prune: bool) -> Result<(EndStopsResult, Sample)> {
    let t = Instant::now();
    let out = match algo {
        OesAlgo::Baseline => baseline_end_stops(g, qs)?,
        OesAlgo::Fast => fast_end_stops_with_transpose(g, gt, qs, prune)?,
    };
    let wall_time_s = t.elapsed().as_secs_f64();
    let s = Sample {
        objective: out.result.total_cost,
        wall_time_s,
        extractions: out.stats.extractions,
        relaxations: out.stats.relaxations,
        peak_frontier: out.stats.peak_frontier,
        peak_states: None,
    };
    Ok((out.result, s))
}

pub fn run_oris(
    ctx: &OrisContext<'_>,
    cons: &Constraints,
    algo: OrisAlgo,
    heur: HeuristicOptions,
    exact_opts: ExactOptions,
) -> Result<(StopPlan, Sample)> {
    let t = Instant::now();
    match algo {
        OrisAlgo::Exact => {
            let o = exact::solve(ctx, cons, exact_opts)?;
            let s = Sample {
                objective: o.plan.total_cost,
                wall_time_s: t.elapsed().as_secs_f64(),
                extractions: o.stats.extractions,
                relaxations: o.stats.relaxations,
                peak_frontier: o.stats.peak_frontier,
                peak_states: Some(o.stats.peak_states),
            };
            Ok((o.plan, s))
        }
        OrisAlgo::Heur => {
            let o = heuristic::solve(ctx, cons, heur)?;
            let s = Sample {
                objective: o.plan.total_cost,
                wall_time_s: t.elapsed().as_secs_f64(),
                extractions: o.stats.extractions,
                relaxations: o.stats.relaxations,
                peak_frontier: o.stats.peak_frontier,
                peak_states: Some(o.stats.labels),
            };
            Ok((o.plan, s))
        }
    }
}
