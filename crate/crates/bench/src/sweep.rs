// SPDX-License-Identifier: Apache-2.0

//! Vary one generator or constraint parameter, keep the rest at their
//! defaults, and average each algorithm's measurements over repetitions.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use roadstops::oris::{ExactOptions, HeuristicOptions, OrisContext, Version};
use roadstops::querygen::{gen_oes_instance, gen_oris_instance, OesGenConfig, OrisGenConfig};
use roadstops::{Error, Graph};

use crate::metrics::{mean, relative_error, RunMetrics, Sample};
use crate::runner::{run_oes, run_oris, OesAlgo, OrisAlgo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Oes,
    Oris,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Param {
    /// End-stop cluster distance, % of the Euclidean diameter.
    ClusterDistance,
    /// End-stop cluster window area, % of the bounding box.
    ClusterArea,
    /// Number of queries.
    Q,
    /// `st`–`en` distance, % of the Euclidean diameter.
    EuclidDistance,
    /// Query ellipse area, % of the bounding box.
    QuerySpace,
    /// Longest solo leg, % of SPC(st, en).
    R1,
    /// Vehicle weight of the weighted objective.
    R5,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::ClusterDistance => "cluster-distance",
            Param::ClusterArea => "cluster-area",
            Param::Q => "q",
            Param::EuclidDistance => "euclid-distance",
            Param::QuerySpace => "query-space",
            Param::R1 => "r1",
            Param::R5 => "r5",
        }
    }

    /// Whether the parameter applies to `problem`.
    pub fn applies_to(self, problem: Problem) -> bool {
        match self {
            Param::Q => true,
            Param::ClusterDistance | Param::ClusterArea => problem == Problem::Oes,
            _ => problem == Problem::Oris,
        }
    }

    /// Standard range: `(from, to, step, multiplicative)`.
    pub fn default_range(self) -> (f64, f64, f64, bool) {
        match self {
            Param::ClusterDistance | Param::EuclidDistance => (30.0, 90.0, 15.0, false),
            Param::ClusterArea => (1.0, 13.0, 3.0, false),
            Param::Q => (10.0, 50.0, 10.0, false),
            Param::QuerySpace => (10.0, 90.0, 20.0, false),
            Param::R1 => (0.001, 10.0, 10.0, true),
            Param::R5 => (0.4, 0.8, 0.1, false),
        }
    }
}

/// Values from `from` to `to` inclusive, adding or multiplying by `step`.
pub fn value_range(from: f64, to: f64, step: f64, multiplicative: bool) -> Vec<f64> {
    let round = |x: f64| (x * 1e9).round() / 1e9;
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let v = round(if multiplicative {
            from * step.powi(k)
        } else {
            from + step * k as f64
        });
        if v > to * (1.0 + 1e-12) || out.len() > 10_000 {
            break;
        }
        out.push(v);
        if (multiplicative && step <= 1.0) || (!multiplicative && step <= 0.0) {
            break;
        }
        k += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub problem: Problem,
    pub param: Param,
    pub values: Vec<f64>,
    pub reps: usize,
    /// Repetition `r` uses seed `seed + r`.
    pub seed: u64,
    pub oes: OesGenConfig,
    pub oris: OrisGenConfig,
    pub oes_algos: Vec<OesAlgo>,
    pub oris_algos: Vec<OrisAlgo>,
    pub prune: bool,
    pub version: Version,
    /// Use the weighted objective with `oris.r5`; always on for R5 sweeps.
    pub weighted: bool,
    pub exact_budget: u64,
}

impl SweepConfig {
    pub fn new(problem: Problem, param: Param) -> Self {
        let (from, to, step, mul) = param.default_range();
        SweepConfig {
            problem,
            param,
            values: value_range(from, to, step, mul),
            reps: 10,
            seed: 1,
            oes: OesGenConfig::default(),
            oris: OrisGenConfig::default(),
            oes_algos: vec![OesAlgo::Baseline, OesAlgo::Fast],
            oris_algos: vec![OrisAlgo::Exact, OrisAlgo::Heur],
            prune: true,
            version: Version::NoRevisit,
            weighted: false,
            exact_budget: ExactOptions::default().state_budget,
        }
    }
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::Infeasible { .. } | Error::Capacity { .. })
}

#[derive(Default)]
struct Acc {
    samples: Vec<Sample>,
    errors: Vec<f64>,
}

fn summarise(cfg: &SweepConfig, value: f64, algo: &str, acc: &Acc) -> RunMetrics {
    let pick = |f: fn(&Sample) -> f64| mean(&acc.samples.iter().map(f).collect::<Vec<_>>());
    let states: Vec<f64> = acc.samples.iter().filter_map(|s| s.peak_states.map(|x| x as f64)).collect();
    RunMetrics {
        param: cfg.param.name().into(),
        value: format!("{value}"),
        algo: algo.into(),
        seed: cfg.seed,
        objective: pick(|s| s.objective),
        relative_error: mean(&acc.errors),
        wall_time_s: pick(|s| s.wall_time_s).unwrap_or(0.0),
        extractions: pick(|s| s.extractions as f64).unwrap_or(0.0),
        relaxations: pick(|s| s.relaxations as f64).unwrap_or(0.0),
        peak_frontier: pick(|s| s.peak_frontier as f64).unwrap_or(0.0),
        peak_states: mean(&states),
    }
}

/// One row per value per algorithm, in value order then algorithm order.
pub fn run_sweep(g: &Graph, cfg: &SweepConfig) -> anyhow::Result<Vec<RunMetrics>> {
    anyhow::ensure!(
        cfg.param.applies_to(cfg.problem),
        "parameter {} does not apply to this problem",
        cfg.param.name()
    );
    let gt = g.transpose();
    let mut rows = Vec::new();
    for &value in &cfg.values {
        match cfg.problem {
            Problem::Oes => {
                let mut accs: Vec<Acc> = cfg.oes_algos.iter().map(|_| Acc::default()).collect();
                for rep in 0..cfg.reps {
                    let mut gen = cfg.oes;
                    gen.seed = cfg.seed + rep as u64;
                    match cfg.param {
                        Param::ClusterDistance => gen.cluster_distance_pct = value,
                        Param::ClusterArea => gen.cluster_area_pct = value,
                        Param::Q => gen.q = value as usize,
                        _ => unreachable!("checked above"),
                    }
                    let inst = gen_oes_instance(g, &gen)?;
                    for (acc, &algo) in accs.iter_mut().zip(&cfg.oes_algos) {
                        match run_oes(g, &gt, &inst.queries, algo, cfg.prune) {
                            Ok((_, s)) => acc.samples.push(s),
                            Err(e) if skippable(&e) => {}
                            Err(e) => return Err(e.into()),
                        }
                    }
                }
                for (acc, algo) in accs.iter().zip(&cfg.oes_algos) {
                    rows.push(summarise(cfg, value, algo.name(), acc));
                }
            }
            Problem::Oris => {
                let mut accs: Vec<Acc> = cfg.oris_algos.iter().map(|_| Acc::default()).collect();
                for rep in 0..cfg.reps {
                    let mut gen = cfg.oris;
                    gen.seed = cfg.seed + rep as u64;
                    let mut weighted = cfg.weighted;
                    match cfg.param {
                        Param::EuclidDistance => gen.euclid_distance_pct = value,
                        Param::QuerySpace => gen.query_space_pct = value,
                        Param::Q => gen.q = value as usize,
                        Param::R1 => gen.r1_pct = Some(value),
                        Param::R5 => {
                            gen.r5 = value;
                            weighted = true;
                        }
                        _ => unreachable!("checked above"),
                    }
                    let inst = gen_oris_instance(g, &gen)?;
                    let ctx = OrisContext::with_transpose(g, &gt, &inst.queries, inst.st, inst.en)?;
                    let mut cons = gen.constraints(ctx.direct);
                    if weighted {
                        cons.objective = gen.weighted_objective();
                    }
                    let heur = HeuristicOptions {
                        version: cfg.version,
                        prune: cfg.prune,
                    };
                    let exact_opts = ExactOptions {
                        early_stop: true,
                        state_budget: cfg.exact_budget,
                    };
                    let mut exact_cost = None;
                    let mut results = Vec::new();
                    for &algo in &cfg.oris_algos {
                        match run_oris(&ctx, &cons, algo, heur, exact_opts) {
                            Ok((_, s)) => {
                                if algo == OrisAlgo::Exact {
                                    exact_cost = Some(s.objective);
                                }
                                results.push(Some(s));
                            }
                            Err(e) if skippable(&e) => results.push(None),
                            Err(e) => return Err(e.into()),
                        }
                    }
                    for ((acc, &algo), s) in accs.iter_mut().zip(&cfg.oris_algos).zip(results) {
                        let Some(s) = s else { continue };
                        if algo == OrisAlgo::Heur {
                            if let Some(e) = exact_cost {
                                acc.errors.push(relative_error(s.objective, e));
                            }
                        }
                        acc.samples.push(s);
                    }
                }
                for (acc, algo) in accs.iter().zip(&cfg.oris_algos) {
                    rows.push(summarise(cfg, value, algo.name(), acc));
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_ranges() {
        assert_eq!(value_range(30.0, 90.0, 15.0, false), vec![30.0, 45.0, 60.0, 75.0, 90.0]);
        assert_eq!(value_range(0.4, 0.8, 0.1, false), vec![0.4, 0.5, 0.6, 0.7, 0.8]);
        assert_eq!(value_range(0.001, 10.0, 10.0, true), vec![0.001, 0.01, 0.1, 1.0, 10.0]);
        assert_eq!(value_range(1.0, 13.0, 3.0, false), vec![1.0, 4.0, 7.0, 10.0, 13.0]);
    }

    #[test]
    fn parameters_belong_to_one_problem() {
        assert!(Param::ClusterArea.applies_to(Problem::Oes));
        assert!(!Param::ClusterArea.applies_to(Problem::Oris));
        assert!(Param::Q.applies_to(Problem::Oris));
        assert!(!Param::R5.applies_to(Problem::Oes));
    }
}
