//! Cross-check of the colony against exhaustive enumeration.

use qabc_core::rng::derive_seed;
use qabc_core::{
    brute_force_oracle, run_baseline, run_qabc, BaselineKind, DecisionVector, ObjectiveConfig, QabcParams, Scenario,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::record::lossless_f64;

/// Relative tolerance for counting a run as reaching the optimum.
pub const HIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineOutcome {
    pub kind: BaselineKind,
    #[serde(with = "lossless_f64")]
    pub fitness_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub task_count: usize,
    pub oracle_decision: DecisionVector,
    #[serde(with = "lossless_f64")]
    pub oracle_fitness_s: f64,
    pub oracle_evaluations: u64,
    pub params: QabcParams,
    pub runs: usize,
    /// Seed of each run, derived from `params.seed` and the run index.
    pub seeds: Vec<u64>,
    #[serde(with = "lossless_f64::vec")]
    pub run_fitness_s: Vec<f64>,
    pub hits: usize,
    pub hit_rate: f64,
    /// Runs that reported a fitness below the oracle minimum (must be 0).
    pub below_oracle: usize,
    /// Relative gap `(f - f*) / f*` statistics over all runs.
    #[serde(with = "lossless_f64")]
    pub mean_gap: f64,
    #[serde(with = "lossless_f64")]
    pub max_gap: f64,
    pub baselines: Vec<BaselineOutcome>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("verify report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn is_hit(f: f64, opt: f64) -> bool {
    f == opt || (f - opt).abs() <= HIT_TOLERANCE * opt.abs().max(1.0)
}

fn gap(f: f64, opt: f64) -> f64 {
    if f == opt {
        0.0
    } else if opt > 0.0 {
        (f - opt) / opt
    } else {
        f - opt
    }
}

/// Runs the oracle, `runs` seeded colony runs and the baselines.
///
/// With `parallel` the runs execute on the rayon pool; every run has its
/// own derived seed so the report does not depend on scheduling.
pub fn run_verify(
    scenario: &Scenario,
    objective: &ObjectiveConfig,
    params: &QabcParams,
    runs: usize,
    parallel: bool,
) -> Result<VerifyReport> {
    let oracle = brute_force_oracle(scenario, objective)?;
    let opt = oracle.best_fitness_s;

    let seeds: Vec<u64> = (0..runs as u64).map(|k| derive_seed(params.seed, &[k])).collect();
    let one = |seed: &u64| run_qabc(scenario, objective, &QabcParams { seed: *seed, ..params.clone() });
    let results =
        if parallel { seeds.par_iter().map(one).collect::<Vec<_>>() } else { seeds.iter().map(one).collect() };
    let run_fitness_s =
        results.into_iter().map(|r| r.map(|r| r.best_fitness_s)).collect::<qabc_core::Result<Vec<_>>>()?;

    let hits = run_fitness_s.iter().filter(|f| is_hit(**f, opt)).count();
    let below_oracle = run_fitness_s.iter().filter(|f| **f < opt && !is_hit(**f, opt)).count();
    let gaps: Vec<f64> = run_fitness_s.iter().map(|f| gap(*f, opt)).collect();
    let (mean_gap, max_gap) = if gaps.is_empty() {
        (0.0, 0.0)
    } else {
        (gaps.iter().sum::<f64>() / gaps.len() as f64, gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };

    let baselines = [
        BaselineKind::AllLocal,
        BaselineKind::AllEdge,
        BaselineKind::AllCloud,
        BaselineKind::UniformRandom { seed: params.seed },
    ]
    .into_iter()
    .map(|kind| Ok(BaselineOutcome { kind, fitness_s: run_baseline(scenario, objective, kind)?.best_fitness_s }))
    .collect::<Result<Vec<_>>>()?;

    Ok(VerifyReport {
        task_count: scenario.task_count(),
        oracle_decision: oracle.best_decision,
        oracle_fitness_s: opt,
        oracle_evaluations: oracle.evaluations,
        params: params.clone(),
        runs,
        seeds,
        run_fitness_s,
        hits,
        hit_rate: if runs == 0 { 0.0 } else { hits as f64 / runs as f64 },
        below_oracle,
        mean_gap,
        max_gap,
        baselines,
    })
}
