//! Exhaustive optimum and fixed-policy baselines.

use alloc::vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{DecisionVector, Evaluator, ObjectiveConfig, Tier};
use crate::qabc::OptimizationResult;
use crate::rng::{self, Phase};
use crate::scenario::Scenario;

/// Largest task count the oracle enumerates (3^12 = 531441 plans).
pub const ORACLE_MAX_TASKS: usize = 12;

/// Minimum penalized fitness over all `3^N_t` plans. Ties go to the
/// lexicographically smallest plan (local < edge < cloud, task 0 first).
pub fn brute_force_oracle(scenario: &Scenario, objective: &ObjectiveConfig) -> Result<OptimizationResult> {
    let n = scenario.task_count();
    if n > ORACLE_MAX_TASKS {
        return Err(Error::OracleTooLarge { tasks: n, max: ORACLE_MAX_TASKS });
    }
    let eval = Evaluator::new(scenario, objective)?;

    let mut digits = vec![0u8; n];
    let mut plan = DecisionVector::uniform(Tier::Local, n);
    let mut best: Option<(DecisionVector, f64)> = None;
    let mut evaluations = 0u64;
    loop {
        for (t, d) in plan.0.iter_mut().zip(&digits) {
            *t = Tier::ALL[*d as usize];
        }
        let f = eval.fitness(&plan)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((plan.clone(), f));
        }
        // odometer increment, last task least significant
        let mut i = n;
        loop {
            if i == 0 {
                let (best_decision, best_fitness_s) = best.expect("non-empty enumeration");
                return Ok(OptimizationResult {
                    best_decision,
                    best_fitness_s,
                    convergence: vec![best_fitness_s],
                    evaluations,
                });
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    AllLocal,
    AllEdge,
    AllCloud,
    /// Each task's tier drawn uniformly from {local, edge, cloud}.
    UniformRandom {
        seed: u64,
    },
}

pub fn run_baseline(
    scenario: &Scenario,
    objective: &ObjectiveConfig,
    kind: BaselineKind,
) -> Result<OptimizationResult> {
    let n = scenario.task_count();
    let plan = match kind {
        BaselineKind::AllLocal => DecisionVector::uniform(Tier::Local, n),
        BaselineKind::AllEdge => DecisionVector::uniform(Tier::Edge, n),
        BaselineKind::AllCloud => DecisionVector::uniform(Tier::Cloud, n),
        BaselineKind::UniformRandom { seed } => {
            let mut rng = rng::stream(seed, 0, Phase::Baseline, 0);
            DecisionVector((0..n).map(|_| Tier::ALL[rng.gen_range(0..3)]).collect())
        }
    };
    let f = Evaluator::new(scenario, objective)?.fitness(&plan)?;
    Ok(OptimizationResult { best_decision: plan, best_fitness_s: f, convergence: vec![f], evaluations: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::evaluate;
    use crate::scenario::tests::{raw, rsu, task, vehicle};
    use crate::scenario::{generate_scenario, GenerationParams};

    fn tier_times(local: f64, edge: f64, cloud: f64) -> Scenario {
        // zero-data task on a 1 GHz vehicle, 1 GHz RSU, 1 GHz cloud with
        // propagation delay chosen to hit the requested cloud time
        let c = local * 1e9;
        let mut r = rsu(0, 0.0, 10.0);
        r.mec_hz = c / edge;
        let mut s = raw(vec![vehicle(0, 0.0, vec![task(c, 0.0)])], vec![r]);
        s.cloud.cpu_hz = 1e12;
        s.cloud.prop_delay_s = cloud - c / 1e12;
        Scenario::new(s).unwrap()
    }

    #[test]
    fn single_task_argmin() {
        let s = tier_times(2.0, 1.0, 3.0);
        let r = brute_force_oracle(&s, &ObjectiveConfig::default()).unwrap();
        assert_eq!(r.best_decision.tiers(), &[Tier::Edge]);
        assert!((r.best_fitness_s - 1.0).abs() < 1e-12);
        assert_eq!(r.evaluations, 3);
    }

    #[test]
    fn ties_go_to_smallest_plan() {
        let s = tier_times(1.0, 1.0, 2.0);
        let r = brute_force_oracle(&s, &ObjectiveConfig::default()).unwrap();
        assert_eq!(r.best_decision.tiers(), &[Tier::Local]);
    }

    #[test]
    fn ten_tasks_enumerate_59049_plans() {
        let s = generate_scenario(&GenerationParams::with_counts(5, 2, 2), 1).unwrap();
        let r = brute_force_oracle(&s, &ObjectiveConfig::default()).unwrap();
        assert_eq!(r.evaluations, 59049);
    }

    #[test]
    fn oversize_refused() {
        let s = generate_scenario(&GenerationParams::with_counts(13, 2, 1), 1).unwrap();
        assert_eq!(
            brute_force_oracle(&s, &ObjectiveConfig::default()).unwrap_err(),
            Error::OracleTooLarge { tasks: 13, max: 12 }
        );
    }

    #[test]
    fn oracle_value_matches_evaluate() {
        let s = generate_scenario(&GenerationParams::with_counts(3, 2, 2), 9).unwrap();
        let cfg = ObjectiveConfig::default();
        let r = brute_force_oracle(&s, &cfg).unwrap();
        assert_eq!(evaluate(&s, &r.best_decision, &cfg).unwrap().penalized_fitness, r.best_fitness_s);
        for kind in [BaselineKind::AllLocal, BaselineKind::AllEdge, BaselineKind::AllCloud] {
            assert!(run_baseline(&s, &cfg, kind).unwrap().best_fitness_s >= r.best_fitness_s);
        }
    }

    #[test]
    fn all_local_baseline() {
        let s =
            Scenario::new(raw(vec![vehicle(0, 0.0, vec![task(1e9, 1e6), task(2e9, 1e6)])], vec![rsu(0, 0.0, 10.0)]))
                .unwrap();
        let r = run_baseline(&s, &ObjectiveConfig::default(), BaselineKind::AllLocal).unwrap();
        assert_eq!(r.best_fitness_s, 3.0);
        assert_eq!(r.convergence, vec![3.0]);
    }

    #[test]
    fn all_edge_queues_on_single_rsu() {
        let s = Scenario::new(raw(
            vec![vehicle(0, 0.0, vec![task(1e9, 0.0)]), vehicle(1, 5.0, vec![task(1e9, 0.0)])],
            vec![rsu(0, 0.0, 10.0)],
        ))
        .unwrap();
        let cfg = ObjectiveConfig::default();
        let r = run_baseline(&s, &cfg, BaselineKind::AllEdge).unwrap();
        let rep = evaluate(&s, &r.best_decision, &cfg).unwrap();
        assert_eq!(rep.per_task_s, vec![0.5, 1.0]);
    }

    #[test]
    fn random_baseline_is_seeded() {
        let s = generate_scenario(&GenerationParams::with_counts(4, 2, 3), 2).unwrap();
        let cfg = ObjectiveConfig::default();
        let a = run_baseline(&s, &cfg, BaselineKind::UniformRandom { seed: 5 }).unwrap();
        assert_eq!(a, run_baseline(&s, &cfg, BaselineKind::UniformRandom { seed: 5 }).unwrap());
    }
}
