//! Weighted total-latency objective with penalty-based capacity handling.
//!
//! A [`DecisionVector`] holds exactly one [`Tier`] per task, so the
//! one-tier-per-task and binary-assignment constraints hold by construction.
//! The per-server cycle budget is enforced by a penalty proportional to the
//! relative overload, and deadline misses are counted (and optionally
//! penalized).

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latency::{cloud_time, edge_time, local_time, QueueMode, QueueState};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
#[repr(u8)]
pub enum Tier {
    Local = 0,
    Edge = 1,
    Cloud = 2,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Local, Tier::Edge, Tier::Cloud];

    /// One-hot view `(x_local, x_edge, x_cloud)`.
    pub fn one_hot(self) -> [u8; 3] {
        let mut x = [0; 3];
        x[self as usize] = 1;
        x
    }
}

impl From<Tier> for u8 {
    fn from(t: Tier) -> u8 {
        t as u8
    }
}

impl TryFrom<u8> for Tier {
    type Error = Error;

    fn try_from(v: u8) -> Result<Tier> {
        match v {
            0 => Ok(Tier::Local),
            1 => Ok(Tier::Edge),
            2 => Ok(Tier::Cloud),
            _ => Err(Error::validation("tier", alloc::format!("{v} is not in {{0, 1, 2}}"))),
        }
    }
}

/// Classical offloading plan indexed by global task index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionVector(pub Vec<Tier>);

impl DecisionVector {
    pub fn uniform(tier: Tier, len: usize) -> Self {
        DecisionVector(alloc::vec![tier; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.0
    }
}

/// Weights, penalties and queue model of the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveConfig {
    pub queue_mode: QueueMode,
    /// Seconds charged per unit of relative capacity excess.
    pub lambda_cap: f64,
    /// Seconds charged per missed deadline.
    pub lambda_deadline: f64,
    /// Per-task weights in global task order; empty means all 1.
    #[serde(default)]
    pub task_weights: Vec<f64>,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            queue_mode: QueueMode::LoadAware,
            lambda_cap: 1e3,
            lambda_deadline: 0.0,
            task_weights: Vec::new(),
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self, task_count: usize) -> Result<()> {
        if !(self.lambda_cap.is_finite() && self.lambda_cap >= 0.0) {
            return Err(Error::param("lambda_cap", "must be finite and >= 0"));
        }
        if !(self.lambda_deadline.is_finite() && self.lambda_deadline >= 0.0) {
            return Err(Error::param("lambda_deadline", "must be finite and >= 0"));
        }
        if let QueueMode::Constant { q_edge_s, q_cloud_s } = self.queue_mode {
            if !(q_edge_s.is_finite() && q_edge_s >= 0.0 && q_cloud_s.is_finite() && q_cloud_s >= 0.0) {
                return Err(Error::param("queue_mode", "constant queue times must be finite and >= 0"));
            }
        }
        if !self.task_weights.is_empty() {
            if self.task_weights.len() != task_count {
                return Err(Error::param(
                    "task_weights",
                    alloc::format!("{} weights for {task_count} tasks", self.task_weights.len()),
                ));
            }
            if self.task_weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                return Err(Error::param("task_weights", "weights must be finite and > 0"));
            }
        }
        Ok(())
    }

    fn weight(&self, i: usize) -> f64 {
        self.task_weights.get(i).copied().unwrap_or(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    /// Weighted sum of per-task times; `+inf` if some task's tier is unreachable.
    pub total_latency_s: f64,
    /// Unweighted completion time of each task.
    pub per_task_s: Vec<f64>,
    /// Cycles above budget for each RSU (scenario order) followed by the cloud.
    pub capacity_excess_cycles: Vec<f64>,
    pub deadline_misses: usize,
    pub penalized_fitness: f64,
}

/// Objective bound to one scenario and configuration.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    config: &'a ObjectiveConfig,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario, config: &'a ObjectiveConfig) -> Result<Self> {
        config.validate(scenario.task_count())?;
        Ok(Evaluator { scenario, config })
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn config(&self) -> &'a ObjectiveConfig {
        self.config
    }

    pub fn evaluate(&self, decision: &DecisionVector) -> Result<FitnessReport> {
        let sc = self.scenario;
        if decision.len() != sc.task_count() {
            return Err(Error::LengthMismatch { expected: sc.task_count(), got: decision.len() });
        }

        let mut queues = QueueState::new(sc.rsus().len(), self.config.queue_mode);
        let mut per_task_s = Vec::with_capacity(decision.len());
        let mut total = 0.0;
        let mut deadline_misses = 0;

        for (i, (slot, tier)) in sc.slots().iter().zip(decision.tiers()).enumerate() {
            let task = sc.task(slot);
            let vehicle = &sc.vehicles()[slot.vehicle];
            let rsu = &sc.rsus()[slot.rsu];
            let t = match tier {
                Tier::Local => Ok(local_time(task, vehicle)),
                Tier::Edge => edge_time(task, vehicle, rsu, sc.channel(), &mut queues.rsus[slot.rsu]),
                Tier::Cloud => cloud_time(task, vehicle, rsu, sc.cloud(), sc.channel(), &mut queues.cloud),
            }
            .unwrap_or(f64::INFINITY);
            if t > task.deadline_s {
                deadline_misses += 1;
            }
            total += self.config.weight(i) * t;
            per_task_s.push(t);
        }

        let budgets = sc.rsus().iter().map(|r| r.cpu_capacity_cycles).chain([sc.cloud().cpu_capacity_cycles]);
        let loads = queues.rsus.iter().map(|q| q.cycles).chain([queues.cloud.cycles]);
        let mut relative_excess = 0.0;
        let capacity_excess_cycles = loads
            .zip(budgets)
            .map(|(load, budget)| {
                let excess = (load - budget).max(0.0);
                relative_excess += excess / budget;
                excess
            })
            .collect();

        let mut penalized_fitness = total;
        if relative_excess > 0.0 {
            penalized_fitness += self.config.lambda_cap * relative_excess;
        }
        if deadline_misses > 0 {
            penalized_fitness += self.config.lambda_deadline * deadline_misses as f64;
        }

        Ok(FitnessReport {
            total_latency_s: total,
            per_task_s,
            capacity_excess_cycles,
            deadline_misses,
            penalized_fitness,
        })
    }

    /// Penalized fitness only.
    pub fn fitness(&self, decision: &DecisionVector) -> Result<f64> {
        self.evaluate(decision).map(|r| r.penalized_fitness)
    }
}

/// Evaluates `decision` against `scenario`, tasks taken in ascending global
/// index with empty queues.
pub fn evaluate(scenario: &Scenario, decision: &DecisionVector, config: &ObjectiveConfig) -> Result<FitnessReport> {
    Evaluator::new(scenario, config)?.evaluate(decision)
}

/// No server over its cycle budget and every tier reachable.
pub fn is_feasible(report: &FitnessReport) -> bool {
    report.total_latency_s.is_finite() && report.capacity_excess_cycles.iter().all(|e| *e == 0.0)
}
