//! Quantum-inspired artificial bee colony.
//!
//! Every iteration:
//! 1. each individual collapses to a classical plan, which is scored and
//!    stored as its current solution;
//! 2. employee bees rotate each individual's angles, collapse and score
//!    the neighbor, and keep it on strict improvement;
//! 3. `n_pop` onlookers pick individuals with probability proportional to
//!    inverse fitness and do the same;
//! 4. scouts re-randomize individuals whose stagnation counter exceeds the
//!    limit and bump everyone else's counter.
//!
//! The best plan ever scored is tracked outside the population, so scouting
//! never loses it. All draws come from per-(iteration, phase, index)
//! substreams; with the `parallel` feature the per-individual phases run on
//! rayon and produce the same bits as the sequential path.

use alloc::vec::Vec;
use core::f64::consts::PI;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{DecisionVector, Evaluator, ObjectiveConfig};
use crate::quantum::{collapse, neighbor, ObservationWeights, QuantumIndividual};
use crate::rng::{self, Phase};
use crate::scenario::Scenario;

/// Smoothing term in the onlooker inverse-fitness weights.
pub const ONLOOKER_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QabcParams {
    /// Population size N_p.
    pub n_pop: usize,
    /// Iteration count I.
    pub n_iter: usize,
    /// Stagnation limit L.
    pub scout_limit: u32,
    /// Half-width of the uniform rotation step, radians.
    pub phi: f64,
    pub weights: ObservationWeights,
    pub seed: u64,
    /// Run per-individual work on the rayon pool (needs the `parallel` feature).
    #[serde(default)]
    pub parallel: bool,
}

impl Default for QabcParams {
    fn default() -> Self {
        QabcParams {
            n_pop: 30,
            n_iter: 30,
            scout_limit: 10,
            phi: 0.05 * PI,
            weights: ObservationWeights::default(),
            seed: 0,
            parallel: false,
        }
    }
}

impl QabcParams {
    /// N_p = 40, I = 20, L = 15: the best level of each factor in the
    /// published L9 study.
    pub fn paper_best(seed: u64) -> Self {
        QabcParams { n_pop: 40, n_iter: 20, scout_limit: 15, seed, ..QabcParams::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pop < 2 {
            return Err(Error::param("n_pop", "must be >= 2"));
        }
        if self.n_iter == 0 {
            return Err(Error::param("n_iter", "must be >= 1"));
        }
        if self.scout_limit == 0 {
            return Err(Error::param("scout_limit", "must be >= 1"));
        }
        if !(self.phi.is_finite() && self.phi > 0.0) {
            return Err(Error::param("phi", "must be finite and > 0"));
        }
        self.weights.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_decision: DecisionVector,
    pub best_fitness_s: f64,
    /// Best fitness after each iteration; non-increasing.
    pub convergence: Vec<f64>,
    /// Number of fitness evaluations performed.
    pub evaluations: u64,
}

/// One food source: the qubit individual plus its latest scored collapse.
#[derive(Debug, Clone, PartialEq)]
pub struct Bee {
    pub individual: QuantumIndividual,
    pub decision: DecisionVector,
    pub fitness: f64,
}

impl Bee {
    fn unscored(individual: QuantumIndividual) -> Self {
        Bee { individual, decision: DecisionVector(Vec::new()), fitness: f64::INFINITY }
    }
}

/// Search state shared by the phases: objective, parameters, best-so-far
/// and the evaluation counter.
pub struct Search<'a> {
    eval: Evaluator<'a>,
    params: &'a QabcParams,
    best: Option<(DecisionVector, f64)>,
    evaluations: u64,
}

struct Candidate {
    individual: QuantumIndividual,
    decision: DecisionVector,
    fitness: f64,
}

#[cfg(feature = "parallel")]
fn map_indexed<T, F>(parallel: bool, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_indexed<T, F>(_parallel: bool, n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Inverse-fitness selection probabilities `(1/(f+ε)) / Σ (1/(f+ε))`.
///
/// Infinite fitness gets zero weight; if every weight is zero the draw is
/// uniform.
pub fn onlooker_probabilities(fitness: &[f64]) -> Vec<f64> {
    let inv: Vec<f64> = fitness.iter().map(|f| 1.0 / (f + ONLOOKER_EPS)).collect();
    let total: f64 = inv.iter().sum();
    if total > 0.0 && total.is_finite() {
        inv.iter().map(|w| w / total).collect()
    } else {
        alloc::vec![1.0 / fitness.len() as f64; fitness.len()]
    }
}

impl<'a> Search<'a> {
    pub fn new(eval: Evaluator<'a>, params: &'a QabcParams) -> Self {
        Search { eval, params, best: None, evaluations: 0 }
    }

    pub fn best(&self) -> Option<&(DecisionVector, f64)> {
        self.best.as_ref()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    fn record(&mut self, decision: &DecisionVector, fitness: f64) {
        self.evaluations += 1;
        let better = match &self.best {
            None => true,
            Some((_, f)) => fitness < *f,
        };
        if better {
            self.best = Some((decision.clone(), fitness));
        }
    }

    fn candidate(&self, from: &QuantumIndividual, iteration: u64, phase: Phase, index: u64) -> Result<Candidate> {
        let mut rng = rng::stream(self.params.seed, iteration, phase, index);
        let individual = neighbor(from, self.params.phi, &mut rng)?;
        let decision = collapse(&individual, &self.params.weights, &mut rng);
        let fitness = self.eval.fitness(&decision)?;
        Ok(Candidate { individual, decision, fitness })
    }

    fn offer(&mut self, bee: &mut Bee, cand: Candidate) {
        self.record(&cand.decision, cand.fitness);
        if cand.fitness < bee.fitness {
            *bee = Bee { individual: cand.individual, decision: cand.decision, fitness: cand.fitness };
        }
    }

    pub fn initial_population(&self) -> Vec<Bee> {
        let n = self.eval.scenario().task_count();
        (0..self.params.n_pop)
            .map(|a| {
                let mut rng = rng::stream(self.params.seed, 0, Phase::Init, a as u64);
                Bee::unscored(QuantumIndividual::random(n, &mut rng))
            })
            .collect()
    }

    /// Collapses and scores every individual, storing the result.
    pub fn observe_phase(&mut self, bees: &mut [Bee], iteration: u64) -> Result<()> {
        let (eval, params) = (self.eval, self.params);
        let scored = map_indexed(params.parallel, bees.len(), |a| {
            let mut rng = rng::stream(params.seed, iteration, Phase::Observe, a as u64);
            let decision = collapse(&bees[a].individual, &params.weights, &mut rng);
            eval.fitness(&decision).map(|f| (decision, f))
        });
        for (bee, s) in bees.iter_mut().zip(scored) {
            let (decision, fitness) = s?;
            self.record(&decision, fitness);
            bee.decision = decision;
            bee.fitness = fitness;
        }
        Ok(())
    }

    /// One neighbor per individual; strict improvement replaces it and
    /// resets its stagnation counter.
    pub fn employee_phase(&mut self, bees: &mut [Bee], iteration: u64) -> Result<()> {
        let this = &*self;
        let cands = map_indexed(self.params.parallel, bees.len(), |a| {
            this.candidate(&bees[a].individual, iteration, Phase::Employee, a as u64)
        });
        for (bee, cand) in bees.iter_mut().zip(cands) {
            self.offer(bee, cand?);
        }
        Ok(())
    }

    /// `n_pop` roulette draws on the fitness at phase start; each chosen
    /// individual gets the employee step from its current state.
    pub fn onlooker_phase(&mut self, bees: &mut [Bee], iteration: u64) -> Result<()> {
        use rand::Rng;

        let fitness: Vec<f64> = bees.iter().map(|b| b.fitness).collect();
        let mut cumulative = onlooker_probabilities(&fitness);
        let mut acc = 0.0;
        for p in cumulative.iter_mut() {
            acc += *p;
            *p = acc;
        }
        let mut select = rng::stream(self.params.seed, iteration, Phase::OnlookerSelect, 0);
        for o in 0..self.params.n_pop {
            let u = select.gen::<f64>() * acc;
            let a = cumulative.partition_point(|c| *c <= u).min(bees.len() - 1);
            let cand = self.candidate(&bees[a].individual, iteration, Phase::Onlooker, o as u64)?;
            self.offer(&mut bees[a], cand);
        }
        Ok(())
    }

    /// Replaces individuals whose counter exceeds the limit; increments the rest.
    pub fn scout_phase(&self, bees: &mut [Bee], iteration: u64) {
        let n = self.eval.scenario().task_count();
        for (a, bee) in bees.iter_mut().enumerate() {
            if bee.individual.stagnation > self.params.scout_limit {
                let mut rng = rng::stream(self.params.seed, iteration, Phase::Scout, a as u64);
                *bee = Bee::unscored(QuantumIndividual::random(n, &mut rng));
            } else {
                bee.individual.stagnation += 1;
            }
        }
    }

    fn into_result(self, convergence: Vec<f64>) -> OptimizationResult {
        let (best_decision, best_fitness_s) = self.best.expect("at least one evaluation");
        OptimizationResult { best_decision, best_fitness_s, convergence, evaluations: self.evaluations }
    }
}

/// Runs the full colony for `params.n_iter` iterations.
pub fn run_qabc(scenario: &Scenario, objective: &ObjectiveConfig, params: &QabcParams) -> Result<OptimizationResult> {
    params.validate()?;
    let eval = Evaluator::new(scenario, objective)?;
    let mut search = Search::new(eval, params);
    let mut bees = search.initial_population();
    let mut convergence = Vec::with_capacity(params.n_iter);

    for it in 0..params.n_iter as u64 {
        search.observe_phase(&mut bees, it)?;
        search.employee_phase(&mut bees, it)?;
        search.onlooker_phase(&mut bees, it)?;
        search.scout_phase(&mut bees, it);
        convergence.push(search.best().map_or(f64::INFINITY, |b| b.1));
    }
    Ok(search.into_result(convergence))
}
