//! Qubit encoding of offloading plans.
//!
//! Each task carries one qubit `cos θ |0> + sin θ |1>` with `θ ∈ [0, π/2]`.
//! Observation splits the mass: `1 - β²` goes to local execution and `β²`
//! is shared by edge and cloud, each side scaled by its η weight and the
//! three renormalized.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{DecisionVector, Tier};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitGene {
    pub theta: f64,
}

impl QubitGene {
    pub fn new(theta: f64) -> Self {
        QubitGene { theta: theta.clamp(0.0, FRAC_PI_2) }
    }

    pub fn alpha(&self) -> f64 {
        libm::cos(self.theta)
    }

    pub fn beta(&self) -> f64 {
        libm::sin(self.theta)
    }

    /// Probability mass `|β|²` of the offload state.
    pub fn beta_sq(&self) -> f64 {
        let b = self.beta();
        b * b
    }

    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        QubitGene { theta: FRAC_PI_2 * rng.gen::<f64>() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationWeights {
    pub eta0: f64,
    pub eta1: f64,
    pub eta2: f64,
}

impl Default for ObservationWeights {
    fn default() -> Self {
        ObservationWeights { eta0: 0.5, eta1: 0.2, eta2: 0.3 }
    }
}

impl ObservationWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eta0", self.eta0), ("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, alloc::format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumIndividual {
    pub genes: Vec<QubitGene>,
    pub stagnation: u32,
}

impl QuantumIndividual {
    /// Fresh individual with every angle uniform on `[0, π/2]`.
    pub fn random<R: Rng + ?Sized>(n_tasks: usize, rng: &mut R) -> Self {
        QuantumIndividual { genes: (0..n_tasks).map(|_| QubitGene::random(rng)).collect(), stagnation: 0 }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }
}

pub fn init_population<R: Rng + ?Sized>(n_pop: usize, n_tasks: usize, rng: &mut R) -> Result<Vec<QuantumIndividual>> {
    if n_pop == 0 {
        return Err(Error::param("n_pop", "must be >= 1"));
    }
    if n_tasks == 0 {
        return Err(Error::param("n_tasks", "must be >= 1"));
    }
    Ok((0..n_pop).map(|_| QuantumIndividual::random(n_tasks, rng)).collect())
}

/// `(p_local, p_edge, p_cloud)` for a given `|β|²`.
pub fn tier_probabilities_for(beta_sq: f64, w: &ObservationWeights) -> [f64; 3] {
    let local = (1.0 - beta_sq) * w.eta0;
    let edge = beta_sq * w.eta1;
    let cloud = beta_sq * w.eta2;
    let norm = local + edge + cloud;
    [local / norm, edge / norm, cloud / norm]
}

pub fn tier_probabilities(gene: &QubitGene, w: &ObservationWeights) -> [f64; 3] {
    tier_probabilities_for(gene.beta_sq(), w)
}

/// Inverse-CDF draw over (local, edge, cloud) in that order.
pub fn observe<R: Rng + ?Sized>(gene: &QubitGene, w: &ObservationWeights, rng: &mut R) -> Tier {
    let [local, edge, _] = tier_probabilities(gene, w);
    let u = rng.gen::<f64>();
    if u < local {
        Tier::Local
    } else if u < local + edge {
        Tier::Edge
    } else {
        Tier::Cloud
    }
}

/// Samples a classical plan, one draw per gene in task order.
pub fn collapse<R: Rng + ?Sized>(ind: &QuantumIndividual, w: &ObservationWeights, rng: &mut R) -> DecisionVector {
    DecisionVector(ind.genes.iter().map(|g| observe(g, w, rng)).collect())
}

/// Rotates every angle by an independent `U(-phi, phi)` step, clamped to
/// `[0, π/2]`. The result starts with a zero stagnation counter.
pub fn neighbor<R: Rng + ?Sized>(ind: &QuantumIndividual, phi: f64, rng: &mut R) -> Result<QuantumIndividual> {
    if !(phi.is_finite() && phi > 0.0) {
        return Err(Error::param("phi", alloc::format!("must be finite and > 0, got {phi}")));
    }
    let genes = ind
        .genes
        .iter()
        .map(|g| {
            let eps = phi * (2.0 * rng.gen::<f64>() - 1.0);
            QubitGene::new(g.theta + eps)
        })
        .collect();
    Ok(QuantumIndividual { genes, stagnation: 0 })
}
