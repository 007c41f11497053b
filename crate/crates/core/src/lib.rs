//! Latency-minimizing task offloading for vehicular edge/cloud networks.
//!
//! Tasks generated by vehicles are placed on one of three tiers (the
//! vehicle itself, the serving roadside unit, or the cloud). Placements
//! are searched with a quantum-inspired artificial bee colony: every task
//! is a qubit angle whose amplitudes drive a tier distribution, and the
//! colony perturbs those angles with employee, onlooker and scout bees.
//!
//! The crate is `no_std` + `alloc` when the default `std` feature is off.
//! The `parallel` feature fans out per-individual work with rayon; results
//! are bit-identical to the sequential path because every individual draws
//! from its own pre-assigned random substream.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod doe;
pub mod error;
pub mod latency;
pub mod objective;
pub mod oracle;
pub mod qabc;
pub mod quantum;
pub mod radio;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use latency::{QueueMode, QueueState};
pub use objective::{evaluate, is_feasible, DecisionVector, Evaluator, FitnessReport, ObjectiveConfig, Tier};
pub use oracle::{brute_force_oracle, run_baseline, BaselineKind, ORACLE_MAX_TASKS};
pub use qabc::{run_qabc, OptimizationResult, QabcParams};
pub use quantum::{ObservationWeights, QuantumIndividual, QubitGene};
pub use radio::{data_rate, LinkRate};
pub use scenario::{
    generate_scenario, serving_rsu, ChannelParams, CloudNode, GenerationParams, Range, RawScenario, RsuNode, Scenario,
    TaskSpec, VehicleNode,
};
