//! Network snapshot: vehicles with their tasks, RSUs with MEC servers, the
//! cloud, and shared channel parameters.
//!
//! A [`Scenario`] can only be obtained through validation, so downstream
//! code relies on its invariants: finite positive rates and frequencies,
//! unique ids, at least one task, and every vehicle inside the coverage
//! radius of some RSU.

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    /// CPU cycles required.
    pub cycles: f64,
    /// Input data to upload, in bits.
    pub input_bits: f64,
    pub deadline_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleNode {
    pub id: u32,
    pub position_m: f64,
    pub cpu_hz: f64,
    pub tx_power_w: f64,
    /// Dimensionless; path loss is folded in.
    pub antenna_gain: f64,
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RsuNode {
    pub id: u32,
    pub position_m: f64,
    pub range_m: f64,
    pub mec_hz: f64,
    /// Cycles the MEC server may accept over the scheduling horizon.
    pub cpu_capacity_cycles: f64,
    /// RSU to cloud fiber rate.
    pub backhaul_bps: f64,
    #[serde(default)]
    pub interference_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudNode {
    pub cpu_hz: f64,
    pub prop_delay_s: f64,
    pub cpu_capacity_cycles: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    pub bandwidth_hz: f64,
    pub noise_w: f64,
}

/// Unvalidated scenario document, as read from a file.
///
/// `horizon_s` may be omitted, in which case the largest task deadline is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub channel: ChannelParams,
    pub cloud: CloudNode,
    pub rsus: Vec<RsuNode>,
    pub vehicles: Vec<VehicleNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon_s: Option<f64>,
}

/// Position of one task in the flattened global task list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskSlot {
    pub vehicle: usize,
    pub task: usize,
    /// Index into [`Scenario::rsus`] of the serving RSU.
    pub rsu: usize,
}

/// Validated, immutable network snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    channel: ChannelParams,
    cloud: CloudNode,
    rsus: Vec<RsuNode>,
    vehicles: Vec<VehicleNode>,
    horizon_s: f64,
    #[serde(skip)]
    slots: Vec<TaskSlot>,
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if finite(field, v)? > 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<()> {
    if finite(field, v)? >= 0.0 {
        Ok(())
    } else {
        Err(Error::validation(field, format!("must be >= 0, got {v}")))
    }
}

fn covers(rsu: &RsuNode, position_m: f64) -> bool {
    libm::fabs(position_m - rsu.position_m) <= rsu.range_m
}

fn nearest_covering(rsus: &[RsuNode], position_m: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in rsus.iter().enumerate() {
        if !covers(r, position_m) {
            continue;
        }
        let d = libm::fabs(position_m - r.position_m);
        best = match best {
            Some((b, bd)) if bd < d || (bd == d && rsus[b].id < r.id) => Some((b, bd)),
            _ => Some((i, d)),
        };
    }
    best.map(|(i, _)| i)
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        Scenario::new(raw)
    }
}

impl Scenario {
    pub fn new(raw: RawScenario) -> Result<Self> {
        let RawScenario { channel, cloud, rsus, vehicles, horizon_s } = raw;

        positive("channel.bandwidth_hz", channel.bandwidth_hz)?;
        positive("channel.noise_w", channel.noise_w)?;
        positive("cloud.cpu_hz", cloud.cpu_hz)?;
        non_negative("cloud.prop_delay_s", cloud.prop_delay_s)?;
        positive("cloud.cpu_capacity_cycles", cloud.cpu_capacity_cycles)?;

        if rsus.is_empty() {
            return Err(Error::validation("rsus", "at least one RSU is required"));
        }
        for (i, r) in rsus.iter().enumerate() {
            let f = |name: &str| format!("rsus[{i}].{name}");
            finite(&f("position_m"), r.position_m)?;
            positive(&f("range_m"), r.range_m)?;
            positive(&f("mec_hz"), r.mec_hz)?;
            positive(&f("cpu_capacity_cycles"), r.cpu_capacity_cycles)?;
            positive(&f("backhaul_bps"), r.backhaul_bps)?;
            non_negative(&f("interference_w"), r.interference_w)?;
            if rsus[..i].iter().any(|o| o.id == r.id) {
                return Err(Error::validation(f("id"), format!("duplicate RSU id {}", r.id)));
            }
        }

        if vehicles.is_empty() {
            return Err(Error::validation("vehicles", "at least one vehicle is required"));
        }
        let mut slots = Vec::new();
        let mut max_deadline = 0.0f64;
        for (vi, v) in vehicles.iter().enumerate() {
            let f = |name: &str| format!("vehicles[{vi}].{name}");
            finite(&f("position_m"), v.position_m)?;
            positive(&f("cpu_hz"), v.cpu_hz)?;
            non_negative(&f("tx_power_w"), v.tx_power_w)?;
            positive(&f("antenna_gain"), v.antenna_gain)?;
            if vehicles[..vi].iter().any(|o| o.id == v.id) {
                return Err(Error::validation(f("id"), format!("duplicate vehicle id {}", v.id)));
            }
            let rsu = nearest_covering(&rsus, v.position_m)
                .ok_or(Error::Uncovered { vehicle: v.id, position_m: v.position_m })?;
            for (ti, t) in v.tasks.iter().enumerate() {
                let f = |name: &str| format!("vehicles[{vi}].tasks[{ti}].{name}");
                non_negative(&f("cycles"), t.cycles)?;
                non_negative(&f("input_bits"), t.input_bits)?;
                positive(&f("deadline_s"), t.deadline_s)?;
                max_deadline = max_deadline.max(t.deadline_s);
                slots.push(TaskSlot { vehicle: vi, task: ti, rsu });
            }
        }
        if slots.is_empty() {
            return Err(Error::validation("vehicles[].tasks", "at least one task is required"));
        }

        let horizon_s = horizon_s.unwrap_or(max_deadline);
        positive("horizon_s", horizon_s)?;

        Ok(Scenario { channel, cloud, rsus, vehicles, horizon_s, slots })
    }

    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn cloud(&self) -> &CloudNode {
        &self.cloud
    }

    pub fn rsus(&self) -> &[RsuNode] {
        &self.rsus
    }

    pub fn vehicles(&self) -> &[VehicleNode] {
        &self.vehicles
    }

    pub fn horizon_s(&self) -> f64 {
        self.horizon_s
    }

    /// Total task count N_t across all vehicles.
    pub fn task_count(&self) -> usize {
        self.slots.len()
    }

    /// Flattened task list in global index order (vehicle order, then task order).
    pub fn slots(&self) -> &[TaskSlot] {
        &self.slots
    }

    pub fn task(&self, slot: &TaskSlot) -> &TaskSpec {
        &self.vehicles[slot.vehicle].tasks[slot.task]
    }

    pub fn to_raw(&self) -> RawScenario {
        RawScenario {
            channel: self.channel.clone(),
            cloud: self.cloud.clone(),
            rsus: self.rsus.clone(),
            vehicles: self.vehicles.clone(),
            horizon_s: Some(self.horizon_s),
        }
    }
}

/// Nearest RSU whose range covers `vehicle`, ties going to the lowest id.
///
/// Valid scenarios guarantee that such an RSU exists for their own
/// vehicles; a foreign vehicle outside all ranges panics.
pub fn serving_rsu<'a>(scenario: &'a Scenario, vehicle: &VehicleNode) -> &'a RsuNode {
    let idx = nearest_covering(&scenario.rsus, vehicle.position_m).expect("vehicle outside every RSU range");
    &scenario.rsus[idx]
}

/// Closed interval sampled uniformly during generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Range { min, max }
    }

    pub const fn fixed(v: f64) -> Self {
        Range { min: v, max: v }
    }

    fn check(&self, field: &str, lower_positive: bool) -> Result<()> {
        finite(field, self.min)?;
        finite(field, self.max)?;
        if self.min > self.max {
            return Err(Error::validation(field, format!("min {} exceeds max {}", self.min, self.max)));
        }
        if lower_positive {
            positive(field, self.min)
        } else {
            non_negative(field, self.min)
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.min + (self.max - self.min) * rng.gen::<f64>()
    }
}

/// Inputs to [`generate_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationParams {
    pub vehicles: usize,
    pub rsus: usize,
    pub tasks_per_vehicle: usize,
    /// Length of the straight highway segment; vehicles are placed on `[0, highway_m]`.
    pub highway_m: f64,
    pub rsu_range_m: f64,
    pub cycles: Range,
    pub input_bits: Range,
    pub deadline_s: Range,
    pub vehicle_cpu_hz: Range,
    pub tx_power_w: Range,
    pub antenna_gain: Range,
    pub mec_hz: Range,
    pub rsu_capacity_cycles: Range,
    pub backhaul_bps: Range,
    pub interference_w: f64,
    pub cloud_hz: f64,
    pub cloud_prop_delay_s: f64,
    pub cloud_capacity_cycles: f64,
    pub bandwidth_hz: f64,
    pub noise_w: f64,
}

impl GenerationParams {
    /// Defaults with the given counts; highway length grows with the RSU count
    /// so the default range always covers it.
    pub fn with_counts(vehicles: usize, rsus: usize, tasks_per_vehicle: usize) -> Self {
        GenerationParams {
            vehicles,
            rsus,
            tasks_per_vehicle,
            highway_m: 400.0 * rsus.max(1) as f64,
            rsu_range_m: 250.0,
            cycles: Range::new(2e8, 1.5e9),
            input_bits: Range::new(1e5, 4e6),
            deadline_s: Range::new(0.5, 2.0),
            vehicle_cpu_hz: Range::new(5e8, 1.5e9),
            tx_power_w: Range::new(0.1, 0.3),
            antenna_gain: Range::new(1e-10, 1e-9),
            mec_hz: Range::new(4e9, 8e9),
            rsu_capacity_cycles: Range::new(5e9, 1e10),
            backhaul_bps: Range::new(1e9, 1e9),
            interference_w: 0.0,
            cloud_hz: 2e10,
            cloud_prop_delay_s: 0.05,
            cloud_capacity_cycles: 1e12,
            bandwidth_hz: 1e7,
            noise_w: 1e-13,
        }
    }

    fn check(&self) -> Result<()> {
        if self.vehicles == 0 {
            return Err(Error::param("vehicles", "must be >= 1"));
        }
        if self.rsus == 0 {
            return Err(Error::param("rsus", "must be >= 1"));
        }
        if self.tasks_per_vehicle == 0 {
            return Err(Error::param("tasks_per_vehicle", "must be >= 1"));
        }
        positive("highway_m", self.highway_m)?;
        positive("rsu_range_m", self.rsu_range_m)?;
        self.cycles.check("cycles", false)?;
        self.input_bits.check("input_bits", false)?;
        self.deadline_s.check("deadline_s", true)?;
        self.vehicle_cpu_hz.check("vehicle_cpu_hz", true)?;
        self.tx_power_w.check("tx_power_w", false)?;
        self.antenna_gain.check("antenna_gain", true)?;
        self.mec_hz.check("mec_hz", true)?;
        self.rsu_capacity_cycles.check("rsu_capacity_cycles", true)?;
        self.backhaul_bps.check("backhaul_bps", true)?;
        non_negative("interference_w", self.interference_w)?;
        positive("cloud_hz", self.cloud_hz)?;
        non_negative("cloud_prop_delay_s", self.cloud_prop_delay_s)?;
        positive("cloud_capacity_cycles", self.cloud_capacity_cycles)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("noise_w", self.noise_w)?;

        // Evenly spaced RSUs leave no gap iff each radius spans half the spacing.
        let half_spacing = self.highway_m / (2.0 * self.rsus as f64);
        if self.rsu_range_m < half_spacing {
            return Err(Error::validation(
                "rsu_range_m",
                format!(
                    "{} m RSUs spaced {} m apart leave parts of the {} m highway uncovered",
                    self.rsu_range_m,
                    2.0 * half_spacing,
                    self.highway_m
                ),
            ));
        }
        Ok(())
    }
}

/// Draws a random scenario; equal `(params, seed)` give identical scenarios.
///
/// RSUs sit at the centres of `rsus` equal-length cells of the highway.
pub fn generate_scenario(params: &GenerationParams, seed: u64) -> Result<Scenario> {
    params.check()?;
    let mut rng = rng::seeded(seed);
    let spacing = params.highway_m / params.rsus as f64;

    let rsus = (0..params.rsus)
        .map(|j| RsuNode {
            id: j as u32,
            position_m: (j as f64 + 0.5) * spacing,
            range_m: params.rsu_range_m,
            mec_hz: params.mec_hz.sample(&mut rng),
            cpu_capacity_cycles: params.rsu_capacity_cycles.sample(&mut rng),
            backhaul_bps: params.backhaul_bps.sample(&mut rng),
            interference_w: params.interference_w,
        })
        .collect();

    let vehicles = (0..params.vehicles)
        .map(|k| {
            let position_m = params.highway_m * rng.gen::<f64>();
            let cpu_hz = params.vehicle_cpu_hz.sample(&mut rng);
            let tx_power_w = params.tx_power_w.sample(&mut rng);
            let antenna_gain = params.antenna_gain.sample(&mut rng);
            let tasks = (0..params.tasks_per_vehicle)
                .map(|_| TaskSpec {
                    cycles: params.cycles.sample(&mut rng),
                    input_bits: params.input_bits.sample(&mut rng),
                    deadline_s: params.deadline_s.sample(&mut rng),
                })
                .collect();
            VehicleNode { id: k as u32, position_m, cpu_hz, tx_power_w, antenna_gain, tasks }
        })
        .collect();

    Scenario::new(RawScenario {
        channel: ChannelParams { bandwidth_hz: params.bandwidth_hz, noise_w: params.noise_w },
        cloud: CloudNode {
            cpu_hz: params.cloud_hz,
            prop_delay_s: params.cloud_prop_delay_s,
            cpu_capacity_cycles: params.cloud_capacity_cycles,
        },
        rsus,
        vehicles,
        horizon_s: None,
    })
}

/// Field name carried by a validation error, for diagnostics.
pub fn error_field(err: &Error) -> Option<&str> {
    match err {
        Error::Validation { field, .. } => Some(field.as_str()),
        _ => None,
    }
}
