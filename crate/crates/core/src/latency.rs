//! Per-tier completion times with server queues.
//!
//! Edge and cloud queues are load-aware by default: a task waits for the
//! compute time of every task admitted to the same server before it within
//! one evaluation pass. Constant mode replaces the wait with fixed values
//! but still tracks admitted cycles for the capacity check.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radio::data_rate;
use crate::scenario::{ChannelParams, CloudNode, RsuNode, TaskSpec, VehicleNode};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "queue_mode", rename_all = "snake_case")]
pub enum QueueMode {
    #[default]
    LoadAware,
    Constant {
        q_edge_s: f64,
        q_cloud_s: f64,
    },
}

/// Accumulators for one server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServerQueue {
    pub busy_s: f64,
    pub cycles: f64,
    fixed_wait_s: Option<f64>,
}

impl ServerQueue {
    fn new(fixed_wait_s: Option<f64>) -> Self {
        ServerQueue { busy_s: 0.0, cycles: 0.0, fixed_wait_s }
    }

    /// Wait seen by the next admitted task.
    pub fn wait_s(&self) -> f64 {
        self.fixed_wait_s.unwrap_or(self.busy_s)
    }

    fn admit(&mut self, compute_s: f64, cycles: f64) {
        self.busy_s += compute_s;
        self.cycles += cycles;
    }
}

/// Queues of every RSU (by scenario index) and of the cloud, for one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueState {
    pub rsus: Vec<ServerQueue>,
    pub cloud: ServerQueue,
}

impl QueueState {
    pub fn new(rsu_count: usize, mode: QueueMode) -> Self {
        let (edge, cloud) = match mode {
            QueueMode::LoadAware => (None, None),
            QueueMode::Constant { q_edge_s, q_cloud_s } => (Some(q_edge_s), Some(q_cloud_s)),
        };
        QueueState { rsus: vec![ServerQueue::new(edge); rsu_count], cloud: ServerQueue::new(cloud) }
    }
}

fn upload_s(bits: f64, bps: f64) -> Result<f64> {
    if bits == 0.0 {
        Ok(0.0)
    } else if bps > 0.0 {
        Ok(bits / bps)
    } else {
        Err(Error::UnreachableTier)
    }
}

/// `C / f_local`. Local execution has no queue term.
pub fn local_time(task: &TaskSpec, vehicle: &VehicleNode) -> f64 {
    task.cycles / vehicle.cpu_hz
}

/// Upload to the RSU, compute on its MEC server, plus the wait in `queue`.
/// Admits the task into `queue` on success.
pub fn edge_time(
    task: &TaskSpec,
    vehicle: &VehicleNode,
    rsu: &RsuNode,
    channel: &ChannelParams,
    queue: &mut ServerQueue,
) -> Result<f64> {
    let upload = upload_s(task.input_bits, data_rate(channel, vehicle, rsu).bps)?;
    let compute = task.cycles / rsu.mec_hz;
    let wait = queue.wait_s();
    queue.admit(compute, task.cycles);
    Ok(upload + compute + wait)
}

/// Upload to the RSU, forward over the backhaul, compute in the cloud, plus
/// propagation delay and the wait in the cloud `queue`.
pub fn cloud_time(
    task: &TaskSpec,
    vehicle: &VehicleNode,
    rsu: &RsuNode,
    cloud: &CloudNode,
    channel: &ChannelParams,
    queue: &mut ServerQueue,
) -> Result<f64> {
    let upload = upload_s(task.input_bits, data_rate(channel, vehicle, rsu).bps)?;
    let backhaul = task.input_bits / rsu.backhaul_bps;
    let compute = task.cycles / cloud.cpu_hz;
    let wait = queue.wait_s();
    queue.admit(compute, task.cycles);
    Ok(upload + backhaul + compute + cloud.prop_delay_s + wait)
}
