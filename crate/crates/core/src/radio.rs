//! Shannon-capacity access link between a vehicle and its serving RSU.

use serde::{Deserialize, Serialize};

use crate::scenario::{ChannelParams, RsuNode, VehicleNode};

/// Achievable uplink rate in bits per second.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LinkRate {
    pub bps: f64,
}

/// `B * log2(1 + P*G / (N0 + I))`.
///
/// Path loss is folded into the vehicle's antenna gain, so the rate does not
/// depend on distance. Interference is the RSU's configured scalar.
pub fn data_rate(channel: &ChannelParams, vehicle: &VehicleNode, rsu: &RsuNode) -> LinkRate {
    let sinr = vehicle.tx_power_w * vehicle.antenna_gain / (channel.noise_w + rsu.interference_w);
    LinkRate { bps: channel.bandwidth_hz * libm::log2(1.0 + sinr) }
}
