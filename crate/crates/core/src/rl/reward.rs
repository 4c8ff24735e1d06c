//! Per-metric rewards: `target / |target - observed|`, floored and capped.

use serde::{Deserialize, Serialize};

use crate::controller::{Metric, MetricsSnapshot, METRIC_COUNT};
use crate::dram::{background_energy, DeviceParams};

/// Largest reward a single component can earn.
pub const REWARD_CAP: f64 = 1e9;
/// The denominator never drops below this fraction of `|target|`.
pub const RELATIVE_FLOOR: f64 = 1e-9;

/// Reward for one metric. `target` must be nonzero.
pub fn compute_reward(target: f64, observed: f64) -> f64 {
    debug_assert!(target != 0.0, "reward target must be nonzero");
    let gap = (target - observed).abs().max(RELATIVE_FLOOR * target.abs());
    (target / gap).min(REWARD_CAP)
}

/// One reward per metric, in [`Metric::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardVector(pub [f64; METRIC_COUNT]);

impl RewardVector {
    pub fn get(&self, metric: Metric) -> f64 {
        self.0[metric.index()]
    }
}

pub fn total_reward(rewards: &RewardVector) -> f64 {
    rewards.0.iter().sum()
}

/// Ideal value for each metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardTargets(pub [f64; METRIC_COUNT]);

impl RewardTargets {
    /// Physically ideal values for a partition of `requests` accesses:
    /// minimum service latency, peak bandwidth, one read burst of energy per
    /// request plus background over the shortest possible transfer time, and
    /// one bank / bank-group switch with a perfect row hit rate.
    pub fn ideal(device: &DeviceParams, requests: usize) -> Self {
        let t = &device.timing;
        let clock_ps = device.energy.clock_period_ps;
        let min_cycles = (requests as u64).max(1) * t.t_burst;
        let energy = device.energy.e_rd_pj * requests as f64 + background_energy(min_cycles, &device.energy);
        let power = energy / (min_cycles as f64 * clock_ps) * 1e3;
        Self([
            (t.t_rcd + t.t_cl + t.t_burst) as f64 * clock_ps,
            power,
            energy,
            device.peak_bandwidth_bps(),
            1.0,
            1.0,
            1.0,
        ])
    }

    pub fn get(&self, metric: Metric) -> f64 {
        self.0[metric.index()]
    }

    pub fn rewards(&self, metrics: &MetricsSnapshot) -> RewardVector {
        RewardVector(Metric::ALL.map(|m| compute_reward(self.get(m), metrics.get(m))))
    }
}

/// Optional fixed targets that replace the per-partition ideal values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetOverrides {
    pub latency_ps: Option<f64>,
    pub power_mw: Option<f64>,
    pub energy_pj: Option<f64>,
    pub bandwidth_bps: Option<f64>,
    pub bank_switches: Option<f64>,
    pub bank_group_switches: Option<f64>,
    pub row_hit_rate: Option<f64>,
}

impl TargetOverrides {
    fn as_array(&self) -> [Option<f64>; METRIC_COUNT] {
        [
            self.latency_ps,
            self.power_mw,
            self.energy_pj,
            self.bandwidth_bps,
            self.bank_switches,
            self.bank_group_switches,
            self.row_hit_rate,
        ]
    }

    pub fn apply(&self, ideal: RewardTargets) -> RewardTargets {
        let mut out = ideal;
        for (slot, value) in out.0.iter_mut().zip(self.as_array()) {
            if let Some(v) = value {
                *slot = v;
            }
        }
        out
    }

    pub fn validate(&self, errors: &mut Vec<String>) {
        for (metric, value) in Metric::ALL.iter().zip(self.as_array()) {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    errors.push(format!("learner.targets.{}: must be finite and > 0", target_key(*metric)));
                }
            }
        }
    }
}

fn target_key(metric: Metric) -> &'static str {
    match metric {
        Metric::Latency => "latency_ps",
        Metric::Power => "power_mw",
        Metric::Energy => "energy_pj",
        Metric::Bandwidth => "bandwidth_bps",
        Metric::BankSwitches => "bank_switches",
        Metric::BankGroupSwitches => "bank_group_switches",
        Metric::RowHitRate => "row_hit_rate",
    }
}
