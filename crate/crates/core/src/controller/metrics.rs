//! The seven-metric observation produced for each trace partition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dram::{background_energy, DeviceParams, EnergyLedger, ACCESS_BYTES};

pub const METRIC_COUNT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Latency,
    Power,
    Energy,
    Bandwidth,
    BankSwitches,
    BankGroupSwitches,
    RowHitRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    LowerIsBetter,
    HigherIsBetter,
}

impl Metric {
    pub const ALL: [Metric; METRIC_COUNT] = [
        Metric::Latency,
        Metric::Power,
        Metric::Energy,
        Metric::Bandwidth,
        Metric::BankSwitches,
        Metric::BankGroupSwitches,
        Metric::RowHitRate,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name used in rationale text.
    pub fn name(self) -> &'static str {
        match self {
            Metric::Latency => "latency",
            Metric::Power => "power",
            Metric::Energy => "energy",
            Metric::Bandwidth => "bandwidth",
            Metric::BankSwitches => "bank switches",
            Metric::BankGroupSwitches => "bank group switches",
            Metric::RowHitRate => "row hit rate",
        }
    }

    /// Column / key name.
    pub fn key(self) -> &'static str {
        match self {
            Metric::Latency => "avg_latency_ps",
            Metric::Power => "avg_power_mw",
            Metric::Energy => "total_energy_pj",
            Metric::Bandwidth => "avg_bandwidth_bps",
            Metric::BankSwitches => "bank_switches",
            Metric::BankGroupSwitches => "bank_group_switches",
            Metric::RowHitRate => "row_hit_rate",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Metric::Bandwidth | Metric::RowHitRate => Direction::HigherIsBetter,
            _ => Direction::LowerIsBetter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub avg_latency_ps: f64,
    pub avg_power_mw: f64,
    pub total_energy_pj: f64,
    pub avg_bandwidth_bps: f64,
    pub bank_switches: u64,
    pub bank_group_switches: u64,
    pub row_hit_rate: f64,
}

impl MetricsSnapshot {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Latency => self.avg_latency_ps,
            Metric::Power => self.avg_power_mw,
            Metric::Energy => self.total_energy_pj,
            Metric::Bandwidth => self.avg_bandwidth_bps,
            Metric::BankSwitches => self.bank_switches as f64,
            Metric::BankGroupSwitches => self.bank_group_switches as f64,
            Metric::RowHitRate => self.row_hit_rate,
        }
    }

    pub fn to_array(&self) -> [f64; METRIC_COUNT] {
        Metric::ALL.map(|m| self.get(m))
    }
}

/// Raw counters gathered while a partition runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionTally {
    pub requests: u64,
    /// Sum over requests of (response cycle - arrival cycle).
    pub latency_cycles: u64,
    pub row_hits: u64,
    pub row_misses: u64,
    pub bank_switches: u64,
    pub bank_group_switches: u64,
    pub commands: EnergyLedger,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("partition spans zero cycles")]
    ZeroElapsed,
    #[error("partition transferred no data")]
    NoRequests,
}

/// Turns counters into the observation.
///
/// Energy is recomputed from the command counts plus background energy over
/// `elapsed_cycles`; power is that energy over the elapsed wall time.
pub fn compute_metrics(
    tally: &PartitionTally,
    elapsed_cycles: u64,
    device: &DeviceParams,
) -> Result<MetricsSnapshot, MetricsError> {
    if elapsed_cycles == 0 {
        return Err(MetricsError::ZeroElapsed);
    }
    if tally.requests == 0 {
        return Err(MetricsError::NoRequests);
    }
    let clock_ps = device.energy.clock_period_ps;
    let elapsed_ps = elapsed_cycles as f64 * clock_ps;
    let total_energy_pj = tally.commands.command_energy(&device.energy) + background_energy(elapsed_cycles, &device.energy);
    let accesses = tally.row_hits + tally.row_misses;
    Ok(MetricsSnapshot {
        avg_latency_ps: tally.latency_cycles as f64 / tally.requests as f64 * clock_ps,
        // pJ / ps = W
        avg_power_mw: total_energy_pj / elapsed_ps * 1e3,
        total_energy_pj,
        avg_bandwidth_bps: (tally.requests * ACCESS_BYTES * 8) as f64 / (elapsed_ps * 1e-12),
        bank_switches: tally.bank_switches,
        bank_group_switches: tally.bank_group_switches,
        row_hit_rate: if accesses == 0 { 0.0 } else { tally.row_hits as f64 / accesses as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dram::EnergyParams;

    #[test]
    fn single_read_latency() {
        let device = DeviceParams {
            energy: EnergyParams { clock_period_ps: 1000.0, ..EnergyParams::default() },
            ..DeviceParams::default()
        };
        let tally = PartitionTally { requests: 1, latency_cycles: 32, row_misses: 1, ..Default::default() };
        let m = compute_metrics(&tally, 40, &device).unwrap();
        assert_eq!(m.avg_latency_ps, 32000.0);
        assert_eq!(m.row_hit_rate, 0.0);
    }

    #[test]
    fn energy_is_additive() {
        let device = DeviceParams::default();
        let commands = EnergyLedger { activates: 1, reads: 1, ..Default::default() };
        let tally = PartitionTally { requests: 1, latency_cycles: 36, row_misses: 1, commands, ..Default::default() };
        let m = compute_metrics(&tally, 100, &device).unwrap();
        let e = &device.energy;
        assert_eq!(m.total_energy_pj, e.e_act_pj + e.e_rd_pj + background_energy(100, e));
        let expected_mw = m.total_energy_pj / (100.0 * e.clock_period_ps) * 1e3;
        assert_eq!(m.avg_power_mw, expected_mw);
    }

    #[test]
    fn degenerate_partitions_are_rejected() {
        let device = DeviceParams::default();
        assert_eq!(compute_metrics(&PartitionTally::default(), 10, &device), Err(MetricsError::NoRequests));
        let tally = PartitionTally { requests: 1, ..Default::default() };
        assert_eq!(compute_metrics(&tally, 0, &device), Err(MetricsError::ZeroElapsed));
    }

    #[test]
    fn bandwidth_at_peak_rate() {
        let device = DeviceParams::default();
        // 10 bursts back to back over 10 * tBURST cycles is exactly peak
        let tally = PartitionTally { requests: 10, row_hits: 10, ..Default::default() };
        let m = compute_metrics(&tally, 10 * device.timing.t_burst, &device).unwrap();
        assert!((m.avg_bandwidth_bps - device.peak_bandwidth_bps()).abs() < 1e-3);
        assert_eq!(device.peak_bandwidth_bps(), 102.4e9);
    }

    #[test]
    fn metric_order_and_directions() {
        assert_eq!(Metric::ALL.iter().map(|m| m.index()).collect::<Vec<_>>(), (0..7).collect::<Vec<_>>());
        assert_eq!(Metric::Bandwidth.direction(), Direction::HigherIsBetter);
        assert_eq!(Metric::Energy.direction(), Direction::LowerIsBetter);
    }
}
