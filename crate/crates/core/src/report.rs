//! Whole-run summaries and baseline-versus-tuned comparison.

use serde::{Deserialize, Serialize};

use crate::controller::{
    compute_metrics, simulate_partition, ControllerConfig, Direction, MemoryRequest, Metric, MetricsSnapshot,
    PartitionTally, SimError, SimOptions, SimulationState,
};
use crate::dram::DeviceParams;
use crate::rl::{total_reward, LearnerConfig, RewardTargets, RewardVector};

/// Percentage improvement of `tuned` over `baseline`; positive means better.
/// `None` when the baseline is zero.
pub fn improvement(metric: Metric, baseline: f64, tuned: f64) -> Option<f64> {
    if baseline == 0.0 {
        return None;
    }
    Some(match metric.direction() {
        Direction::LowerIsBetter => (baseline - tuned) / baseline * 100.0,
        Direction::HigherIsBetter => (tuned - baseline) / baseline * 100.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub index: usize,
    pub requests: u64,
    pub elapsed_cycles: u64,
    pub refreshes: u64,
    pub metrics: MetricsSnapshot,
    pub rewards: RewardVector,
    pub total_reward: f64,
}

/// What `compare` consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub aggregate: MetricsSnapshot,
    /// Sum of per-partition total reward over the post-warmup positions.
    pub cumulative_reward: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    pub controller: ControllerConfig,
    pub partitions: Vec<PartitionRow>,
    pub summary: RunSummary,
}

fn merge(total: &mut PartitionTally, part: &PartitionTally) {
    total.requests += part.requests;
    total.latency_cycles += part.latency_cycles;
    total.row_hits += part.row_hits;
    total.row_misses += part.row_misses;
    total.bank_switches += part.bank_switches;
    total.bank_group_switches += part.bank_group_switches;
    let (a, b) = (&mut total.commands, &part.commands);
    a.activates += b.activates;
    a.precharges += b.precharges;
    a.reads += b.reads;
    a.writes += b.writes;
    a.bank_refreshes += b.bank_refreshes;
    a.accumulated_pj += b.accumulated_pj;
}

/// Runs every partition under one fixed controller, carrying DRAM state
/// across partitions. Rewards use the learner's targets, so baseline and tuned
/// runs score on the same scale as the tuning loop.
pub fn simulate_run(
    device: &DeviceParams,
    partitions: &[Vec<MemoryRequest>],
    controller: &ControllerConfig,
    learner: &LearnerConfig,
) -> Result<SimulationRun, SimError> {
    let mut state = SimulationState::new(device);
    let mut rows = Vec::with_capacity(partitions.len());
    let mut total = PartitionTally::default();
    let mut elapsed = 0;
    let mut cumulative = 0.0;
    for (index, requests) in partitions.iter().enumerate() {
        let report = simulate_partition(requests, controller, &mut state, SimOptions::default())?;
        let targets = learner.targets.apply(RewardTargets::ideal(device, requests.len()));
        let rewards = targets.rewards(&report.metrics);
        let r_t = total_reward(&rewards);
        if index + 1 >= learner.warmup {
            cumulative += r_t;
        }
        merge(&mut total, &report.tally);
        elapsed += report.elapsed_cycles;
        rows.push(PartitionRow {
            index,
            requests: report.tally.requests,
            elapsed_cycles: report.elapsed_cycles,
            refreshes: report.refreshes,
            metrics: report.metrics,
            rewards,
            total_reward: r_t,
        });
    }
    let aggregate = compute_metrics(&total, elapsed, device)?;
    Ok(SimulationRun {
        controller: *controller,
        partitions: rows,
        summary: RunSummary { aggregate, cumulative_reward: Some(cumulative) },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: String,
    pub baseline: f64,
    pub tuned: f64,
    /// `None` renders as "undefined".
    pub improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub baseline_cumulative_reward: Option<f64>,
    pub tuned_cumulative_reward: Option<f64>,
}

pub fn compare_values(metric: Metric, baseline: f64, tuned: f64) -> ComparisonRow {
    ComparisonRow { metric: metric.key().to_string(), baseline, tuned, improvement_pct: improvement(metric, baseline, tuned) }
}

pub fn compare(baseline: &RunSummary, tuned: &RunSummary) -> ComparisonReport {
    ComparisonReport {
        rows: Metric::ALL
            .iter()
            .map(|&m| compare_values(m, baseline.aggregate.get(m), tuned.aggregate.get(m)))
            .collect(),
        baseline_cumulative_reward: baseline.cumulative_reward,
        tuned_cumulative_reward: tuned.cumulative_reward,
    }
}
