use anyhow::Result;
use serde::Serialize;

use memtune::controller::{Metric, PARAMETER_NAMES};
use memtune::explain::Explanation;
use memtune::report::{ComparisonReport, SimulationRun};
use memtune::rl::StepLog;

fn snake(metric: Metric) -> String {
    metric.name().replace(' ', "_")
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(writer.into_inner().map_err(|e| e.into_error())?)?)
}

fn indices(set: &[usize]) -> String {
    set.iter().map(usize::to_string).collect::<Vec<_>>().join(";")
}

pub fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn partitions_csv(run: &SimulationRun) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["partition", "requests", "elapsed_cycles", "refreshes"].map(String::from).to_vec();
    header.extend(Metric::ALL.iter().map(|m| m.key().to_string()));
    header.extend(Metric::ALL.iter().map(|&m| format!("reward_{}", snake(m))));
    header.push("R_T".into());
    w.write_record(&header)?;
    for p in &run.partitions {
        let mut row = vec![p.index.to_string(), p.requests.to_string(), p.elapsed_cycles.to_string(), p.refreshes.to_string()];
        row.extend(p.metrics.to_array().iter().map(f64::to_string));
        row.extend(p.rewards.0.iter().map(f64::to_string));
        row.push(p.total_reward.to_string());
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn steps_csv(log: &[StepLog]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["step".to_string(), "epsilon".to_string()];
    header.extend(PARAMETER_NAMES.iter().map(|s| s.to_string()));
    header.extend(Metric::ALL.iter().map(|m| m.key().to_string()));
    header.extend(Metric::ALL.iter().map(|&m| format!("reward_{}", snake(m))));
    header.extend(["R_T".to_string(), "R_C".to_string()]);
    w.write_record(&header)?;
    for l in log {
        let mut row = vec![l.step.to_string(), l.epsilon.to_string()];
        row.extend(l.action.iter().map(usize::to_string));
        row.extend(l.metrics.to_array().iter().map(f64::to_string));
        row.extend(l.rewards.0.iter().map(f64::to_string));
        row.extend([l.total_reward.to_string(), l.cumulative_reward.to_string()]);
        w.write_record(&row)?;
    }
    finish(w)
}

#[derive(Debug, Serialize)]
pub struct ExplainRow {
    pub step: Option<usize>,
    pub agent: usize,
    pub parameter: String,
    pub chosen_label: String,
    pub alternative_label: String,
    pub explanation: Explanation,
}

pub fn explanations_csv(rows: &[ExplainRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> =
        ["step", "agent", "parameter", "state", "chosen", "alternative", "chosen_label", "alternative_label"]
            .map(String::from)
            .to_vec();
    header.extend(Metric::ALL.iter().map(|&m| format!("delta_{}", snake(m))));
    header.extend(["d", "v", "msx_plus", "msx_minus", "preferred", "rationale"].map(String::from));
    w.write_record(&header)?;
    for r in rows {
        let e = &r.explanation;
        let mut row = vec![
            r.step.map(|s| s.to_string()).unwrap_or_default(),
            r.agent.to_string(),
            r.parameter.clone(),
            e.state.to_string(),
            e.chosen.to_string(),
            e.alternative.to_string(),
            r.chosen_label.clone(),
            r.alternative_label.clone(),
        ];
        row.extend(e.delta.0.iter().map(f64::to_string));
        row.extend([
            e.d.to_string(),
            e.v.to_string(),
            indices(&e.msx_plus),
            indices(&e.msx_minus),
            e.preferred.to_string(),
            e.rationale.clone(),
        ]);
        w.write_record(&row)?;
    }
    finish(w)
}

pub fn comparison_csv(report: &ComparisonReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "baseline", "tuned", "improvement_pct"])?;
    for r in &report.rows {
        let pct = r.improvement_pct.map(|p| format!("{p:.2}")).unwrap_or_else(|| "undefined".into());
        w.write_record([r.metric.clone(), r.baseline.to_string(), r.tuned.to_string(), pct])?;
    }
    let reward = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    w.write_record([
        "cumulative_reward".to_string(),
        reward(report.baseline_cumulative_reward),
        reward(report.tuned_cumulative_reward),
        String::new(),
    ])?;
    finish(w)
}
