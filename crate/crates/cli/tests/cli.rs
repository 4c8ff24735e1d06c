use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn memtune(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_memtune")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = memtune(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn err(args: &[&str]) -> String {
    let out = memtune(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "error is not one line: {stderr}");
    stderr
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_trace_sizes_and_determinism() {
    assert_eq!(ok(&["gen-trace", "stream", "--count", "3"]), "0 R 0x0\n4 R 0x40\n8 R 0x80\n");
    assert_eq!(ok(&["gen-trace", "gemm", "--n", "1", "--block", "1"]).lines().count(), 3);
    let a = ok(&["gen-trace", "irregular", "--count", "200", "--seed", "9"]);
    let b = ok(&["gen-trace", "irregular", "--count", "200", "--seed", "9"]);
    assert_eq!(a, b);
    assert_ne!(a, ok(&["gen-trace", "irregular", "--count", "200", "--seed", "10"]));
    assert!(err(&["gen-trace", "stream", "--count", "0"]).starts_with("memtune: error:"));
}

#[test]
fn empty_trace_has_no_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("empty.trace");
    fs::write(&trace, "# nothing\n").unwrap();
    let msg = err(&["simulate", "--trace", s(&trace)]);
    assert!(msg.starts_with("memtune: error: no partitions"), "{msg}");
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    fs::write(&trace, ok(&["gen-trace", "irregular", "--count", "3000"])).unwrap();
    let args = ["simulate", "--trace", s(&trace), "--trace-split", "1000"];
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("partition,requests,elapsed_cycles,refreshes,avg_latency_ps,"));
    assert!(lines[0].ends_with(",R_T"));

    let out = dir.path().join("sim");
    ok(&["simulate", "--trace", s(&trace), "--trace-split", "1000", "--format", "json", "--out", s(&out)]);
    assert!(out.join("partitions.json").exists());
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["action"], serde_json::json!([1, 1, 0, 2, 0, 1, 7, 7, 3, 7]));
    assert_eq!(summary["controller"]["page_policy"], "OpenAdaptive");
}

#[test]
fn bad_inputs_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    fs::write(&trace, "0 R 0x0\n").unwrap();
    let msg = err(&["simulate", "--trace", s(&trace), "--action", "1,2,3"]);
    assert!(msg.contains("10 indices"), "{msg}");

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[learner]\nalpha = 2.0\n[timing]\nt_rcd = 0\n").unwrap();
    let msg = err(&["--config", s(&cfg), "simulate", "--trace", s(&trace)]);
    assert!(msg.contains("learner.alpha") && msg.contains("timing.t_rcd"), "{msg}");

    fs::write(dir.path().join("bad.trace"), "0 X 0x0\n").unwrap();
    err(&["simulate", "--trace", s(&dir.path().join("bad.trace"))]);
    err(&["explain", "--qtables", s(&dir.path().join("missing.txt"))]);
}

#[test]
fn tune_outputs_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.trace");
    fs::write(&trace, ok(&["gen-trace", "stream", "--count", "2000"])).unwrap();
    let base = ["tune", "--trace", s(&trace), "--trace-split", "100", "--timesteps", "30", "--warmup", "20"];
    let run = |out: &Path, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(["--out", s(out)]);
        args.extend(extra);
        ok(&args);
    };
    let one = dir.path().join("one");
    let again = dir.path().join("again");
    run(&one, &["--seed", "1"]);
    run(&again, &["--seed", "1"]);
    for file in ["qtables.txt", "steps.csv", "summary.json"] {
        assert_eq!(fs::read(one.join(file)).unwrap(), fs::read(again.join(file)).unwrap(), "{file}");
    }
    let steps = fs::read_to_string(one.join("steps.csv")).unwrap();
    let header: Vec<&str> = steps.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 2 + 10 + 7 + 7 + 2);
    assert_eq!(&header[..3], ["step", "epsilon", "page_policy"]);
    assert_eq!(header[12], "avg_latency_ps");
    assert_eq!(header[19], "reward_latency");
    assert_eq!(&header[26..], ["R_T", "R_C"]);
    assert_eq!(steps.lines().count(), 31);

    let sweep = dir.path().join("sweep");
    run(&sweep, &["--seeds", "1,2"]);
    assert_eq!(fs::read(sweep.join("seed-1/qtables.txt")).unwrap(), fs::read(one.join("qtables.txt")).unwrap());
    assert!(sweep.join("seed-2/steps.csv").exists());

    let explain = ok(&["explain", "--qtables", s(&one.join("qtables.txt"))]);
    assert!(explain.lines().next().unwrap().starts_with("step,agent,parameter,state,chosen,alternative"));
    // one row per non-greedy action of every agent
    assert_eq!(explain.lines().count(), 1 + (4 + 3 + 3 + 3 + 2 + 2 + 8 * 4 - 10));

    let baseline = dir.path().join("baseline");
    ok(&["simulate", "--trace", s(&trace), "--trace-split", "100", "--out", s(&baseline)]);
    let cmp = ok(&["compare", "--baseline", s(&baseline.join("summary.json")), "--tuned", s(&one.join("summary.json"))]);
    assert!(cmp.starts_with("metric,baseline,tuned,improvement_pct\n"));
    assert_eq!(cmp.lines().count(), 9);
}

#[test]
fn zero_tables_explain_as_ties() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    let mut text = String::from("memtune-qtables 1\nagents 2\ncomponents 7\narities 1 3\n");
    for _ in 0..10 {
        text.push_str("0 0 0 0 0 0 0\n");
    }
    fs::write(&q, text).unwrap();
    let out = ok(&["explain", "--qtables", s(&q)]);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    // the single-action agent contributes nothing
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains("no preference") && r.starts_with(",1,agent1,")));
}

#[test]
fn explain_fixture_matches_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.txt");
    // state 0: action 0 = (0,0,5,...), action 1 = (1,0,...); greedy is 0
    fs::write(&q, "memtune-qtables 1\nagents 1\ncomponents 7\narities 2\n0 0 5 0 0 0 0\n1 0 0 0 0 0 0\n0 0 0 0 0 0 0\n0 0 0 0 0 0 0\n").unwrap();
    let out = ok(&["explain", "--qtables", s(&q), "--state", "0", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let e = &rows[0]["explanation"];
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(e["chosen"], 0);
    assert_eq!(e["delta"], serde_json::json!([-1.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]));
    assert_eq!(e["d"], 1.0);
    assert_eq!(e["msx_plus"], serde_json::json!([2]));
    assert_eq!(e["v"], 0.0);
    assert_eq!(e["msx_minus"], serde_json::json!([0]));
    assert!(e["rationale"].as_str().unwrap().contains("the improvement in energy alone justifies the action, despite losses in latency"));
    err(&["explain", "--qtables", s(&q), "--state", "2"]);
}

#[test]
fn compare_reproduces_reported_improvements() {
    let dir = tempfile::tempdir().unwrap();
    let summary = |energy: f64, bandwidth: f64, reward: Option<f64>| {
        serde_json::json!({
            "aggregate": {
                "avg_latency_ps": 100.0, "avg_power_mw": 0.0, "total_energy_pj": energy,
                "avg_bandwidth_bps": bandwidth, "bank_switches": 0, "bank_group_switches": 5, "row_hit_rate": 0.5
            },
            "cumulative_reward": reward,
        })
        .to_string()
    };
    let (b, t) = (dir.path().join("b.json"), dir.path().join("t.json"));
    fs::write(&b, summary(951.9, 81.24, Some(10.0))).unwrap();
    fs::write(&t, summary(915.38, 88.06, Some(12.0))).unwrap();
    let out = ok(&["compare", "--baseline", s(&b), "--tuned", s(&t)]);
    assert!(out.contains("total_energy_pj,951.9,915.38,3.84\n"), "{out}");
    assert!(out.contains("avg_bandwidth_bps,81.24,88.06,8.39\n"), "{out}");
    assert!(out.contains("avg_latency_ps,100,100,0.00\n"), "{out}");
    assert!(out.contains("avg_power_mw,0,0,undefined\n"), "{out}");
    assert!(out.contains("cumulative_reward,10,12,\n"), "{out}");
}
