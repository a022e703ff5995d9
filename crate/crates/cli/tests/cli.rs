use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_offload-game"));
    cmd.env_remove("OFFLOAD_GAME_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

#[test]
fn trace_writes_the_artifact_set() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("t");
    ok(&["trace", "--seed", "7", "--out", out.to_str().unwrap()]);
    for name in ["scenario.json", "report.json", "slots.csv", "summary.csv"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let slots = read(&out, "slots.csv");
    assert!(!slots.contains('\r'));
    assert!(slots.starts_with("slot,phi,system_overhead,beneficial_count,updater,new_decision\n"));

    let report = json(&out, "report.json");
    assert_eq!(report["tool"], "offload-game");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["command"], "trace");
    assert_eq!(report["config"]["source"]["seed"], 7);
    assert_eq!(report["generator"]["n"], 30);
    assert_eq!(report["result"]["is_nash"], true);
    let updates = report["result"]["update_slots"].as_u64().unwrap() as usize;
    assert_eq!(slots.lines().count(), updates + 2);

    let summary = read(&out, "summary.csv");
    let mut lines = summary.lines();
    assert!(lines.next().unwrap().starts_with("seed,fingerprint,update_slots"));
    assert!(lines.next().unwrap().starts_with(&format!("7,{},{updates},", report["result"]["fingerprint"].as_str().unwrap())));
}

#[test]
fn trace_is_reproducible_from_the_saved_scenario() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["trace", "--seed", "3", "--n", "12", "--m", "3", "--out", a.to_str().unwrap()]);
    let scenario = a.join("scenario.json");
    ok(&["trace", "--scenario", scenario.to_str().unwrap(), "--seed", "3", "--out", b.to_str().unwrap()]);
    assert_eq!(read(&a, "slots.csv"), read(&b, "slots.csv"));
    assert_eq!(read(&a, "summary.csv"), read(&b, "summary.csv"));
    assert_eq!(read(&a, "scenario.json"), read(&b, "scenario.json"));
    assert!(json(&b, "report.json")["generator"].is_null());
}

#[test]
fn gen_then_single_precision_trace() {
    let tmp = TempDir::new().unwrap();
    let g = tmp.path().join("g");
    ok(&["gen", "--seed", "5", "--n", "8", "--access-model", "contention", "--w-choices", "1,2", "--out", g.to_str().unwrap()]);
    let doc = json(&g, "scenario.json");
    assert_eq!(doc["users"].as_array().unwrap().len(), 8);
    assert_eq!(doc["env"]["access_model"], "contention");
    assert_eq!(doc["meta"]["seed"], 5);

    let t = tmp.path().join("t");
    let scenario = g.join("scenario.json");
    ok(&["trace", "--scenario", scenario.to_str().unwrap(), "--precision", "f32", "--out", t.to_str().unwrap()]);
    assert_eq!(json(&t, "report.json")["result"]["is_nash"], true);
}

#[test]
fn sweep_aggregates_per_user_count() {
    let tmp = TempDir::new().unwrap();
    let one = tmp.path().join("one");
    let two = tmp.path().join("two");
    let args = |dir: &Path| {
        vec!["sweep", "--n", "10..20", "--step", "5", "--seeds", "4", "--keep-runs", "--out"]
            .into_iter()
            .map(String::from)
            .chain([dir.to_str().unwrap().to_string()])
            .collect::<Vec<_>>()
    };
    let out = bin().args(args(&one)).env("OFFLOAD_GAME_THREADS", "1").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = bin().args(args(&two)).env("OFFLOAD_GAME_THREADS", "3").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let runs = read(&one, "runs.csv");
    assert_eq!(runs, read(&two, "runs.csv"));
    assert_eq!(read(&one, "summary.csv"), read(&two, "summary.csv"));
    assert_eq!(runs.lines().count(), 1 + 3 * 4);
    let keys: Vec<(usize, u64)> = runs
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    let summary = read(&one, "summary.csv");
    let header: Vec<&str> = summary.lines().next().unwrap().split(',').collect();
    assert_eq!(&header[..3], ["n", "runs", "mean_update_slots"]);
    assert_eq!(summary.lines().count(), 4);
    assert!(one.join("runs/n15_seed2.csv").is_file());
    assert_eq!(read(&one, "runs/n15_seed2.csv"), read(&two, "runs/n15_seed2.csv"));
}

#[test]
fn oracle_table_has_poa_columns() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    ok(&["oracle", "--n", "4", "--seeds", "3", "--out", out.to_str().unwrap()]);
    let table = read(&out, "summary.csv");
    let header = table.lines().next().unwrap();
    for col in ["equilibria", "opt_beneficial", "ce_overhead", "poa_beneficial", "poa_overhead_bound"] {
        assert!(header.split(',').any(|c| c == col), "{col}");
    }
    assert_eq!(table.lines().count(), 4);
    assert_eq!(json(&out, "report.json")["generator"]["m"], 2);
}

#[test]
fn poa_and_ce_reports() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("p");
    ok(&["poa", "--n", "4", "--m", "2", "--seed", "1", "--out", p.to_str().unwrap()]);
    let report = json(&p, "report.json");
    let ratio = report["result"]["system_overhead"]["ratio"].as_f64().unwrap();
    assert!(ratio >= 1.0);
    assert_eq!(read(&p, "summary.csv").lines().count(), 3);

    let c = tmp.path().join("c");
    ok(&["ce", "--n", "6", "--m", "2", "--objective", "min-overhead", "--iterations", "20", "--out", c.to_str().unwrap()]);
    let report = json(&c, "report.json");
    let iterations = report["result"]["iterations"].as_u64().unwrap();
    assert_eq!(read(&c, "summary.csv").lines().count() as u64, iterations + 1);
    assert_eq!(report["config"]["objective"], "min_overhead");
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    let out = out.to_str().unwrap();

    let missing = run(&["trace", "--scenario", "/nonexistent/scenario.json", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_value = run(&["gen", "--m", "0", "--out", out]);
    assert_eq!(bad_value.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_value.stderr).contains("generator.m"));

    let broken = tmp.path().join("broken.json");
    fs::write(&broken, r#"{"meta": {"seed": null, "generator": null, "version": "x"}, "env": {"M": 1}, "users": []}"#).unwrap();
    let schema = run(&["trace", "--scenario", broken.to_str().unwrap(), "--out", out]);
    assert_eq!(schema.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&schema.stderr).contains("env"));

    assert_eq!(run(&["sweep", "--n", "9..3", "--out", out]).status.code(), Some(2));

    let too_large = run(&["oracle", "--n", "12", "--m", "5", "--seeds", "1", "--out", out]);
    assert_eq!(too_large.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&too_large.stderr).contains("exceeds cap"));

    let capped = run(&["trace", "--n", "30", "--m", "5", "--work-cap", "100", "--out", out]);
    assert_eq!(capped.status.code(), Some(3));
}
