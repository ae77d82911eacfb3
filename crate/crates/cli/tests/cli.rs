use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn run(out: &Path, args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_deuber"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn read(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn ledger(out: &Path) -> Vec<Value> {
    std::fs::read_to_string(out.join("ledger.ndjson"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["nope"]).0, 2);
    assert_eq!(run(dir.path(), &["rado", "check", "--matrix", "1 x"]).0, 2);
    assert_eq!(run(dir.path(), &["search", "number", "--shape", "missing"]).0, 2);
    assert_eq!(run(dir.path(), &["rado", "reduce", "--matrix", "1 1 1"]).0, 2);
    assert_eq!(run(dir.path(), &["--help"]).0, 0);
}

#[test]
fn negative_entries_parse() {
    let dir = TempDir::new().unwrap();
    let (code, stdout, _) = run(dir.path(), &["rado", "check", "--matrix", "-1 -1 1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("holds"));
    let doc = read(dir.path().join("columns.json"));
    assert_eq!(doc["satisfied"], true);
}

#[test]
fn budget_exhaustion_exits_three_with_progress() {
    let dir = TempDir::new().unwrap();
    let (code, _, _) = run(
        dir.path(),
        &["--max-nodes", "2", "search", "mono", "--shape", "chain2", "--domain", "1:500", "--coloring", "random:4"],
    );
    assert_eq!(code, 3);
    let doc = read(dir.path().join("progress.json"));
    assert_eq!(doc["kind"], "search-progress");
    assert_eq!(run(dir.path(), &["hj", "number", "--k", "3", "--max-n", "2"]).0, 3);
    assert_eq!(run(dir.path(), &["ip", "probe", "--map", "x0", "--generators", "1", "--max-len", "8"]).0, 3);
    let probe = read(dir.path().join("probe.json"));
    assert_eq!(probe["outcome"]["found"], false);
}

#[test]
fn tampered_certificate_fails_verification() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["search", "number", "--shape", "schur"]).0, 0);
    let path = dir.path().join("cert.json");
    let mut doc = read(&path);
    assert_eq!(doc["N"], "5");
    doc["N"] = Value::String("4".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let (code, stdout, _) = run(
        dir.path(),
        &["cert", "verify", "--file", path.to_str().unwrap(), "--file", bad.to_str().unwrap()],
    );
    assert_eq!(code, 1);
    assert!(stdout.lines().next().unwrap().starts_with("PASS"));
    assert!(stdout.lines().nth(1).unwrap().starts_with("FAIL"));
}

#[test]
fn tampered_reduction_and_probe_fail() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["rado", "reduce", "--matrix", "1 2 -3"]).0, 0);
    let path = dir.path().join("reduction.json");
    let mut doc = read(&path);
    doc["reduction"]["B"]["entries"][0] = Value::String("7".into());
    std::fs::write(&path, doc.to_string()).unwrap();
    assert_eq!(run(dir.path(), &["cert", "verify", "--file", path.to_str().unwrap()]).0, 1);

    assert_eq!(run(dir.path(), &["ip", "probe", "--map", "x0", "--generators", "1;2"]).0, 0);
    let probe = dir.path().join("probe.json");
    let mut doc = read(&probe);
    assert_eq!(doc["outcome"]["interval"], serde_json::json!(["1", "3"]));
    doc["outcome"]["interval"][1] = Value::String("2".into());
    std::fs::write(&probe, doc.to_string()).unwrap();
    assert_eq!(run(dir.path(), &["cert", "verify", "--file", probe.to_str().unwrap()]).0, 1);
}

#[test]
fn ledger_records_each_run() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["shape", "gen", "--shape", "schur", "--seed", "2,5"]);
    run(dir.path(), &["rado", "check", "--matrix", "1 q"]);
    let records = ledger(dir.path());
    assert_eq!(records.len(), 2);
    let first = &records[0]["record"];
    assert_eq!(first["exit"], 0);
    assert_eq!(first["artifacts"][0]["kind"], "configuration");
    assert!(first["inputs"][0]["sha256"].as_str().unwrap().starts_with("catalog:schur:"));
    let second = &records[1]["record"];
    assert_eq!(second["exit"], 2);
    assert!(second["error"].is_string());
    assert_eq!(second["artifacts"], serde_json::json!([]));
    for r in &records {
        assert_eq!(r["sha256"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn shape_and_lift_artifacts_verify() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    assert_eq!(run(out, &["shape", "mpc", "--m", "2", "--p", "1", "--c", "2"]).0, 0);
    let shape = out.join("shape.json");
    assert_eq!(run(out, &["shape", "gen", "--shape", shape.to_str().unwrap(), "--seed", "1,3,9"]).0, 0);
    assert_eq!(run(out, &["lift", "build", "--shape", "trivial1", "--n", "2"]).0, 0);
    let plan = out.join("lift.json");
    assert_eq!(run(out, &["lift", "verify", "--plan", plan.to_str().unwrap(), "--seed", "1,2,4", "--exhaustive"]).0, 0);
    assert_eq!(run(out, &["hj", "line", "--k", "3", "--n", "2", "--coloring", "random:1"]).0, 0);
    assert_eq!(run(out, &["ip", "fs", "--generators", "1;2;4", "--blocks", "1,2;3"]).0, 0);
    let files: Vec<String> = ["shape.json", "configuration.json", "lift.json", "lift-verification.json", "line.json", "ip.json"]
        .iter()
        .map(|f| out.join(f).display().to_string())
        .collect();
    let mut args = vec!["cert", "verify"];
    for f in &files {
        args.push("--file");
        args.push(f);
    }
    let (code, stdout, _) = run(out, &args);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), files.len());
}

#[test]
fn canonical_search_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = ["--canonical", "search", "mono", "--shape", "ap3", "--domain", "1:300", "--coloring", "random:9"];
    run(dir.path(), &args);
    let first = read(dir.path().join("cert.json"));
    run(dir.path(), &args);
    let second = read(dir.path().join("cert.json"));
    assert_eq!(first["seed"], second["seed"]);
}
