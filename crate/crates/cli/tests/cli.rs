use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nonbossy"));
    c.env_remove("NONBOSSY_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

const POSTED_PRICE: &str = r#"{
  "env": {"agents": 2, "kind": "single-parameter", "feasible": [[0,0],[1,0],[0,1]],
          "atoms": [["0","1","2","3"],["0","1","2","3"]]},
  "type": "posted-price", "agents": 2,
  "plan": {"agent": 1, "price": "2", "accept": null,
           "reject": {"agent": 0, "price": "1", "accept": null, "reject": null}}
}"#;

#[test]
fn exported_fixtures_match_golden_files() {
    for name in ["prop2", "example4"] {
        let o = run(&["fixture", "export", name]);
        assert!(o.status.success(), "{}", stderr(&o));
        let golden = fs::read_to_string(fixture(&format!("{name}.json"))).unwrap();
        assert_eq!(stdout(&o), golden, "{name} drifted from its golden file");
    }
}

#[test]
fn check_prop2_fails_payment_characterization_only() {
    let path = fixture("prop2.json");
    let o = run(&["check", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("✓ IC"), "{text}");
    assert!(text.contains("✓ NB"), "{text}");
    assert!(text.contains("✗ PaymentChar"), "{text}");

    let o = run(&["--json", "check", path.to_str().unwrap(), "--properties", "ic,ir,nb"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports.iter().all(|r| r["holds"] == Value::Bool(true)));
}

#[test]
fn check_auction_reports_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let spa = dir.path().join("spa.json");
    assert!(run(&["fixture", "export", "spa", "--out", spa.to_str().unwrap()]).status.success());
    let o = run(&["--json", "check", spa.to_str().unwrap(), "--properties", "ic,nb"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["certificate"].is_object(), "{v}");
    assert_eq!(v["certificate"]["manipulator"], 0);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(
        &empty,
        r#"{"env": {"agents": 1, "kind": "single-parameter", "feasible": [[0],[1]], "atoms": [["0"]]},
            "type": "table", "rows": []}"#,
    )
    .unwrap();
    let o = run(&["check", empty.to_str().unwrap(), "--properties", "ic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rows"), "{}", stderr(&o));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"type": "posted-price", "agents": "two"}"#).unwrap();
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["check", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn synth_then_extract_recovers_the_plan() {
    let dir = tempfile::tempdir().unwrap();
    let pp = dir.path().join("pp.json");
    fs::write(&pp, POSTED_PRICE).unwrap();
    let o = run(&["check", pp.to_str().unwrap(), "--properties", "ic,ir,nb,osp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let synth = dir.path().join("synth.json");
    let o = run(&["synth", pp.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    fs::write(&synth, &o.stdout).unwrap();

    let o = run(&["extract", synth.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["domination"]["order"], serde_json::json!([1, 0]));
    assert_eq!(v["plan"]["plan"]["agent"], 1);
    assert_eq!(v["plan"]["plan"]["price"], "2");
    assert_eq!(v["plan"]["plan"]["reject"]["price"], "1");
}

#[test]
fn synth_rejects_bossy_tables() {
    let dir = tempfile::tempdir().unwrap();
    let spa = dir.path().join("spa.json");
    assert!(run(&["fixture", "export", "spa", "--out", spa.to_str().unwrap()]).status.success());
    let o = run(&["synth", spa.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn correlated_eval_and_search() {
    let dir = tempfile::tempdir().unwrap();
    let prior = dir.path().join("prior.json");
    let list = dir.path().join("list.json");
    assert!(run(&["fixture", "prior", "correlated", "--out", prior.to_str().unwrap()]).status.success());
    assert!(run(&["fixture", "export", "correlated", "--out", list.to_str().unwrap()]).status.success());
    let prior = prior.to_str().unwrap();

    let o = run(&["eval", list.to_str().unwrap(), "--prior", prior]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("revenue 2"), "{}", stdout(&o));

    let o = run(&["--decimal", "eval", list.to_str().unwrap(), "--prior", prior]);
    assert!(stdout(&o).contains("revenue 2.000000"), "{}", stdout(&o));

    let o = run(&["search", "--class", "posted-price", "--prior", prior]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("8/5"), "{}", stdout(&o));

    let o = run(&["--json", "search", "--class", "decision-list", "--prior", prior]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metrics"]["expected_revenue"], "2", "{v}");

    let o = run(&["search", "--class", "decision-list", "--prior", prior, "--max-candidates", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_demo_reproduces_its_expectations() {
    for name in ["prop2", "example4", "correlated", "partition", "spa", "fpa"] {
        let o = run(&["demo", name]);
        assert_eq!(o.status.code(), Some(0), "demo {name}: {}", stderr(&o));
        let o = run(&["--json", "demo", name]);
        assert_eq!(o.status.code(), Some(0), "demo {name} --json: {}", stderr(&o));
        serde_json::from_slice::<Value>(&o.stdout).unwrap();
    }
    let text = stdout(&run(&["demo", "correlated"]));
    assert!(text.contains("8/5"), "{text}");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = run(&["--json", "demo", "partition", "--samples", "20000", "--seed", "7"]);
    let b = bin()
        .args(["--json", "demo", "partition", "--samples", "20000", "--seed", "7"])
        .env("NONBOSSY_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&run(&["demo", "example4"])), stdout(&run(&["demo", "example4"])));
}
