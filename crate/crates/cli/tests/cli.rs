use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabspan")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn analyze_universal_circuit_with_oracle() {
    let c = data("universal_n1.circ");
    let out = run(&["analyze", "--circuit", c.to_str().unwrap(), "--oracle"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["report"]["s_mu"], 4);
    assert_eq!(v["report"]["ic"], true);
    assert_eq!(v["report"]["oracle_checked"], true);
    assert_eq!(v["config"]["command"], "analyze");
    assert_eq!(v["config"]["version"], 1);
}

#[test]
fn analyze_identity_circuit() {
    let out = run(&["analyze", "--circuit", data("identity_n2.circ").to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["report"]["s_mu"], 4);
    assert_eq!(v["report"]["ic"], false);
}

#[test]
fn analyze_group_with_magic_ancilla() {
    let g = data("cosets_xx.grp");
    let out = run(&["analyze", "--group", g.to_str().unwrap(), "--split", "1", "--ancilla", "T^2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let row = rows.records().next().unwrap().unwrap();
    let s_mu = headers.iter().position(|h| h == "s_mu").unwrap();
    assert_eq!(&row[s_mu], "3");
}

#[test]
fn mixed_ancilla_on_bell_measurement() {
    let g = data("bell.grp");
    let out = run(&["analyze", "--group", g.to_str().unwrap(), "--split", "1", "--ancilla", "mixed", "--oracle"]);
    let v = json(&out);
    assert_eq!(v["report"]["s_mu"], 1);
    assert_eq!(v["report"]["oracle_checked"], true);
}

#[test]
fn oracle_refuses_above_cap() {
    let c = data("universal_n1.circ");
    let out = run(&["analyze", "--circuit", c.to_str().unwrap(), "--oracle", "--dense-cap", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("refusing the dense oracle"));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.circ");
    std::fs::write(&bad, "qubits 1 0\nH 0\nFOO 0\n").unwrap();
    let out = run(&["analyze", "--circuit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn dense_and_stabilizer_ancilla_files() {
    let dir = tempfile::tempdir().unwrap();
    let stab = dir.path().join("plus.grp");
    std::fs::write(&stab, "# |+> on both ancillas\nXI\nIX\n").unwrap();
    let state = dir.path().join("psi.json");
    let h = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(&state, format!(r#"{{"qubits": 2, "amplitudes": [[{h}, 0], [0, 0], [0, 0], [0, {h}]]}}"#)).unwrap();
    let g = data("cosets_xx.grp");
    let g = g.to_str().unwrap();
    for spec in [format!("stab:{}", stab.display()), format!("dense:{}", state.display()), "generic".into()] {
        let out = run(&["analyze", "--group", g, "--split", "1", "--ancilla", &spec]);
        assert!(out.status.success(), "{spec}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(json(&out)["report"]["s_mu"].as_u64().unwrap() >= 1);
    }
}

#[test]
fn examples_all_pass() {
    let out = run(&["examples"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["failed"], 0);
}

#[test]
fn examples_filters() {
    let v = json(&run(&["examples", "zfree_counts"]));
    let counts: Vec<String> =
        v["fixtures"].as_array().unwrap().iter().map(|f| f["computed"].as_str().unwrap().to_string()).collect();
    assert_eq!(counts.len(), 4);
    for (c, want) in counts.iter().zip(["36", "45", "81", "16"]) {
        assert!(c.starts_with(want), "{c}");
    }
    let v = json(&run(&["examples", "frame"]));
    assert_eq!(v["fixtures"].as_array().unwrap().len(), 1);
    assert_eq!(v["fixtures"][0]["pass"], true);
    assert_eq!(run(&["examples", "no-such-fixture"]).status.code(), Some(1));
}

#[test]
fn search_exit_codes_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let hist = dir.path().join("hist.csv");
    let task = data("tasks/conjecture_2n_n1.json");
    let out = run(&[
        "search",
        task.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--csv",
        hist.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["report"]["verdict"], "consistent");
    assert!(std::fs::read_to_string(&hist).unwrap().starts_with("section,n,m,t,s_mu,count"));

    let out = run(&["search", data("tasks/bound_saturation_n2_t1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["sections"][0]["max_s_mu"], 6);

    let budget = dir.path().join("budget.json");
    std::fs::write(
        &budget,
        r#"{"kind":"random_doped_scan","n":1,"m":1,"t":[1],"samples":50,"budget":{"max_candidates":5,"max_seconds":null}}"#,
    )
    .unwrap();
    assert_eq!(run(&["search", budget.to_str().unwrap()]).status.code(), Some(3));

    let malformed = dir.path().join("bad.json");
    std::fs::write(&malformed, r#"{"kind":"conjecture_2n","n":1}"#).unwrap();
    assert_eq!(run(&["search", malformed.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn sharded_search_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let task = dir.path().join("task.json");
    std::fs::write(
        &task,
        r#"{"kind":"random_doped_scan","n":1,"m":1,"t":[1,2],"samples":60,"budget":{"max_candidates":null,"max_seconds":null}}"#,
    )
    .unwrap();
    let args = ["search", task.to_str().unwrap(), "--shard", "1/2", "--seed", "9", "--format", "csv"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&run(&["search", task.to_str().unwrap(), "--shard", "1/2", "--seed", "9"]));
    assert_eq!(v["config"]["shard"], "1/2");
    assert_eq!(v["report"]["task"]["seed"], 9);
}

#[test]
fn bounds_table() {
    let v = json(&run(&["bounds", "2"]));
    assert_eq!(v["necessary_t"], 3);
    assert_eq!(v["ic_sufficient_t"], 4);
    let v = json(&run(&["bounds", "1", "0"]));
    assert_eq!(v["rows"][0]["bound"], "2");
    let v = json(&run(&["bounds", "3", "4"]));
    assert_eq!(v["rows"][0]["ic"], "unknown below 2n, conjectured impossible");
}

#[test]
fn oracle_dump_writes_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("dump.json");
    let c = data("universal_n1.circ");
    let out = run(&["oracle-dump", "--circuit", c.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["rank"], 4);
    assert_eq!(v["elements"].as_array().unwrap().len(), 4);
    let f = &v["frame_operator"];
    for (i, want) in [0.5, 0.125, 0.125, 0.25].iter().enumerate() {
        assert!((f[i][i].as_f64().unwrap() - want).abs() < 1e-10);
    }
}
