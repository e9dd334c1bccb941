//! End-to-end runs of the `crn` binary.

use std::path::Path;
use std::process::{Command, Output};

use crn_cli::{Cell, ResultTable};

fn crn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crn"))
        .args(args)
        .output()
        .unwrap()
}

fn table(args: &[&str]) -> ResultTable {
    let out = crn(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    ResultTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn error_record(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON record")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn select_relay_shapes() {
    let t = table(&["select-relay", "--seeds", "1"]);
    assert_eq!(t.rows.len(), 1);
    match t.cell(0, "best").unwrap() {
        Cell::Int(b) => assert!((1..=10).contains(b)),
        Cell::Empty => {}
        other => panic!("unexpected best cell {other:?}"),
    }
    assert_eq!(t.columns.len(), 6 + 30);
    assert_eq!(table(&["select-relay", "--seeds", "100"]).rows.len(), 100);
}

#[test]
fn rows_carry_hash_and_seed() {
    let t = table(&["share", "--seed-list", "5,2,9"]);
    let seeds: Vec<&Cell> = (0..3).map(|r| t.cell(r, "seed").unwrap()).collect();
    assert_eq!(seeds, [&Cell::Int(5), &Cell::Int(2), &Cell::Int(9)]);
    let hash = t.cell(0, "config_hash").unwrap().clone();
    assert!((0..3).all(|r| t.cell(r, "config_hash") == Some(&hash)));

    // Re-running one row's provenance reproduces that row.
    let again = table(&["share", "--seed-list", "2"]);
    assert_eq!(again.rows[0], t.rows[1]);
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["select-relay", "share", "simulate"] {
        let a = dir.path().join(format!("{cmd}_a.csv"));
        let b = dir.path().join(format!("{cmd}_b.csv"));
        for p in [&a, &b] {
            let out = crn(&[cmd, "--seeds", "3", "--out", p.to_str().unwrap()]);
            assert!(out.status.success());
        }
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "{cmd}"
        );
    }
}

#[test]
fn json_mirrors_csv() {
    let csv = table(&["share", "--seeds", "2"]);
    let out = crn(&["share", "--seeds", "2", "--format", "json"]);
    assert!(out.status.success());
    let json = ResultTable::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(json.columns, csv.columns);
    assert_eq!(json.rows, csv.rows);
    assert_eq!(json.provenance.command, "share");
    assert_eq!(json.provenance.seeds, vec![0, 1]);
}

#[test]
fn sweep_grid_shape_and_trend() {
    let t = table(&[
        "sweep",
        "--seeds",
        "10",
        "--links",
        "2,4,6,8,10",
        "--gamma-db",
        "6,8,10,12,14",
    ]);
    assert_eq!(t.rows.len(), 5);
    for g in ["6", "8", "10", "12", "14"] {
        let col = t.column(&format!("gamma_db_{g}")).unwrap();
        let v: Vec<f64> = t.rows.iter().map(|r| r[col].as_f64().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]), "gamma {g}: {v:?}");
    }
}

#[test]
fn sweep_with_pso_solver() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "pso.json",
        r#"{"sharing": {"solver": "pso"}, "pso": {"iterations": 20}}"#,
    );
    let t = table(&[
        "sweep",
        "--config",
        &cfg,
        "--seeds",
        "2",
        "--links",
        "2,4",
        "--gamma-db",
        "10",
    ]);
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.cell(0, "solver"), Some(&Cell::Text("pso".into())));
}

#[test]
fn compare_rows_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"sim": {"sim_time_s": 20}}"#);
    let out = crn(&["compare", "--config", &cfg, "--seeds", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let t = ResultTable::from_csv(&text).unwrap();
    assert_eq!(t.rows.len(), 10);
    assert_eq!(t.to_csv(), text);
    let clsss = t
        .rows
        .iter()
        .filter(|r| r[2] == Cell::Text("clsss".into()))
        .count();
    assert_eq!(clsss, 5);
}

#[test]
fn policy_against_itself_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"sim": {"sim_time_s": 20}, "compare": {"node_counts": [30, 60]}}"#,
    );
    let t = table(&[
        "compare",
        "--config",
        &cfg,
        "--seeds",
        "2",
        "--policy",
        "clsss,clsss",
    ]);
    assert_eq!(t.rows.len(), 4);
    assert_eq!(t.rows[0][3..], t.rows[2][3..]);
    assert_eq!(t.rows[1][3..], t.rows[3][3..]);
}

#[test]
fn simulate_trace_is_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let cfg = write(dir.path(), "s.json", r#"{"sim": {"sim_time_s": 10}}"#);
    let t = table(&[
        "simulate",
        "--config",
        &cfg,
        "--seeds",
        "1",
        "--policy",
        "clsss,static-random",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(t.rows.len(), 2);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut generated = 0;
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["seed"].is_u64() && v["policy"].is_string() && v["t"].is_number());
        generated += (v["event"] == "generated") as i64;
    }
    let from_table: i64 = t
        .rows
        .iter()
        .map(|r| match r[t.column("generated").unwrap()] {
            Cell::Int(n) => n,
            _ => panic!("generated is an integer"),
        })
        .sum();
    assert_eq!(generated, from_table);
}

#[test]
fn failures_emit_json_records() {
    let dir = tempfile::tempdir().unwrap();

    let rec = error_record(&crn(&["share"]));
    assert_eq!(rec["error"], "usage");

    let bad = write(
        dir.path(),
        "bad.json",
        "{\n  \"sim\": { \"epoch_s\": \"x\" }\n}",
    );
    let out = crn(&["simulate", "--seeds", "1", "--config", &bad]);
    let rec = error_record(&out);
    assert_eq!(rec["error"], "config");
    assert_eq!(rec["field"], "sim.epoch_s");
    assert_eq!(rec["line"], 2);

    let rec = error_record(&crn(&[
        "simulate",
        "--seeds",
        "1",
        "--config",
        "/nonexistent/x.json",
    ]));
    assert_eq!(rec["error"], "io");

    let rec = error_record(&crn(&["sweep", "--seeds", "1", "--links", ""]));
    assert_eq!(rec["error"], "usage");

    let rec = error_record(&crn(&["compare", "--seeds", "1", "--policy", "clsss"]));
    assert_eq!(rec["error"], "usage");

    let rec = error_record(&crn(&["simulate", "--seeds", "1", "--policy", "greedy"]));
    assert_eq!(rec["error"], "usage");

    let big = write(
        dir.path(),
        "big.json",
        r#"{"sharing": {"generator": {"secondary_count": 30}}}"#,
    );
    let rec = error_record(&crn(&["share", "--seeds", "1", "--config", &big]));
    assert_eq!(rec["error"], "model");
}

#[test]
fn help_exits_cleanly() {
    let out = crn(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("simulate"));
}

#[test]
fn solver_flags_override_the_file() {
    let t = table(&[
        "share",
        "--seeds",
        "2",
        "--solver",
        "pso",
        "--iterations",
        "30",
    ]);
    assert_eq!(t.cell(1, "solver"), Some(&Cell::Text("pso".into())));
    let plain = table(&["share", "--seeds", "2"]);
    assert_ne!(t.cell(0, "config_hash"), plain.cell(0, "config_hash"));
}
