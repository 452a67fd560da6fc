// SPDX-License-Identifier: Apache-2.0

use std::process::{Command, Output};

fn roadstops(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadstops")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value after `key` on the first line starting with `line`.
fn field(text: &str, line: &str, key: &str) -> f64 {
    let l = text.lines().find(|l| l.starts_with(line)).unwrap();
    let mut it = l.split_whitespace();
    it.find(|w| *w == key).unwrap();
    it.next().unwrap().parse().unwrap()
}

#[test]
fn fast_and_baseline_agree() {
    let args = ["solve", "oes", "--nodes", "800", "--q", "8", "--seed", "3", "--verify"];
    let fast = roadstops(&[&args[..], &["--algo", "fast"]].concat());
    let base = roadstops(&[&args[..], &["--algo", "baseline"]].concat());
    assert!(fast.status.success() && base.status.success());
    assert_eq!(field(&stdout(&fast), "total", "total"), field(&stdout(&base), "total", "total"));
}

#[test]
fn no_riders_costs_the_direct_route() {
    let o = roadstops(&["solve", "oris", "--nodes", "300", "--algo", "exact", "--q", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(field(&out, "total", "total"), field(&out, "st", "direct"));
}

#[test]
fn vehicle_only_weight_drives_the_direct_route() {
    let o = roadstops(&["solve", "oris", "--nodes", "300", "--algo", "heur", "--q", "6", "--r5", "1.0"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "total", "vehicle"), field(&out, "st", "direct"));
}

#[test]
fn exit_codes() {
    assert_eq!(roadstops(&["solve", "oris", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(roadstops(&["solve", "oes", "--nodes", "100", "--q", "0"]).status.code(), Some(2));
    assert_eq!(roadstops(&["solve", "oris", "--nodes", "100", "--r2", "0.5"]).status.code(), Some(2));
    let infeasible = roadstops(&["solve", "oris", "--nodes", "300", "--q", "4", "--r1", "0", "--r4", "2"]);
    assert_eq!(infeasible.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&infeasible.stderr).contains("infeasible"));
}

#[test]
fn generated_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    let queries = dir.path().join("q.txt");
    let (g, q) = (graph.to_str().unwrap(), queries.to_str().unwrap());
    assert!(roadstops(&["gen-graph", "--nodes", "200", "--out", g]).status.success());
    assert!(roadstops(&["gen", "oris", "--graph", g, "--q", "3", "--seed", "5", "--out", q]).status.success());
    // End stops come from the sidecar written next to the queries.
    let from_files = roadstops(&["solve", "oris", "--graph", g, "--queries", q, "--algo", "exact", "--verify"]);
    assert!(from_files.status.success(), "{}", String::from_utf8_lossy(&from_files.stderr));
    let generated = roadstops(&["solve", "oris", "--nodes", "200", "--q", "3", "--seed", "5", "--algo", "exact"]);
    assert_eq!(field(&stdout(&from_files), "total", "total"), field(&stdout(&generated), "total", "total"));
}

#[test]
fn sweep_writes_rows_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = roadstops(&[
        "sweep", "--problem", "oris", "--param", "q", "--from", "1", "--to", "3", "--step", "1", "--nodes", "200",
        "--reps", "2", "--csv", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text.lines().skip(1).all(|l| l.starts_with("q,")));
    let cfg: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(csv.with_extension("config.json")).unwrap()).unwrap();
    assert_eq!(cfg["reps"], 2);
    assert_eq!(cfg["graph"]["nodes"], 200);
}

#[test]
fn sweep_rejects_a_foreign_parameter() {
    let o = roadstops(&["sweep", "--problem", "oes", "--param", "r5", "--csv", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
}
