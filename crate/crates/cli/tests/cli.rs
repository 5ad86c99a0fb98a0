use std::path::Path;
use std::process::{Command, Output};

use infocorr::classical::{cplus, cplus_facets, facets_212_lifted, Variant};
use infocorr::geometry::{parse_polyhedron, DdOptions};
use infocorr::model::{Behavior, BehaviorRecord, Prior, Scenario};
use infocorr::quantum::{born_behavior, Ensemble, MeasurementSet};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infocorr")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body_without_manifest(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("# manifest")).collect::<Vec<_>>().join("\n")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().unwrap().iter().map(str::to_string).collect();
    let mut rows = vec![header];
    rows.extend(r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()));
    rows
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = rows[0].iter().position(|h| h == name).unwrap();
    rows[1..].iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn facets_match_the_library_and_embed_a_manifest() {
    let o = run(&["facets", "--scenario", "322", "--prior", "uniform", "--variant", "stochastic"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# manifest {"));
    let (sys, _) = parse_polyhedron(&text).unwrap();
    let s = Scenario::new(3, 2, 2).unwrap();
    let opts = DdOptions::default();
    let lib = cplus_facets(&cplus(s, &Prior::uniform(3), Variant::Stochastic, &opts).unwrap(), &opts).unwrap();
    assert_eq!(sys.inequalities, lib.inequalities);
    assert_eq!(sys.inequalities.len(), 48);
}

#[test]
fn facets_212_instance_equals_closed_form() {
    let o = run(&["facets", "--scenario", "212", "--prior", "0.6,0.4", "--variant", "det"]);
    assert!(o.status.success());
    let (sys, _) = parse_polyhedron(&stdout(&o)).unwrap();
    let closed = facets_212_lifted(&Prior::parse("3/5,2/5", 2).unwrap(), Variant::Deterministic).unwrap();
    assert_eq!(sys, closed);
}

#[test]
fn one_outcome_leaves_only_the_guessing_floor() {
    let o = run(&["facets", "--scenario", "211"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (sys, _) = parse_polyhedron(&stdout(&o)).unwrap();
    assert_eq!(sys.labels, ["G"]);
    assert_eq!(body_without_manifest(&stdout(&o)), "LABELS G\nH-REP\n>= -1/2 1");
}

fn write_behavior(dir: &Path, name: &str, p: &Behavior) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&BehaviorRecord::from_behavior(p)).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn membership_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::new(3, 2, 2).unwrap();
    let noise = write_behavior(dir.path(), "noise.json", &Behavior::uniform_noise(s));
    let o = run(&["membership", "--behavior", &noise, "--g", "1/3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["feasible"], true);
    assert!(v["manifest"]["command"] == "membership");

    // b = x mod 2 for both measurements needs more than no information
    let det = Behavior::from_fn(s, |b, x, _| if b == x % 2 { 1.0 } else { 0.0 });
    let path = write_behavior(dir.path(), "det.json", &det);
    let o = run(&["membership", "--behavior", &path, "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["feasible"], false);
    assert!(v["certificate"].is_object());
    assert!((v["g_min"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-6);
}

#[test]
fn bound_curve_is_sorted_and_starts_at_one() {
    let o = run(&["bound", "--witness", "322", "--g", "2/3,1/3", "--level", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["g", "alpha", "bound", "dual", "status", "verified", "iterations", "solve_time"]);
    let g = column(&rows, "g");
    let b = column(&rows, "bound");
    assert!(g[0] < g[1]);
    // no information: x-independent behaviors
    assert!((b[0] - 1.0).abs() < 1e-4, "{}", b[0]);
    assert!((b[1] - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-4, "{}", b[1]);
    let alpha = column(&rows, "alpha");
    assert!(alpha[0].abs() < 1e-12 && (alpha[1] - 1.0).abs() < 1e-12);
}

#[test]
fn alpha_grid_converts_through_the_prior() {
    let o = run(&["bound", "--witness", "322", "--alpha", "0:1:3", "--level", "1"]);
    assert!(o.status.success());
    let g = column(&csv_rows(&stdout(&o)), "g");
    let want = [1.0 / 3.0, 2f64.sqrt() / 3.0, 2.0 / 3.0];
    for (a, b) in g.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn classical_mode_follows_the_first_facet() {
    let o = run(&["bound", "--witness", "322", "--g", "1/2", "--mode", "classical", "--level", "3"]);
    assert!(o.status.success());
    let b = column(&csv_rows(&stdout(&o)), "bound");
    assert!((b[0] - 2.0).abs() < 1e-3, "{}", b[0]);
}

#[test]
fn seesaw_writes_reloadable_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rac.json");
    let o = run(&[
        "seesaw", "--witness", "rac22", "--g", "1/2", "--dim", "2", "--restarts", "3", "--seed", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.5f64.sqrt()).abs() < 1e-4);
    let e: Ensemble = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rac.json.ensemble.json")).unwrap()).unwrap();
    let m: MeasurementSet =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rac.json.measurements.json")).unwrap()).unwrap();
    let w = infocorr::model::Witness::rac();
    assert!((w.evaluate(&born_behavior(&e, &m).unwrap()).unwrap() - value).abs() < 1e-9);
    assert_eq!(v["manifest"]["outputs"].as_array().unwrap().len(), 3);
    assert!(!dir.path().join("rac.json.partial").exists());
}

#[test]
fn randomness_csv_columns() {
    let o = run(&["randomness", "--witness", "322", "--g", "0.5", "--event", "3,1", "--level", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["g", "alpha", "witness_max", "observed", "p_star", "h_min", "verified"]);
    let h = column(&rows, "h_min")[0];
    let p = column(&rows, "p_star")[0];
    assert!((0.0..=1.0).contains(&h));
    assert!((h + p.log2()).abs() < 1e-12);
    assert_eq!(run(&["randomness", "--witness", "322", "--g", "0.5", "--event", "4,1"]).status.code(), Some(1));
}

#[test]
fn certify_above_the_maximum_is_a_verdict() {
    let o = run(&["certify-info", "--witness", "322", "--observed", "7", "--level", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certify_reports_a_bracket() {
    let o = run(&["certify-info", "--witness", "322", "--observed", "3.5", "--error", "0.1", "--level", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (lo, hi) = (v["g_lower"].as_f64().unwrap(), v["g_upper"].as_f64().unwrap());
    assert!(lo < hi && hi.log2() - lo.log2() <= 0.01 + 1e-12);
    assert!(v["alpha_at_minus_error"].as_f64().unwrap() <= v["alpha_lower"].as_f64().unwrap());
    assert!((v["alpha_lower"].as_f64().unwrap() - (3.0 * lo).log2()).abs() < 1e-12);
}

#[test]
fn rerun_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("f.txt");
    let second = dir.path().join("g.txt");
    let o = run(&["facets", "--scenario", "212", "--prior", "0.7,0.3", "--out", first.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["rerun", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = std::fs::read_to_string(&first).unwrap();
    let b = std::fs::read_to_string(&second).unwrap();
    assert_eq!(body_without_manifest(&a), body_without_manifest(&b));

    let curve = dir.path().join("c.csv");
    let o = run(&["bound", "--witness", "322", "--g", "0.5", "--level", "1", "--out", curve.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["rerun", curve.to_str().unwrap()]);
    assert!(o.status.success());
    let x = column(&csv_rows(&std::fs::read_to_string(&curve).unwrap()), "bound")[0];
    let y = column(&csv_rows(&stdout(&o)), "bound")[0];
    assert!((x - y).abs() < 1e-7);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["bound", "--witness", "322", "--g", "0.5", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--witness", "nope", "--g", "0.5"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--witness", "322", "--g", "0.2"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
