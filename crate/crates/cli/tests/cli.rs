use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

fn msmall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msmall"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msmall-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn atlas_reproduces_the_six_classes() {
    let o = msmall(&["atlas", "--p", "20011", "--M", "12"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let keys: BTreeSet<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("T_"))
        .map(|l| l.split(':').next().unwrap())
        .collect();
    assert_eq!(keys, BTreeSet::from(["-4", "-7", "-11", "-20", "-24", "-35"]));
}

#[test]
fn atlas_at_the_large_prime() {
    let o = msmall(&["atlas", "--p", "2^256+297", "--M", "100"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("supersingular: 528"), "{text}");
    assert!(text.contains("total M-small: 1108"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&msmall(&["atlas", "--p", "7", "--M", "2"])), 2);
    assert_eq!(code(&msmall(&["atlas", "--p", "20012", "--M", "12"])), 2);
    assert_eq!(code(&msmall(&["graph", "--p", "20011", "--M", "12"])), 2);
    assert_eq!(code(&msmall(&["verify", "nosuch", "--p", "20011", "--M", "12"])), 2);
    assert_eq!(code(&msmall(&["graph", "--p", "20011", "--M", "12", "--primes", "17", "--out", "x.dot"])), 2);
}

#[test]
fn thm1_passes_and_reports() {
    let out = tmp("thm1.json");
    let o = msmall(&["verify", "thm1", "--p", "20011", "--M", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["bound"], 6);
    assert_eq!(report["separation_holds"], true);
    assert_eq!(report["classes"].as_array().unwrap().len(), 6);
}

#[test]
fn thm1_beyond_the_envelope_exits_3() {
    let o = msmall(&["verify", "thm1", "--p", "1000000007", "--M", "100"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("159"));
}

#[test]
fn prime_exclusion_discloses_partial_certification() {
    let o = msmall(&["verify", "primeexcl", "--p", "20011", "--M", "12", "--l", "2"]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["certified_bound"], 17);
    assert_eq!(report["fully_certified"], false);
    assert!(report["disclosure"].as_str().unwrap().contains("833.8 is NOT certified"));
}

#[test]
fn counts_and_quat_pass() {
    assert_eq!(code(&msmall(&["verify", "counts", "--p", "20011", "--M", "12"])), 0);
    let o = msmall(&["verify", "quat", "--p", "1009", "--M", "12", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["all_small_checked"], 212);
}

#[test]
fn histogram_single_row_and_range() {
    let one = tmp("one.csv");
    assert_eq!(code(&msmall(&["histogram", "--p", "2^40", "--M", "100", "--count", "1", "--out", one.to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(&one).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,proportion");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1099511627791,"));

    let hundred = tmp("hundred.csv");
    let o = msmall(&["histogram", "--p", "2^20", "--M", "100", "--count", "100", "--out", hundred.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&hundred).unwrap();
    assert_eq!(text.lines().count(), 101);
    for row in text.lines().skip(1) {
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert_eq!(row.split(',').nth(1).unwrap().split('.').nth(1).unwrap().len(), 6);
    }
    let summary = stdout(&o);
    let frac: f64 = summary.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&frac));
}

#[test]
fn graph_export_has_six_colour_classes() {
    let out = tmp("graph.dot");
    let o = msmall(&["graph", "--p", "20011", "--M", "12", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("graph isogenies {"));
    let classes: BTreeSet<&str> = dot
        .split("class=\"")
        .skip(1)
        .map(|s| s.split('"').next().unwrap())
        .collect();
    assert_eq!(classes.len(), 6);
    assert_eq!(dot.matches("shape=square").count(), 1);

    // the 2-isogeny subgraph may split classes but never merges them
    let o = msmall(&["graph", "--p", "20011", "--M", "12", "--primes", "2", "--out", tmp("graph2.dot").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let comps: usize = line.split(" components").next().unwrap().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(comps >= 6, "{line}");
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    assert_eq!(code(&msmall(&["--threads", "1", "atlas", "--p", "20011", "--M", "30", "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&msmall(&["atlas", "--p", "20011", "--M", "30", "--out", b.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let x = tmp("x.csv");
    let y = tmp("y.csv");
    assert_eq!(code(&msmall(&["--threads", "1", "histogram", "--p", "10000", "--M", "20", "--count", "15", "--out", x.to_str().unwrap()])), 0);
    assert_eq!(code(&msmall(&["histogram", "--p", "10000", "--M", "20", "--count", "15", "--out", y.to_str().unwrap()])), 0);
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&y).unwrap());
}
