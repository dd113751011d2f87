use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmc-theta"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn kappa(out: &Output) -> f64 {
    stdout(out)
        .lines()
        .find_map(|l| l.strip_prefix("kappa  "))
        .expect("kappa line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn theta_of_five_cycle() {
    let out = run(&["theta", "--family", "cycle:5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("kappa  2.23606"), "{}", stdout(&out));
}

#[test]
fn theta_from_edge_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k2.edges");
    fs::write(&path, "0 1\n").unwrap();
    let out = run(&["theta", "--graph", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!((kappa(&out) - 2.0).abs() < 1e-6, "{}", stdout(&out));
}

#[test]
fn dimacs_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.col");
    fs::write(&path, "c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n").unwrap();
    let out = run(&["theta", "--graph", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!((kappa(&out) - 3.0).abs() < 1e-6, "{}", stdout(&out));
}

#[test]
fn edgeless_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.edges");
    fs::write(&path, "n 4\n").unwrap();
    for cmd in ["theta", "verify", "gp"] {
        let out = run(&[cmd, "--graph", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1));
        assert!(stderr(&out).contains("bound = 0 (no edges)"));
    }
}

#[test]
fn unknown_family_is_a_usage_error() {
    let out = run(&["gp", "--family", "dodecahedron"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown graph family"));
}

#[test]
fn graph_and_family_conflict() {
    let out = run(&["theta", "--family", "cycle:5", "--graph", "x.edges"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_petersen_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--family",
        "petersen",
        "--trials",
        "10000",
        "--seed",
        "7",
        "--model",
        "qmc",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["graph"]["n"], 10);
    assert_eq!(v["graph"]["m"], 15);
    let bound = v["bounds"][0]["bound"].as_f64().unwrap();
    assert!((bound - 5.872).abs() < 1e-3, "{bound}");
    let constants = v["constants"].as_array().unwrap();
    let symbols: Vec<&str> = constants
        .iter()
        .map(|c| c["symbol"].as_str().unwrap())
        .collect();
    assert_eq!(symbols, ["8/(3*pi)", "pi/4", "2/pi"]);
    assert!((constants[1]["value"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 4);
    for c in checks {
        assert_eq!(c["pass"], true);
        let (lhs, rhs, slack) = (
            c["lhs"].as_f64().unwrap(),
            c["rhs"].as_f64().unwrap(),
            c["slack"].as_f64().unwrap(),
        );
        assert!((slack - (lhs - rhs)).abs() <= 1e-12 * lhs.abs().max(1.0));
        assert!(c["lhs_name"].is_string() && c["rhs_name"].is_string());
    }
}

#[test]
fn verify_single_edge_and_max_cut() {
    let out = run(&["verify", "--family", "complete:2", "--trials", "2000"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("bound[qmc]  0.46220"),
        "{}",
        stdout(&out)
    );
    let out = run(&[
        "verify", "--model", "mc", "--family", "cycle:5", "--trials", "2000",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mc 4"));
}

#[test]
fn verify_xx_model() {
    let out = run(&[
        "verify",
        "--model",
        "xx",
        "--family",
        "complete_bipartite:2:3",
        "--trials",
        "2000",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
}

#[test]
fn gp_reports_ratio() {
    let out = run(&["gp", "--family", "cycle:5", "--trials", "5000"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("[PASS] gp_ratio"));
    let out = run(&["gp", "--family", "complete:2", "--trials", "100"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("[PASS] relaxation_ge_exact"));
}

#[test]
fn gp_flags_upper_bound_denominator() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("gp.json");
    let out = run(&[
        "gp",
        "--family",
        "cycle:6",
        "--trials",
        "200",
        "--max-exact-n",
        "4",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["gp"]["upper_bound_denominator"], true);
    assert_eq!(v["gp"]["denominator"], "upper_bound");
}

#[test]
fn sweep_is_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = run(&[
            "sweep",
            "--family",
            "cycle:5..9",
            "--trials",
            "500",
            "--seed",
            "3",
            "--csv",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,m,kappa,bound_qmc,bound_xx,bound_mc,mc_exact,qmc_exact,gp_relax,gp_ratio,seeds"
    );
    assert_eq!(lines.len(), 6);
    let ms: Vec<usize> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ms, [5, 6, 7, 8, 9]);
    let kappa = lines[1].split(',').nth(2).unwrap();
    let digits = kappa.chars().filter(char::is_ascii_digit).count();
    assert_eq!(digits, 12, "{kappa}");
}

#[test]
fn failing_statistical_check_prints_guidance() {
    // A single trial reports zero stderr, so any seed whose one rounded state
    // lands below the bound fails the 3-sigma check.
    let mut saw_failure = false;
    for seed in 0..20 {
        let seed = seed.to_string();
        let out = run(&[
            "verify", "--family", "cycle:5", "--trials", "1", "--seed", &seed,
        ]);
        if out.status.code() == Some(1) {
            assert!(stdout(&out).contains("--trials"), "{}", stdout(&out));
            saw_failure = true;
            break;
        }
    }
    assert!(saw_failure);
}
