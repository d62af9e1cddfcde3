use std::path::Path;
use std::process::{Command, Output};

fn coxasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxasep")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_colpos_rank_3_passes() {
    let o = coxasep(&["verify", "--suite", "colpos", "--rank", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("check,instance,residual,eps,ms\n"));
    assert!(out.contains("colpos.dynamical"));
}

#[test]
fn verify_all_bc2_passes() {
    let o = coxasep(&["verify", "--ctype", "BC", "--rank", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    for check in ["coxeter.length", "diagrams", "colpos.algebraic", "stationarity", "factorization"] {
        assert!(out.contains(check), "{check} missing");
    }
}

#[test]
fn failing_check_exits_1() {
    // swapped-role process differs from the forward one when H' != H
    let o = coxasep(&[
        "verify",
        "--suite",
        "colpos",
        "--ctype",
        "BC",
        "--rank",
        "2",
        "--m",
        "1,1",
        "--blocks",
        "2",
        "--boundary",
        "case1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colpos.dynamical"));
}

#[test]
fn hydro_header() {
    let o = coxasep(&["hydro", "--q", "0.5", "--m", "1", "--t", "200", "--trajectories", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next(), Some("y,rho_hat,stderr,rho_limit,n_traj"));
    assert_eq!(out.lines().count(), 51);
}

#[test]
fn secondclass_header_and_json() {
    let o = coxasep(&["secondclass", "--t", "3", "--trajectories", "20", "--thresholds", "-1,0,1"]);
    assert_eq!(stdout(&o).lines().next(), Some("x,count_direct,stderr_direct,rho0_shifted,stderr_shifted"));
    let o = coxasep(&["--format", "json", "secondclass", "--t", "3", "--trajectories", "20", "--thresholds", "-1,0,1"]);
    let out = stdout(&o);
    assert!(out.trim_start().starts_with('['));
    assert_eq!(out.matches("\"count_direct\"").count(), 3);
}

#[test]
fn missing_config_exits_2() {
    let o = coxasep(&["--config", "/definitely/not/here.cfg", "hydro"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_key_exits_2_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "q = 0.5\ntrajectorys = 10\n").unwrap();
    let o = coxasep(&["--config", path.to_str().unwrap(), "hydro"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trajectorys"));
    std::fs::write(&path, "q = 2\n").unwrap();
    let o = coxasep(&["--config", path.to_str().unwrap(), "hydro"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`q`"));
}

#[test]
fn small_window_exits_2_with_minimum() {
    let o = coxasep(&["hydro", "--t", "200", "--window", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("185"));
}

fn run_to(path: &Path, jobs: &str) {
    let cfg = path.with_extension("cfg");
    std::fs::write(&cfg, "q = 0.5\nm = 2\nt = 15\ntrajectories = 100\nseed = 5\n").unwrap();
    let o = coxasep(&["--config", cfg.to_str().unwrap(), "--out", path.to_str().unwrap(), "--jobs", jobs, "hydro"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("c.csv"));
    run_to(&a, "1");
    run_to(&b, "1");
    run_to(&c, "3");
    let a = std::fs::read(a).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(b).unwrap());
    assert_eq!(a, std::fs::read(c).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "t = 3\ntrajectories = 10\nseed = 1\n").unwrap();
    let a = stdout(&coxasep(&["--config", cfg.to_str().unwrap(), "--seed", "2", "secondclass"]));
    let b = stdout(&coxasep(&["secondclass", "--t", "3", "--trajectories", "10", "--seed", "2"]));
    assert_eq!(a, b);
}

#[test]
fn duality_small_window_passes() {
    let o = coxasep(&["duality", "--m", "1", "--window", "3", "--trajectories", "4000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("duality.exact"));
}

#[test]
fn simulate_emits_states() {
    let o = coxasep(&["simulate", "--rank", "3", "--m", "1,2", "--blocks", "1,1,1", "--t", "5", "--trajectories", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("traj,time,state\n0,0.0,\"[1|2,3]\"\n"));
    let o = coxasep(&["simulate", "--rank", "3"]);
    assert_eq!(o.status.code(), Some(2));
}
