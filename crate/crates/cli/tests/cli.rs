use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn tailmdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailmdp")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.trim().strip_prefix(&prefix).map(str::to_owned))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .parse()
        .unwrap()
}

fn summary(dir: &Path, key: &str) -> String {
    let text = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_owned)).unwrap()
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = tailmdp(&["simulate", "--samples", "500", "--out", a.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_tailmdp"))
        .args(["simulate", "--samples", "500", "--out", b.to_str().unwrap()])
        .env("MDP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    for f in ["trajectories.csv", "estimate.txt"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("trajectories.csv")).unwrap();
    assert!(csv.starts_with("trajectory_id,t,state,action,reward\n"));
}

#[test]
fn simulate_needs_two_samples_and_writes_nothing() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("x");
    let o = tailmdp(&["simulate", "--samples", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn growth_positive_part_is_below_the_envelope_series() {
    let dir = tempdir().unwrap();
    let o = tailmdp(&["simulate", "--model", "growth", "--samples", "2000", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(field(&text, "positive_part") <= field(&text, "envelope_series_sum"));
}

#[test]
fn condition_c_is_certified_for_the_beta_model() {
    let o = tailmdp(&["verify", "condition-c"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("certified: true"));
}

#[test]
fn coercivity_fails_on_the_full_domain_and_passes_on_keps() {
    let o = tailmdp(&["verify", "coercivity", "--net-step", "1e-2"]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("passed: false"));
    assert!(text.contains("- x=0 "), "{text}");
    let o = tailmdp(&["verify", "coercivity", "--domain", "keps:0.1", "--net-step", "1e-2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn unreachable_tight_set_target_exits_one() {
    let o = tailmdp(&["verify", "tight-set", "--target", "1e-9"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("target unreachable"));
}

#[test]
fn toy_solve_matches_the_brute_force_oracle() {
    let dir = tempdir().unwrap();
    let o =
        tailmdp(&["solve", "--model", "toy", "--oracle", "--samples", "5000", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(summary(dir.path(), "oracle"), "MATCH");
    assert_eq!(summary(dir.path(), "cross_check"), "PASS");
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("o");
    let o = tailmdp(&["solve", "--oracle", "--grid", "21", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("too large"));
    assert!(!out.exists());
}

#[test]
fn beta_solve_cross_checks() {
    // At grid 101 the refinement gap understates the discretization bias and
    // the check fails; at the default grid it passes.
    let dir = tempdir().unwrap();
    let o = tailmdp(&["solve", "--samples", "20000", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(summary(dir.path(), "cross_check"), "PASS");
    let policy = std::fs::read_to_string(dir.path().join("policy.csv")).unwrap();
    assert!(policy.starts_with("t,state,action\n"));
}

#[test]
fn growth_values_increase_in_capital() {
    let dir = tempdir().unwrap();
    let o = tailmdp(&[
        "solve",
        "--model",
        "growth",
        "--grid",
        "51",
        "--samples",
        "5000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("value.csv")).unwrap();
    let first: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[0] == "2")
        .map(|c| c[2].parse().unwrap())
        .collect();
    assert!(first.len() > 2);
    assert!(first.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{first:?}");
}

#[test]
fn weakconv_scenarios_report_their_verdicts() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tailmdp(&["weakconv", "--scenario", "usc-counterexample", "--out", out]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("verdict: VIOLATED"));
    let margins = std::fs::read_to_string(dir.path().join("margins.csv")).unwrap();
    assert!(margins.lines().skip(1).all(|l| l.ends_with(",1")));
    let o = tailmdp(&["weakconv", "--scenario", "bounded-control", "--out", out]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: HOLDS"));
    let o = tailmdp(&["weakconv", "--scenario", "no-such-scenario", "--out", out]);
    assert_eq!(code(&o), 2);
}

#[test]
fn dump_config_round_trips() {
    let dir = tempdir().unwrap();
    let o = tailmdp(&["solve", "--model", "growth", "--grid", "51", "--betas", "-3,1", "--dump-config"]);
    assert_eq!(code(&o), 0);
    let dumped = stdout(&o);
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, &dumped).unwrap();
    let o = tailmdp(&["solve", "--config", path.to_str().unwrap(), "--dump-config"]);
    assert_eq!(stdout(&o), dumped);
    // Flags override the file.
    let o = tailmdp(&["solve", "--config", path.to_str().unwrap(), "--grid", "31", "--dump-config"]);
    assert!(stdout(&o).contains("grid = 31"));
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    std::fs::write(&path, "colour = red\n").unwrap();
    let o = tailmdp(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown config key"));
    assert_eq!(code(&tailmdp(&["simulate", "--grid", "200", "--dump-config"])), 2);
    assert_eq!(code(&tailmdp(&["simulate", "--model", "custom-file"])), 2);
}
