//! End-to-end runs of the `ma-radial` binary: argument handling, exit
//! codes, and the stdout contract downstream tooling keys on.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ma-radial"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

/// The value printed for `key = value` on the first matching line.
fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
}

// Small grid: these tests exercise plumbing, not accuracy.
const FAST: &str = "grid_nodes = 128\ngrid_grading = 1.1\n";

#[test]
fn solve_writes_the_profile_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.cfg",
        &format!("n = 2\nf = 1\nboundary_value = 0.5\n{FAST}"),
    );
    let out = dir.path().join("sol.csv");
    let run = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));

    let text = stdout(&run);
    assert_eq!(field(&text, "solve.iterations"), "0");
    let residual: f64 = field(&text, "solve.residual_max").parse().unwrap();
    assert!(residual <= 1e-10, "residual_max = {residual}");

    // f = 1 in the plane integrates to g(t) = t exactly.
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,r,g,g1,g2,g3,phi,kappa,residual"));
    for line in lines {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse().unwrap_or(f64::NAN))
            .collect();
        assert!((cells[2] - cells[0]).abs() <= 1e-12, "g != t on `{line}`");
    }
}

#[test]
fn config_problems_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");

    let missing = write(dir.path(), "m.cfg", "f = 1\nboundary_value = 0.5\n");
    let run = bin()
        .args(["solve", "--config"])
        .arg(&missing)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("missing key: n"), "{}", stderr(&run));

    let unknown = write(
        dir.path(),
        "u.cfg",
        "n = 2\nf = 1\nboundary_value = 0\nnodes = 64\n",
    );
    let run = bin()
        .args(["analyze", "--config"])
        .arg(&unknown)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("unknown key: nodes"), "{}", stderr(&run));

    let range = write(
        dir.path(),
        "r.cfg",
        "n = 2\nf = 1\nboundary_value = 0\ndamping = 2\n",
    );
    let run = bin()
        .args(["solve", "--config"])
        .arg(&range)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("damping"), "{}", stderr(&run));
}

#[test]
fn coupled_problem_converges_within_its_budget() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.cfg",
        &format!("n = 2\nf = (2*t)^2*exp(xi)\nboundary_value = 0\ntol = 1e-10\n{FAST}"),
    );
    let out = dir.path().join("sol.csv");
    let run = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let iterations: usize = field(&stdout(&run), "solve.iterations").parse().unwrap();
    assert!((1..=60).contains(&iterations), "iterations = {iterations}");
}

#[test]
fn verify_round_trips_and_rejects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.cfg",
        &format!("n = 3\nf = 1 + t\nboundary_value = 0.25\n{FAST}"),
    );
    let out = dir.path().join("sol.csv");
    let run = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));

    let run = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--solution")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = stdout(&run);
    assert_eq!(field(&text, "verify.passed"), "true");
    assert_eq!(field(&text, "verify.convex_ok"), "true");
    assert_eq!(field(&text, "verify.c1_at_origin_ok"), "true");

    // Nudge one g1 cell; the profile no longer satisfies the equation it
    // claims to.
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let mut cells: Vec<String> = lines[70].split(',').map(str::to_string).collect();
    cells[3] = format!("{}", cells[3].parse::<f64>().unwrap() + 1e-8);
    lines[70] = cells.join(",");
    let bad = write(dir.path(), "bad.csv", &(lines.join("\n") + "\n"));
    let run = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--solution")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3), "{}", stderr(&run));

    // A file that is not a solution table at all fails the same way.
    let garbage = write(dir.path(), "g.csv", "t,r,g\n1,2,3\n");
    let run = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--solution")
        .arg(&garbage)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(3), "{}", stderr(&run));
}

#[test]
fn analyze_reports_the_verdict_and_comparability() {
    let dir = tempfile::tempdir().unwrap();
    let smooth = write(
        dir.path(),
        "s.cfg",
        "n = 3\nf = (2*t)^3\nboundary_value = 0.2\n",
    );
    let run = bin().args(["analyze", "--config"]).arg(&smooth).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = stdout(&run);
    assert_eq!(field(&text, "smoothness.tau"), "3");
    assert_eq!(field(&text, "smoothness.verdict"), "Smooth");
    assert_eq!(field(&text, "comparability.holds"), "true");

    let rough = write(
        dir.path(),
        "r.cfg",
        "n = 3\nf = (2*t)^2\nboundary_value = 0.2\n",
    );
    let run = bin().args(["analyze", "--config"]).arg(&rough).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert_eq!(field(&stdout(&run), "smoothness.verdict"), "NonSmoothAtOrigin");

    // Fractional vanishing sits outside the integer dichotomy.
    let fractional = write(
        dir.path(),
        "f.cfg",
        "n = 2\nf = t^2.5\nboundary_value = 0.2\n",
    );
    let run = bin()
        .args(["analyze", "--config"])
        .arg(&fractional)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(4), "{}", stderr(&run));
    assert_eq!(field(&stdout(&run), "smoothness.verdict"), "Indeterminate");
}

#[test]
fn demo_recovers_the_closed_form_family() {
    let run = bin()
        .args(["demo", "homogeneous", "--n", "2", "--m", "1"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = stdout(&run);
    assert_eq!(field(&text, "demo.expected_exponent"), "3");
    assert_eq!(field(&text, "demo.verdict"), "NonSmoothAtOrigin");
    let fitted: f64 = field(&text, "demo.fitted_exponent").parse().unwrap();
    assert!((fitted - 3.0).abs() <= 1e-6, "fitted exponent {fitted}");

    let run = bin()
        .args(["demo", "homogeneous", "--n", "2", "--m", "0"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    assert_eq!(field(&stdout(&run), "demo.verdict"), "Smooth");

    let run = bin()
        .args(["demo", "homogeneous", "--n", "3", "--m", "3"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    let text = stdout(&run);
    assert_eq!(field(&text, "demo.verdict"), "Smooth");
    assert_eq!(field(&text, "demo.expected_exponent"), "4");
}

#[test]
fn unknown_subcommands_fail_fast() {
    let run = bin().arg("optimize").output().unwrap();
    assert_eq!(run.status.code(), Some(2), "clap usage errors exit 2");
    let run = bin().output().unwrap();
    assert_ne!(run.status.code(), Some(0));
}
