//! Subcommand drivers: everything the binary does, minus argument
//! parsing, so the same entry points run under integration tests.
//!
//! Exit codes: 0 success; 1 invalid input (config, expression, parameter
//! ranges); 2 solver non-convergence; 3 verification failure (bad or
//! mismatched solution file, or residual above [`RESIDUAL_BOUND`]);
//! 4 indeterminate smoothness verdict.

use std::path::Path;

use crate::catalog::{homogeneous_coefficient, homogeneous_problem};
use crate::cli::config::ConfigFile;
use crate::cli::csv;
use crate::error::{Error, Result};
use crate::problem::check_comparability;
use crate::regularity::{classify, Verdict, DEFAULT_MAX_ORDER};
use crate::solver::{solve, Solution};
use crate::verify::{hessian_det_radial, verify, VerifyReport};

/// Residual a solution must stay under to count as verified — the same
/// accuracy target the solver is tested against. The config file
/// controls the iteration tolerance, not this acceptance bound.
pub const RESIDUAL_BOUND: f64 = 1e-6;

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    match err {
        Error::NonConvergence { .. } => 2,
        Error::SolutionFile(_) => 3,
        Error::Indeterminate { .. } => 4,
        _ => 1,
    }
}

pub fn run_solve(config_path: &Path, out_path: &Path) -> i32 {
    let sol = match solve_to_csv(config_path, out_path) {
        Ok(sol) => sol,
        Err(e) => return fail(&e),
    };
    println!("solve.iterations = {}", sol.iterations);
    println!("solve.final_update = {}", sol.final_update);
    println!("solve.residual_max = {}", sol.residual_max);
    println!("solve.out = {}", out_path.display());
    if sol.residual_max > RESIDUAL_BOUND {
        eprintln!(
            "error: residual_max {} exceeds the verification bound {RESIDUAL_BOUND}",
            sol.residual_max
        );
        return 3;
    }
    0
}

fn solve_to_csv(config_path: &Path, out_path: &Path) -> Result<Solution> {
    let cfg = ConfigFile::load(config_path)?;
    let sol = solve(&cfg.problem()?)?;
    let text = csv::render_csv(&csv::table_from_solution(&sol));
    std::fs::write(out_path, text).map_err(|e| Error::io(out_path, e))?;
    Ok(sol)
}

pub fn run_analyze(config_path: &Path) -> i32 {
    match analyze(config_path) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn analyze(config_path: &Path) -> Result<i32> {
    let cfg = ConfigFile::load(config_path)?;
    let p = cfg.problem()?;
    let kappa = p.kappa();
    println!("analyze.kappa = {kappa}");
    let report = classify(&kappa, p.n(), DEFAULT_MAX_ORDER)?;
    print!("{report}");
    for (k, c) in report.evidence.jet_coefficients.iter().enumerate() {
        if *c != 0.0 {
            println!("smoothness.jet.{k} = {c}");
        }
    }
    if let Some(&(t, ratio)) = report.evidence.decay_ratios.last() {
        println!("smoothness.decay.final = {ratio} at t = {t}");
    }
    let (xi_range, zeta_range) = p.comparability_box(0.0);
    let comp = check_comparability(&p, xi_range, zeta_range, (33, 9, 9))?;
    print!("{comp}");
    Ok(if report.verdict == Verdict::Indeterminate {
        4
    } else {
        0
    })
}

pub fn run_verify(config_path: &Path, solution_path: &Path) -> i32 {
    let report = match verify_csv(config_path, solution_path) {
        Ok(report) => report,
        Err(e) => return fail(&e),
    };
    print!("{report}");
    let passed = report.passed(RESIDUAL_BOUND);
    println!("verify.passed = {passed}");
    if passed {
        0
    } else {
        eprintln!(
            "error: verification failed (residual_max = {}, convex_ok = {}, c1_at_origin_ok = {})",
            report.residual_max, report.convex_ok, report.c1_at_origin_ok
        );
        3
    }
}

fn verify_csv(config_path: &Path, solution_path: &Path) -> Result<VerifyReport> {
    let cfg = ConfigFile::load(config_path)?;
    let p = cfg.problem()?;
    let text =
        std::fs::read_to_string(solution_path).map_err(|e| Error::io(solution_path, e))?;
    let table = csv::parse_csv(&text)?;
    let sol = csv::rebuild_solution(&p, &table)?;
    verify(&sol)
}

pub fn run_demo_homogeneous(n: u32, m: u32) -> i32 {
    match demo_homogeneous(n, m) {
        Ok(()) => 0,
        Err(e) => fail(&e),
    }
}

/// Least-squares line through (x, y); returns (slope, intercept).
fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for (&x, &y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    (slope, my - slope * mx)
}

fn demo_homogeneous(n: u32, m: u32) -> Result<()> {
    let p = homogeneous_problem(n, m)?;
    let sol = solve(&p)?;
    let exponent = 2.0 + 2.0 * m as f64 / n as f64;
    let coefficient = homogeneous_coefficient(n, m);

    // u(r) should be c·r^p: read c and p back off the solved profile.
    let radii: Vec<f64> = (0..=60)
        .map(|j| 0.05 * 20.0f64.powf(j as f64 / 60.0))
        .collect();
    let mut ln_r = Vec::with_capacity(radii.len());
    let mut ln_u = Vec::with_capacity(radii.len());
    let mut det_err = 0.0f64;
    for &r in &radii {
        ln_r.push(r.ln());
        ln_u.push(sol.u(r)?.ln());
        let det = hessian_det_radial(&sol, r)?;
        let want = r.powi(2 * m as i32);
        det_err = det_err.max((det - want).abs() / 1.0f64.max(want));
    }
    let (fitted_exponent, intercept) = fit_line(&ln_r, &ln_u);
    let verdict = classify(&p.kappa(), n, DEFAULT_MAX_ORDER)?;

    println!("demo.family = u = c*r^p solving det D2u = r^{}", 2 * m);
    println!("demo.n = {n}");
    println!("demo.m = {m}");
    println!("demo.fitted_coefficient = {}", intercept.exp());
    println!("demo.expected_coefficient = {coefficient}");
    println!("demo.fitted_exponent = {fitted_exponent}");
    println!("demo.expected_exponent = {exponent}");
    println!("demo.determinant_defect_max = {det_err}");
    println!("demo.residual_max = {}", sol.residual_max);
    println!("demo.verdict = {}", verdict.verdict);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn solve_writes_csv_and_verify_accepts_it() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "p.cfg",
            "n = 2\nf = 1\nboundary_value = 0.5\ngrid_nodes = 128\ngrid_grading = 1.1\n",
        );
        let out = dir.path().join("sol.csv");
        assert_eq!(run_solve(&cfg, &out), 0);

        let table = csv::parse_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
        // f = 1, n = 2 makes g(t) = t exactly.
        for (t, g) in table.t.iter().zip(&table.g) {
            assert!((t - g).abs() <= 1e-12, "g({t}) = {g}");
        }
        assert_eq!(run_verify(&cfg, &out), 0);
    }

    #[test]
    fn config_errors_exit_one() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(dir.path(), "p.cfg", "f = 1\nboundary_value = 0.5\n");
        let out = dir.path().join("sol.csv");
        assert_eq!(run_solve(&cfg, &out), 1);
        assert_eq!(run_analyze(&cfg), 1);
        assert_eq!(run_solve(&dir.path().join("absent.cfg"), &out), 1);
    }

    #[test]
    fn non_convergence_exits_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "p.cfg",
            "n = 2\nf = (2*t)^2*exp(xi)\nboundary_value = 0\ngrid_nodes = 128\ngrid_grading = 1.1\nmax_iter = 2\n",
        );
        assert_eq!(run_solve(&cfg, &dir.path().join("sol.csv")), 2);
    }

    #[test]
    fn corrupt_solution_exits_three() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write(
            dir.path(),
            "p.cfg",
            "n = 2\nf = 1\nboundary_value = 0.5\ngrid_nodes = 128\ngrid_grading = 1.1\n",
        );
        let out = dir.path().join("sol.csv");
        assert_eq!(run_solve(&cfg, &out), 0);

        // Perturb the g1 cell of one middle row; the stored residual
        // column no longer follows from the data.
        let text = std::fs::read_to_string(&out).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut fields: Vec<String> = lines[60].split(',').map(str::to_string).collect();
        fields[3] = format!("{}", fields[3].parse::<f64>().unwrap() + 1e-9);
        lines[60] = fields.join(",");
        let bad = write(dir.path(), "bad.csv", &(lines.join("\n") + "\n"));
        assert_eq!(run_verify(&cfg, &bad), 3);
    }

    #[test]
    fn analyze_exit_codes_follow_the_verdict() {
        let dir = tempfile::tempdir().unwrap();
        let smooth = write(
            dir.path(),
            "s.cfg",
            "n = 3\nf = (2*t)^3\nboundary_value = 0.2\n",
        );
        assert_eq!(run_analyze(&smooth), 0);
        let unresolved = write(
            dir.path(),
            "u.cfg",
            "n = 2\nf = t^2.5\nboundary_value = 0.2\n",
        );
        assert_eq!(run_analyze(&unresolved), 4);
    }

    #[test]
    fn demo_runs_the_reference_family() {
        assert_eq!(run_demo_homogeneous(2, 1), 0);
        assert_eq!(run_demo_homogeneous(2, 0), 0);
        assert_eq!(run_demo_homogeneous(3, 3), 0);
    }
}
