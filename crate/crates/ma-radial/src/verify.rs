//! Independent checks on a solved profile: the radial Hessian
//! determinant against the right-hand side, the gradient-image measure
//! identity on annuli, and convexity / C¹-at-origin flags.
//!
//! Everything here consumes a [`Solution`] through its public sampled
//! curves — no access to solver internals — so a wrong solve cannot
//! certify itself.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{gl8_panel, KahanSum, SampledFunction};
use crate::solver::Solution;

/// det D²u at radius r for the radial profile u = g(r²/2):
/// (g″(t)·r² + g′(t))·g′(t)^{n−1} with t = r²/2.
pub fn hessian_det_radial(sol: &Solution, r: f64) -> Result<f64> {
    let t = 0.5 * r * r;
    let g1 = sol.g1.interpolate(t)?;
    let g2 = sol.g2.interpolate(t)?;
    let det = (g2 * r * r + g1) * g1.powi(sol.problem.n() as i32 - 1);
    if det.is_nan() {
        // Inside the first cell g″ has no sampled value.
        return Err(Error::Parameter(format!(
            "Hessian determinant not sampled this close to the center (r = {r})"
        )));
    }
    Ok(det)
}

/// One row of the residual table.
#[derive(Debug, Clone, Copy)]
pub struct ResidualRow {
    pub r: f64,
    pub det: f64,
    /// f(t, g(t), t g′(t)²) — what the determinant should equal.
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Relative Monge–Ampère residual max over the given radii plus the
/// row-by-row table. The residual is |det − f| / max(1, |f|): relative
/// where f is large, absolute where f is flat.
pub fn ma_residual(sol: &Solution, r_nodes: &[f64]) -> Result<(f64, Vec<ResidualRow>)> {
    residual_profile(
        sol.problem.f(),
        sol.problem.n(),
        &sol.g,
        &sol.g1,
        &sol.g2,
        r_nodes,
    )
}

/// The default residual radii: 33 Chebyshev points on [0.05, 0.95],
/// scaled to the ball radius √(2·t_max) — clear of both the center
/// limit and the boundary.
pub(crate) fn default_check_radii(t_max: f64) -> Vec<f64> {
    let ball = (2.0 * t_max).sqrt();
    let (lo, hi) = (0.05 * ball, 0.95 * ball);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    (0..33)
        .map(|j| mid - half * (std::f64::consts::PI * j as f64 / 32.0).cos())
        .collect()
}

pub(crate) fn residual_profile(
    f: &Expr,
    n: u32,
    g: &SampledFunction,
    g1: &SampledFunction,
    g2: &SampledFunction,
    r_nodes: &[f64],
) -> Result<(f64, Vec<ResidualRow>)> {
    let mut rows = Vec::with_capacity(r_nodes.len());
    let mut worst = 0.0f64;
    for &r in r_nodes {
        let t = 0.5 * r * r;
        let g1v = g1.interpolate(t)?;
        let g2v = g2.interpolate(t)?;
        let det = (g2v * r * r + g1v) * g1v.powi(n as i32 - 1);
        let rhs = f.eval(t, g.interpolate(t)?, t * g1v * g1v)?;
        let abs_diff = (det - rhs).abs();
        worst = worst.max(abs_diff / 1.0f64.max(rhs.abs()));
        rows.push(ResidualRow {
            r,
            det,
            rhs,
            abs_diff,
        });
    }
    Ok((worst, rows))
}

/// Surface measure of the unit (n−1)-sphere, ω_n = 2π^{n/2}/Γ(n/2), so
/// that |B_ρ| = (ω_n/n)·ρⁿ. Γ at integer and half-integer arguments by
/// the recurrence — exact up to rounding, no general Γ needed.
pub(crate) fn sphere_surface(n: u32) -> f64 {
    let half = 0.5 * n as f64;
    let mut gamma = if n % 2 == 0 {
        1.0 // Γ(1)
    } else {
        std::f64::consts::PI.sqrt() // Γ(1/2)
    };
    let mut arg = if n % 2 == 0 { 1.0 } else { 0.5 };
    while arg + 1.0 <= half {
        gamma *= arg;
        arg += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half) / gamma
}

/// Both sides of the gradient-image identity on the annulus r1 < |x| < r2:
/// the measure of ∇u's image, (ω_n/n)·[u′(r₂)ⁿ − u′(r₁)ⁿ], against
/// ω_n·∫ r^{n−1} φ(r²/2) dr. For an exact solution they agree; the
/// closed-form left side telescopes exactly over nested annuli.
pub fn gradient_image_measure(sol: &Solution, r1: f64, r2: f64) -> Result<(f64, f64)> {
    let ball = (2.0 * sol.grid.t_max()).sqrt();
    if !(0.0 < r1 && r1 < r2 && r2 <= ball) {
        return Err(Error::Parameter(format!(
            "annulus radii must satisfy 0 < r1 < r2 ≤ {ball}, got ({r1}, {r2})"
        )));
    }
    let n = sol.problem.n();
    let omega = sphere_surface(n);
    let image_radius = |r: f64| -> Result<f64> {
        let t = 0.5 * r * r;
        Ok(sol.g1.interpolate(t)? * r) // |∇u| = g′(t)·r
    };
    let lhs = omega / n as f64
        * (image_radius(r2)?.powi(n as i32) - image_radius(r1)?.powi(n as i32));

    // 32 uniform Gauss panels across the annulus: deterministic and far
    // below the 1e−6 comparisons made of this identity.
    let mut acc = KahanSum::default();
    let panels = 32;
    for k in 0..panels {
        let a = r1 + (r2 - r1) * k as f64 / panels as f64;
        let b = r1 + (r2 - r1) * (k + 1) as f64 / panels as f64;
        acc.add(gl8_panel(a, b, &mut |r: f64| {
            Ok(r.powi(n as i32 - 1) * sol.phi.interpolate(0.5 * r * r)?)
        })?);
    }
    let rhs = omega * acc.total();
    Ok((lhs, rhs))
}

/// Convexity and C¹-at-origin flags.
///
/// convex_ok: g′ ≥ −1e−12 at every node and the radial Hessian factor
/// g″·2t + g′ ≥ −1e−12 at interior nodes. c1_at_origin_ok: u′(r) =
/// g′(t)√(2t) vanishes at the center (flat zeros or a positive log–log
/// decay slope over the 5 smallest positive nodes), and no node-to-node
/// slope jump an order beyond its neighbors (a cone would put a jump
/// discontinuity in the radial derivative).
pub fn convexity_and_c1(sol: &Solution) -> (bool, bool) {
    let nodes = sol.grid.nodes();
    let g1 = sol.g1.values();
    let g2 = sol.g2.values();

    let mut convex_ok = g1.iter().all(|&v| v >= -1e-12);
    for i in 1..nodes.len() {
        if 2.0 * nodes[i] * g2[i] + g1[i] < -1e-12 {
            convex_ok = false;
            break;
        }
    }

    let mut c1_ok = true;
    let probe: Vec<(f64, f64)> = nodes
        .iter()
        .zip(g1)
        .skip(1)
        .take(5)
        .map(|(&t, &s)| (t, s * (2.0 * t).sqrt()))
        .collect();
    if probe.iter().any(|&(_, v)| v == 0.0) || probe.iter().all(|&(_, v)| v < 1e-12) {
        // Flat at the center: the derivative has already vanished.
    } else {
        let (t0, v0) = probe[0];
        let (t4, v4) = probe[probe.len() - 1];
        let slope = (v4.ln() - v0.ln()) / (t4.ln() - t0.ln());
        if !(slope >= 0.1) {
            c1_ok = false; // u′ does not decay toward the center
        }
    }
    // A jump in g′ an order larger than its neighbors marks a kink.
    let diffs: Vec<f64> = g1.windows(2).map(|w| w[1] - w[0]).collect();
    for i in 1..diffs.len().saturating_sub(1) {
        let local = 0.5 * (diffs[i - 1].abs() + diffs[i + 1].abs());
        if diffs[i].abs() > 10.0 * local + 1e-12 {
            c1_ok = false;
            break;
        }
    }
    (convex_ok, c1_ok)
}

/// One annulus comparison row.
#[derive(Debug, Clone, Copy)]
pub struct AnnulusRow {
    pub r1: f64,
    pub r2: f64,
    pub measure_lhs: f64,
    pub integral_rhs: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub residual_max: f64,
    pub residual_table: Vec<ResidualRow>,
    pub annuli: Vec<AnnulusRow>,
    pub convex_ok: bool,
    pub c1_at_origin_ok: bool,
}

impl VerifyReport {
    pub fn passed(&self, residual_bound: f64) -> bool {
        self.residual_max <= residual_bound && self.convex_ok && self.c1_at_origin_ok
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "verify.residual_max = {}", self.residual_max)?;
        writeln!(out, "verify.convex_ok = {}", self.convex_ok)?;
        writeln!(out, "verify.c1_at_origin_ok = {}", self.c1_at_origin_ok)?;
        for a in &self.annuli {
            writeln!(
                out,
                "verify.annulus r=[{}, {}] measure={} integral={} diff={}",
                a.r1, a.r2, a.measure_lhs, a.integral_rhs, a.abs_diff
            )?;
        }
        Ok(())
    }
}

/// Run the full default check suite: residual on the Chebyshev radii,
/// three nested annuli (whose closed-form sides telescope), and the
/// convexity / C¹ flags.
pub fn verify(sol: &Solution) -> Result<VerifyReport> {
    let (residual_max, residual_table) = ma_residual(sol, &default_check_radii(sol.grid.t_max()))?;
    let ball = (2.0 * sol.grid.t_max()).sqrt();
    let mut annuli = Vec::new();
    for (a, b) in [(0.2, 0.5), (0.5, 0.8), (0.2, 0.8)] {
        let (r1, r2) = (a * ball, b * ball);
        let (lhs, rhs) = gradient_image_measure(sol, r1, r2)?;
        annuli.push(AnnulusRow {
            r1,
            r2,
            measure_lhs: lhs,
            integral_rhs: rhs,
            abs_diff: (lhs - rhs).abs(),
        });
    }
    let (convex_ok, c1_at_origin_ok) = convexity_and_c1(sol);
    Ok(VerifyReport {
        residual_max,
        residual_table,
        annuli,
        convex_ok,
        c1_at_origin_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::problem::Problem;
    use crate::quadrature::Grid;
    use crate::solver::{picard_solve, solve_explicit};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn solved(f: &str, n: u32, bv: f64) -> Solution {
        let p = Problem::new(n, Expr::parse(f).unwrap(), bv).unwrap();
        solve_explicit(&p).unwrap()
    }

    /// Hand-build a Solution with prescribed g(t) = t·s — enough for the
    /// formula-level tests that must not depend on the solver.
    fn manufactured(n: u32, scale: f64) -> Solution {
        let p = Problem::new(n, Expr::parse("1").unwrap(), 0.5).unwrap();
        let grid = Arc::new(Grid::geometric(0.5, 64, 1.2).unwrap());
        let nn = grid.len();
        let nodes = grid.nodes().to_vec();
        let vals: Vec<f64> = nodes.iter().map(|&t| scale * t).collect();
        let ones = vec![scale; nn];
        let zeros = vec![0.0; nn];
        let g = SampledFunction::with_slopes(grid.clone(), vals, ones.clone()).unwrap();
        let g1 = SampledFunction::with_slopes(grid.clone(), ones, zeros.clone()).unwrap();
        let g2 = SampledFunction::with_slopes(grid.clone(), zeros.clone(), zeros.clone()).unwrap();
        Solution {
            problem: p,
            c_u: 0.0,
            g: g.clone(),
            g1,
            g2: g2.clone(),
            g3: g2.clone(),
            phi: SampledFunction::with_slopes(
                grid.clone(),
                vec![scale.powi(n as i32); nn],
                vec![0.0; nn],
            )
            .unwrap(),
            kappa_vals: g2.clone(),
            q: g2,
            iterations: 0,
            final_update: 0.0,
            residual_max: 0.0,
            grid,
        }
    }

    #[test]
    fn determinant_closed_forms() {
        // g(t) = t: identity Hessian.
        let sol = manufactured(3, 1.0);
        assert_relative_eq!(hessian_det_radial(&sol, 0.7).unwrap(), 1.0, max_relative = 1e-12);

        // g(t) = t²/2 (u = |x|⁴/8), n=2, r=1 → det = 3r⁴/4 = 0.75.
        let p = Problem::new(2, Expr::parse("1").unwrap(), 0.5).unwrap();
        let grid = Arc::new(Grid::geometric(0.5, 64, 1.2).unwrap());
        let nodes = grid.nodes().to_vec();
        let half_sq: Vec<f64> = nodes.iter().map(|&t| 0.5 * t * t).collect();
        let lin = nodes.clone();
        let ones = vec![1.0; nodes.len()];
        let mut base = manufactured(2, 1.0);
        base.problem = p;
        base.g = SampledFunction::with_slopes(grid.clone(), half_sq, lin.clone()).unwrap();
        base.g1 = SampledFunction::with_slopes(grid.clone(), lin, ones).unwrap();
        base.g2 =
            SampledFunction::with_slopes(grid.clone(), vec![1.0; nodes.len()], vec![0.0; nodes.len()])
                .unwrap();
        base.grid = grid;
        assert_relative_eq!(
            hessian_det_radial(&base, 1.0).unwrap(),
            0.75,
            max_relative = 1e-12
        );
    }

    #[test]
    fn determinant_matches_rhs_on_solved_profile() {
        // n=2, m=1: det D²u must reproduce r² = 2t. The g″ interpolation
        // floor at small r keeps this a touch above 1e-7 relative.
        let sol = solved("(2*t)^1", 2, 0.2357);
        for r in [0.2, 0.5, 0.9] {
            assert_relative_eq!(
                hessian_det_radial(&sol, r).unwrap(),
                r * r,
                max_relative = 5e-7
            );
        }
    }

    #[test]
    fn residual_flags_corruption() {
        let sol = solved("(2*t)^3", 2, 0.15);
        let radii = default_check_radii(0.5);
        let (clean, _) = ma_residual(&sol, &radii).unwrap();
        assert!(clean <= 1e-7, "clean residual {clean}");

        // Zero out the curvature column: the residual must blow up.
        let mut corrupted = sol.clone();
        let nn = corrupted.grid.len();
        let mut z = vec![0.0; nn];
        z[0] = f64::NAN;
        corrupted.g2 = SampledFunction::new(corrupted.grid.clone(), z).unwrap();
        let (bad, _) = ma_residual(&corrupted, &radii).unwrap();
        assert!(bad > 1e-2, "corruption undetected: {bad}");
    }

    #[test]
    fn sphere_surface_closed_forms() {
        assert_relative_eq!(sphere_surface(1), 2.0, max_relative = 1e-15);
        assert_relative_eq!(
            sphere_surface(2),
            2.0 * std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            sphere_surface(3),
            4.0 * std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            sphere_surface(4),
            2.0 * std::f64::consts::PI * std::f64::consts::PI,
            max_relative = 1e-15
        );
    }

    #[test]
    fn annulus_identity_exact_case() {
        // u = |x|²/2: image measure of the annulus is its own area,
        // π(r₂² − r₁²) in the plane.
        let sol = manufactured(2, 1.0);
        let (lhs, rhs) = gradient_image_measure(&sol, 0.5, 0.8).unwrap();
        let want = std::f64::consts::PI * (0.64 - 0.25);
        assert_relative_eq!(lhs, want, max_relative = 1e-12);
        assert_relative_eq!(rhs, want, max_relative = 1e-10);
        assert_relative_eq!(lhs, 1.2252211, max_relative = 1e-6);

        // g′ ≡ c scaling: both sides carry cⁿ.
        let sol = manufactured(2, 3.0);
        let (lhs, rhs) = gradient_image_measure(&sol, 0.5, 0.8).unwrap();
        assert_relative_eq!(lhs, 9.0 * want, max_relative = 1e-12);
        assert_relative_eq!(rhs, 9.0 * want, max_relative = 1e-10);
    }

    #[test]
    fn annulus_identity_on_solved_problems() {
        for (f, n) in [("(2*t)^2", 2u32), ("(2*t)^3", 3), ("exp(-1/t)", 2)] {
            let sol = solved(f, n, 0.3);
            for (r1, r2) in [(0.1, 0.4), (0.3, 0.9), (0.55, 0.6)] {
                let (lhs, rhs) = gradient_image_measure(&sol, r1, r2).unwrap();
                assert!(
                    (lhs - rhs).abs() <= 1e-6,
                    "f={f} annulus ({r1},{r2}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn annulus_measure_telescopes_exactly() {
        let sol = solved("(2*t)^2", 2, 0.3);
        let (l12, _) = gradient_image_measure(&sol, 0.2, 0.5).unwrap();
        let (l23, _) = gradient_image_measure(&sol, 0.5, 0.9).unwrap();
        let (l13, _) = gradient_image_measure(&sol, 0.2, 0.9).unwrap();
        assert!(
            (l13 - (l12 + l23)).abs() <= 1e-12 * l13.abs().max(1.0),
            "telescoping broken: {l13} vs {}",
            l12 + l23
        );
    }

    #[test]
    fn annulus_rejects_bad_radii() {
        let sol = manufactured(2, 1.0);
        assert!(gradient_image_measure(&sol, 0.0, 0.5).is_err());
        assert!(gradient_image_measure(&sol, 0.6, 0.5).is_err());
        assert!(gradient_image_measure(&sol, 0.5, 1.5).is_err());
    }

    #[test]
    fn convexity_flags() {
        let sol = manufactured(2, 1.0);
        let (convex, c1) = convexity_and_c1(&sol);
        assert!(convex && c1);

        // Negated profile: concave, must fail.
        let mut neg = manufactured(2, -1.0);
        neg.phi = manufactured(2, 1.0).phi; // φ irrelevant here
        let (convex, _) = convexity_and_c1(&neg);
        assert!(!convex);
    }

    #[test]
    fn convexity_on_solved_problems() {
        for (f, n) in [("1", 2u32), ("(2*t)^1", 2), ("(2*t)^3", 3), ("exp(-1/t)", 2)] {
            let sol = solved(f, n, 0.4);
            let (convex, c1) = convexity_and_c1(&sol);
            assert!(convex, "f={f} not convex");
            assert!(c1, "f={f} fails C¹ at origin");
        }
    }

    #[test]
    fn full_report_on_coupled_problem() {
        let p = Problem::new(2, Expr::parse("(2*t)^2*exp(xi)").unwrap(), 0.0).unwrap();
        let sol = picard_solve(&p).unwrap();
        let report = verify(&sol).unwrap();
        assert!(report.passed(1e-6), "{report}");
        assert_eq!(report.residual_table.len(), 33);
        assert_eq!(report.annuli.len(), 3);
        // The report's residual agrees with the one stored at solve time.
        assert_eq!(report.residual_max.to_bits(), sol.residual_max.to_bits());
        // Nested annuli telescope inside the report too.
        let sum = report.annuli[0].measure_lhs + report.annuli[1].measure_lhs;
        assert!((report.annuli[2].measure_lhs - sum).abs() <= 1e-12);
    }
}
