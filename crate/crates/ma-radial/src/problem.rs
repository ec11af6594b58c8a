//! Problem instances det D²u = f(|x|²/2, u, |∇u|²/2) on the unit ball,
//! restricted to radial data: dimension, right-hand side, Dirichlet value.
//!
//! Beyond holding the data this module answers two structural questions
//! about f near the origin: whether f(t,ξ,ζ) is comparable to its axis
//! restriction κ(t) = f(t,0,0) on a box around (ξ,ζ) = (0,0) — the
//! hypothesis that lets κ alone control regularity — and what the Taylor
//! factorization f = s^ℓ·ψ(s,ξ,ζ) looks like when f has a jet at 0.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel::par_map;
use crate::quadrature::Grid;

/// Fixed-point iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Relative sup-norm bound on the φ update that counts as converged.
    pub tolerance: f64,
    pub max_iter: usize,
    /// Fraction of the Picard update applied per step; 1 is undamped.
    pub damping: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams { tolerance: 1e-10, max_iter: 200, damping: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    n: u32,
    f: Expr,
    boundary_value: f64,
    t_max: f64,
    grid_nodes: usize,
    grid_grading: f64,
    params: SolverParams,
}

impl Problem {
    /// A problem with the default span t_max = 1/2 (the whole open unit
    /// ball), default grid, and default solver controls.
    pub fn new(n: u32, f: Expr, boundary_value: f64) -> Result<Problem> {
        let p = Problem {
            n,
            f,
            boundary_value,
            t_max: 0.5,
            grid_nodes: Grid::DEFAULT_NODES,
            grid_grading: Grid::DEFAULT_RATIO,
            params: SolverParams::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_t_max(mut self, t_max: f64) -> Result<Problem> {
        self.t_max = t_max;
        self.validate()?;
        Ok(self)
    }

    pub fn with_grid(mut self, nodes: usize, grading: f64) -> Result<Problem> {
        self.grid_nodes = nodes;
        self.grid_grading = grading;
        self.validate()?;
        Ok(self)
    }

    pub fn with_params(mut self, params: SolverParams) -> Result<Problem> {
        self.params = params;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Parameter("dimension must be at least 1".into()));
        }
        if !(self.t_max > 0.0 && self.t_max <= 1.0) {
            return Err(Error::Parameter(format!(
                "t_max must lie in (0, 1], got {}",
                self.t_max
            )));
        }
        if !self.boundary_value.is_finite() {
            return Err(Error::Parameter("boundary value must be finite".into()));
        }
        if !(self.params.tolerance > 0.0) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive, got {}",
                self.params.tolerance
            )));
        }
        if self.params.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if !(self.params.damping > 0.0 && self.params.damping <= 1.0) {
            return Err(Error::Parameter(format!(
                "damping must lie in (0, 1], got {}",
                self.params.damping
            )));
        }
        // Building the grid validates node count and grading.
        Grid::geometric(self.t_max, self.grid_nodes, self.grid_grading)?;
        // f must have a finite value at the center, possibly as a limit.
        let v = value_or_limit(&self.f, 0.0, 0.0, 0.0)?;
        if !v.is_finite() {
            return Err(Error::Parameter(format!(
                "f(0,0,0) is not finite (got {v})"
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn boundary_value(&self) -> f64 {
        self.boundary_value
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn params(&self) -> SolverParams {
        self.params
    }

    pub fn grid_nodes(&self) -> usize {
        self.grid_nodes
    }

    pub fn grid_grading(&self) -> f64 {
        self.grid_grading
    }

    pub fn grid(&self) -> Grid {
        // Validated at construction; rebuilding cannot fail.
        Grid::geometric(self.t_max, self.grid_nodes, self.grid_grading)
            .expect("grid parameters were validated")
    }

    /// The axis restriction κ(t) = f(t, 0, 0) as a one-variable
    /// expression; evaluation agrees with f bitwise.
    pub fn kappa(&self) -> Expr {
        self.f.substitute(0.0, 0.0)
    }

    /// κ(t), with κ(0) taken as the limit t → 0⁺ when the expression is
    /// not directly evaluable there (exp(−1/t) and friends).
    pub fn kappa_at(&self, t: f64) -> Result<f64> {
        value_or_limit(&self.f, t, 0.0, 0.0)
    }

    /// Default comparability sampling box. `zeta_scale` should be the
    /// largest sampled t·g′(t)² when a solution is available, 0 otherwise;
    /// ζ then ranges over a 10% margin of the attained slopes.
    pub fn comparability_box(&self, zeta_scale: f64) -> ((f64, f64), (f64, f64)) {
        let xi = 0.1 * 1.0f64.max(self.boundary_value.abs());
        ((-xi, xi), (0.0, 0.1 * (1.0 + zeta_scale)))
    }
}

/// Evaluate f at (t, ξ, ζ); if the expression has no value there (a
/// removable 0/0 like sin(t)/t, or a flat composite like exp(−1/t) at
/// t = 0), probe a dyadic ladder t = 2⁻ʲ and accept the limit when the
/// tail is Cauchy or evaporates below 1e−250. Divergent expressions keep
/// their original domain error.
pub(crate) fn value_or_limit(f: &Expr, t: f64, xi: f64, zeta: f64) -> Result<f64> {
    let err = match f.eval(t, xi, zeta) {
        Ok(v) => return Ok(v),
        Err(e) => e,
    };
    if t != 0.0 {
        return Err(err);
    }
    let mut vals = [0.0f64; 6];
    for (i, j) in (28..=48).step_by(4).enumerate() {
        match f.eval(2f64.powi(-j), xi, zeta) {
            Ok(v) => vals[i] = v,
            Err(_) => return Err(err),
        }
    }
    if vals.iter().all(|v| v.abs() < 1e-250) {
        return Ok(0.0);
    }
    let last = vals[5];
    let d_last = (vals[5] - vals[4]).abs();
    let d_first = (vals[1] - vals[0]).abs();
    if last.is_finite() && d_last <= 1e-9 * (1.0 + last.abs()) && d_last <= d_first + 1e-300 {
        return Ok(last);
    }
    Err(err)
}

/// Sampled two-sided comparison of f(t,ξ,ζ) against κ(t) = f(t,0,0).
#[derive(Debug, Clone)]
pub struct ComparabilityReport {
    /// inf of the ratio f/κ over the sampled box.
    pub c_lower: f64,
    /// sup of the ratio over the sampled box.
    pub c_upper: f64,
    /// Same extrema restricted to t ≤ 0.05 (NaN when no sample lies
    /// there); reported separately because the hypothesis only needs to
    /// hold near the origin.
    pub c_lower_near_origin: f64,
    pub c_upper_near_origin: f64,
    pub xi_range: (f64, f64),
    pub zeta_range: (f64, f64),
    pub holds: bool,
    /// The sup-attaining sample, or the offending point when κ vanishes
    /// while f does not (ratio = ∞ there).
    pub witness: Option<RatioSample>,
    /// Tensor points actually compared (both-zero points are excluded).
    pub compared: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub t: f64,
    pub xi: f64,
    pub zeta: f64,
    pub ratio: f64,
}

impl std::fmt::Display for ComparabilityReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "comparability.holds = {}", self.holds)?;
        writeln!(out, "comparability.c_lower = {}", self.c_lower)?;
        writeln!(out, "comparability.C_upper = {}", self.c_upper)?;
        writeln!(
            out,
            "comparability.c_lower.near_origin = {}",
            self.c_lower_near_origin
        )?;
        writeln!(
            out,
            "comparability.C_upper.near_origin = {}",
            self.c_upper_near_origin
        )?;
        writeln!(
            out,
            "comparability.box.xi = [{}, {}]",
            self.xi_range.0, self.xi_range.1
        )?;
        writeln!(
            out,
            "comparability.box.zeta = [{}, {}]",
            self.zeta_range.0, self.zeta_range.1
        )?;
        writeln!(out, "comparability.compared = {}", self.compared)?;
        if let Some(w) = &self.witness {
            writeln!(
                out,
                "comparability.witness = (t={}, xi={}, zeta={}) ratio={}",
                w.t, w.xi, w.zeta, w.ratio
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Default)]
enum PointOutcome {
    #[default]
    Skipped,
    Ratio(f64),
    KappaZeroOnly,
    Negative(f64),
}

/// Sample the ratio f(t,ξ,ζ)/κ(t) over a tensor box and report its
/// extrema. A sampled certificate, not a proof: `holds` means every
/// compared ratio was finite and positive.
///
/// t runs geometrically from the smallest positive grid node to t_max, so
/// the deep-origin regime is represented; points where f and κ both
/// vanish are excluded (the hypothesis constrains nothing there).
pub fn check_comparability(
    p: &Problem,
    xi_range: (f64, f64),
    zeta_range: (f64, f64),
    grid_counts: (usize, usize, usize),
) -> Result<ComparabilityReport> {
    let (xi_lo, xi_hi) = xi_range;
    let (zeta_lo, zeta_hi) = zeta_range;
    if !(xi_lo <= 0.0 && 0.0 <= xi_hi) {
        return Err(Error::Parameter(format!(
            "xi range [{xi_lo}, {xi_hi}] must contain 0"
        )));
    }
    if !(zeta_lo == 0.0 && zeta_hi >= 0.0) {
        return Err(Error::Parameter(format!(
            "zeta range [{zeta_lo}, {zeta_hi}] must start at 0"
        )));
    }
    let (nt, nxi, nzeta) = grid_counts;
    if nt < 2 || nxi < 2 || nzeta < 2 {
        return Err(Error::Parameter(
            "need at least 2 samples per axis".into(),
        ));
    }

    let grid = p.grid();
    let t_lo = grid.smallest_positive();
    let t_hi = grid.t_max();
    let log_step = (t_hi / t_lo).ln() / (nt - 1) as f64;
    let ts: Vec<f64> = (0..nt)
        .map(|i| {
            if i + 1 == nt {
                t_hi
            } else {
                t_lo * (log_step * i as f64).exp()
            }
        })
        .collect();
    let xis: Vec<f64> = (0..nxi)
        .map(|i| xi_lo + (xi_hi - xi_lo) * i as f64 / (nxi - 1) as f64)
        .collect();
    let zetas: Vec<f64> = (0..nzeta)
        .map(|i| zeta_lo + (zeta_hi - zeta_lo) * i as f64 / (nzeta - 1) as f64)
        .collect();

    let mut kappas = Vec::with_capacity(nt);
    for &t in &ts {
        let k = p.f.eval(t, 0.0, 0.0)?;
        if k < 0.0 {
            return Err(Error::RhsNegative { t, xi: 0.0, zeta: 0.0, value: k });
        }
        kappas.push(k);
    }

    let f = &p.f;
    let total = nt * nxi * nzeta;
    let outcomes: Vec<Option<Result<PointOutcome>>> = par_map(total, |idx| {
        let it = idx / (nxi * nzeta);
        let ixi = (idx / nzeta) % nxi;
        let izeta = idx % nzeta;
        let (t, xi, zeta) = (ts[it], xis[ixi], zetas[izeta]);
        Some(f.eval(t, xi, zeta).map(|v| {
            if v < 0.0 {
                return PointOutcome::Negative(v);
            }
            let k = kappas[it];
            if k == 0.0 {
                if v == 0.0 {
                    PointOutcome::Skipped
                } else {
                    PointOutcome::KappaZeroOnly
                }
            } else {
                PointOutcome::Ratio(v / k)
            }
        }))
    });

    let coords = |idx: usize| {
        let it = idx / (nxi * nzeta);
        let ixi = (idx / nzeta) % nxi;
        let izeta = idx % nzeta;
        (ts[it], xis[ixi], zetas[izeta])
    };

    let mut c_lower = f64::INFINITY;
    let mut c_upper = f64::NEG_INFINITY;
    let mut near = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sup_at = None;
    let mut zero_denom_at = None;
    let mut compared = 0usize;
    for (idx, out) in outcomes.into_iter().enumerate() {
        let (t, xi, zeta) = coords(idx);
        match out.expect("par_map fills every index")? {
            PointOutcome::Skipped => {}
            PointOutcome::Negative(value) => {
                return Err(Error::RhsNegative { t, xi, zeta, value });
            }
            PointOutcome::KappaZeroOnly => {
                if zero_denom_at.is_none() {
                    zero_denom_at = Some(RatioSample { t, xi, zeta, ratio: f64::INFINITY });
                }
                compared += 1;
            }
            PointOutcome::Ratio(r) => {
                compared += 1;
                c_lower = c_lower.min(r);
                if r > c_upper {
                    c_upper = r;
                    sup_at = Some(RatioSample { t, xi, zeta, ratio: r });
                }
                if t <= 0.05 {
                    near.0 = near.0.min(r);
                    near.1 = near.1.max(r);
                }
            }
        }
    }

    let ratios_ok = compared > 0
        && zero_denom_at.is_none()
        && c_lower > 0.0
        && c_upper.is_finite();
    Ok(ComparabilityReport {
        c_lower: if compared > 0 { c_lower } else { f64::NAN },
        c_upper: if compared > 0 { c_upper } else { f64::NAN },
        c_lower_near_origin: if near.0.is_finite() { near.0 } else { f64::NAN },
        c_upper_near_origin: if near.1.is_finite() { near.1 } else { f64::NAN },
        xi_range,
        zeta_range,
        holds: ratios_ok,
        witness: zero_denom_at.or(sup_at),
        compared,
    })
}

/// The factorization f(s,ξ,ζ) = s^ℓ·ψ(s,ξ,ζ) with ψ finite at s = 0.
///
/// ψ is evaluated as f/s^ℓ away from 0 and by the jet coefficient
/// a_ℓ(ξ,ζ) = f^{(ℓ)}(0,ξ,ζ)/ℓ! at and below the resolution floor s_min.
#[derive(Debug, Clone)]
pub struct TaylorFactorization {
    f: Expr,
    ell: usize,
    s_min: f64,
    /// a_ℓ(0,0) > 0: ℓ really is the vanishing order on the axis. When
    /// false, f vanishes beyond order ℓ and ψ(0,·,·) degenerates to 0.
    pub exact_order: bool,
}

impl TaylorFactorization {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn psi(&self, s: f64, xi: f64, zeta: f64) -> Result<f64> {
        if s > self.s_min {
            Ok(self.f.eval(s, xi, zeta)? / s.powi(self.ell as i32))
        } else {
            self.psi_at_zero(xi, zeta)
        }
    }

    pub fn psi_at_zero(&self, xi: f64, zeta: f64) -> Result<f64> {
        let jet = self.f.taylor_in_t(xi, zeta, self.ell)?;
        Ok(jet.coeffs[self.ell])
    }
}

/// Factor out the prescribed power: f = s^ℓ ψ. Errors with "order
/// overshoot" when f has a nonzero jet coefficient below ℓ (then f/s^ℓ
/// blows up); flags `exact_order = false` when a_ℓ(0,0) ≤ 0 (ℓ
/// undershoots the true order, ψ vanishes at 0).
pub fn taylor_factor(p: &Problem, ell: usize) -> Result<TaylorFactorization> {
    let ((xi_lo, xi_hi), (_, zeta_hi)) = p.comparability_box(0.0);
    let probes = [
        (0.0, 0.0),
        (xi_lo, 0.0),
        (xi_hi, 0.0),
        (0.0, zeta_hi),
        (xi_hi, zeta_hi),
    ];
    for (xi, zeta) in probes {
        let jet = p.f.taylor_in_t(xi, zeta, ell)?;
        let scale = jet.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (k, c) in jet.coeffs.iter().enumerate().take(ell) {
            if c.abs() > 1e-12 * scale.max(1e-300) {
                return Err(Error::Parameter(format!(
                    "order overshoot: f^({k})(0, {xi}, {zeta}) = {} is nonzero below the requested order {ell}",
                    c * factorial(k)
                )));
            }
        }
    }
    let a_ell = p.f.taylor_in_t(0.0, 0.0, ell)?.coeffs[ell];
    Ok(TaylorFactorization {
        f: p.f.clone(),
        ell,
        s_min: p.grid().smallest_positive(),
        exact_order: a_ell > 0.0,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
