//! How fast the right-hand side vanishes at the center, and what that
//! means for the solution.
//!
//! The order τ of vanishing of κ(t) = f(t,0,0) decides smoothness of u at
//! the origin: τ a positive multiple of n (or infinite, or κ(0) > 0) is
//! smooth, any other finite τ is not. τ is estimated twice — Taylor jet
//! at 0 and a log–log slope fit on a dyadic ladder — and the two must
//! agree, otherwise the estimate is refused as indeterminate rather than
//! guessed. Flat right-hand sides get the supporting machinery: an
//! intermediate-derivative (Hadamard-type) bound checker and dyadic decay
//! probes for the derivative limits that exist only as limits.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel::par_map;

/// Default truncation for the jet estimator; orders beyond it read as
/// infinite at this resolution.
pub const DEFAULT_MAX_ORDER: usize = 12;

/// Jet coefficients below this, relative to the largest one, count as
/// zero. Pure absolute thresholding would break scale invariance of the
/// order under κ → λκ.
const COEFF_REL_FLOOR: f64 = 1e-12;

/// Jet order and slope fit must agree this closely.
const SLOPE_AGREEMENT: f64 = 0.05;

/// Order of vanishing of κ at 0. `IdenticallyZero` is kept apart from
/// `Infinite` (exp(−1/t)-like): both classify as smooth, but a vanishing
/// κ forces g to vanish with it while a flat one does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VanishingOrder {
    Finite(u32),
    Infinite,
    IdenticallyZero,
}

impl std::fmt::Display for VanishingOrder {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VanishingOrder::Finite(k) => write!(out, "{k}"),
            VanishingOrder::Infinite => out.write_str("infinite"),
            VanishingOrder::IdenticallyZero => out.write_str("identically zero"),
        }
    }
}

/// What the estimators saw: the jet, the decay table, the slope fit —
/// whichever paths ran.
#[derive(Debug, Clone, Default)]
pub struct OrderEvidence {
    /// Taylor coefficients of κ at 0 (empty when κ has no jet there).
    pub jet_coefficients: Vec<f64>,
    /// (t, κ(t)/t^max_order) on the dyadic ladder, for the flat path.
    pub decay_ratios: Vec<(f64, f64)>,
    /// Least-squares slope of ln κ against ln t, when it was fitted.
    pub slope: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Smooth,
    NonSmoothAtOrigin,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        out.write_str(match self {
            Verdict::Smooth => "Smooth",
            Verdict::NonSmoothAtOrigin => "NonSmoothAtOrigin",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

/// τ, the dimension, and the dichotomy's answer, with the estimation
/// evidence when the verdict came from [`classify`].
#[derive(Debug, Clone)]
pub struct SmoothnessVerdict {
    /// None when the estimators disagreed (verdict Indeterminate).
    pub tau: Option<VanishingOrder>,
    pub n: u32,
    pub verdict: Verdict,
    pub evidence: OrderEvidence,
}

pub(crate) enum Estimate {
    Order(VanishingOrder),
    Inconsistent { jet_order: Option<u32>, slope: f64 },
}

fn dyadic(j: u32) -> f64 {
    2f64.powi(-(j as i32))
}

/// κ on the ladder t = 2^{−j}, rejecting negative samples.
fn ladder_samples(
    kappa: &Expr,
    js: std::ops::RangeInclusive<u32>,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(js.clone().count());
    for j in js {
        let t = dyadic(j);
        let v = kappa.eval(t, 0.0, 0.0)?;
        if v < 0.0 {
            return Err(Error::RhsNegative {
                t,
                xi: 0.0,
                zeta: 0.0,
                value: v,
            });
        }
        out.push((t, v));
    }
    Ok(out)
}

/// Least-squares slope of ln v against ln t.
fn fit_log_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let (mut sx, mut sy) = (0.0f64, 0.0f64);
    for &(t, v) in samples {
        sx += t.ln();
        sy += v.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for &(t, v) in samples {
        num += (t.ln() - mx) * (v.ln() - my);
        den += (t.ln() - mx) * (t.ln() - mx);
    }
    num / den
}

/// "Decreases monotonically toward 0" over the last five entries: each no
/// larger than the one before, ending at 0 or at most half the start.
fn decays(ratios: &[(f64, f64)]) -> bool {
    if ratios.len() < 5 {
        return false;
    }
    let tail = &ratios[ratios.len() - 5..];
    tail.windows(2).all(|w| w[1].1 <= w[0].1)
        && (tail[4].1 == 0.0 || tail[4].1 <= 0.5 * tail[0].1)
}

pub(crate) fn estimate_order(
    kappa: &Expr,
    max_order: usize,
) -> Result<(Estimate, OrderEvidence)> {
    let mut ev = OrderEvidence::default();
    let jet = match kappa.taylor_in_t(0.0, 0.0, max_order) {
        Ok(j) => {
            ev.jet_coefficients = j.coeffs.clone();
            Some(j)
        }
        // No power series at 0 (exp(−1/t) and friends): probe instead.
        Err(Error::SingularAtCenter { .. }) => None,
        Err(e) => return Err(e),
    };

    if let Some(jet) = &jet {
        let scale = jet.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale > 0.0 {
            let k = jet
                .coeffs
                .iter()
                .position(|c| c.abs() > COEFF_REL_FLOOR * scale)
                .expect("the largest coefficient clears its own relative floor");
            // Cross-check against the eight deepest rungs of the ladder;
            // a candidate order the data's local slope contradicts is
            // refused, not reported.
            let samples = ladder_samples(kappa, 12..=19)?;
            if samples.iter().any(|&(_, v)| v == 0.0) {
                let est = Estimate::Inconsistent {
                    jet_order: Some(k as u32),
                    slope: f64::NEG_INFINITY,
                };
                return Ok((est, ev));
            }
            let slope = fit_log_slope(&samples);
            ev.slope = Some(slope);
            let est = if (slope - k as f64).abs() <= SLOPE_AGREEMENT {
                Estimate::Order(VanishingOrder::Finite(k as u32))
            } else {
                Estimate::Inconsistent {
                    jet_order: Some(k as u32),
                    slope,
                }
            };
            return Ok((est, ev));
        }
    }

    // Every coefficient vanished, or there is no jet: sample κ itself.
    let samples = ladder_samples(kappa, 1..=20)?;
    if samples.iter().all(|&(_, v)| v == 0.0) {
        return Ok((Estimate::Order(VanishingOrder::IdenticallyZero), ev));
    }
    let ratios: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, v)| (t, v / t.powi(max_order as i32)))
        .collect();
    ev.decay_ratios = ratios.clone();
    if decays(&ratios) {
        Ok((Estimate::Order(VanishingOrder::Infinite), ev))
    } else {
        let nonzero: Vec<(f64, f64)> = samples
            .iter()
            .copied()
            .filter(|&(_, v)| v > 0.0)
            .collect();
        let slope = fit_log_slope(&nonzero);
        ev.slope = Some(slope);
        Ok((Estimate::Inconsistent {
            jet_order: None,
            slope,
        }, ev))
    }
}

/// Order of vanishing of κ(t) at t = 0, up to `max_order` (beyond which
/// everything that still decays reads as infinite). The jet estimate must
/// agree with a log–log slope fit to within 0.05 or the call fails with
/// [`Error::Indeterminate`] carrying both.
pub fn vanishing_order(kappa: &Expr, max_order: usize) -> Result<VanishingOrder> {
    match estimate_order(kappa, max_order)?.0 {
        Estimate::Order(o) => Ok(o),
        Estimate::Inconsistent { jet_order, slope } => {
            Err(Error::Indeterminate { jet_order, slope })
        }
    }
}

/// The dichotomy: smooth at the origin iff τ is 0, infinite, or a
/// positive multiple of n.
pub fn smoothness_verdict(tau: VanishingOrder, n: u32) -> SmoothnessVerdict {
    assert!(n >= 1, "dimension must be at least 1");
    let verdict = match tau {
        VanishingOrder::Infinite | VanishingOrder::IdenticallyZero => Verdict::Smooth,
        VanishingOrder::Finite(0) => Verdict::Smooth,
        VanishingOrder::Finite(k) if k % n == 0 => Verdict::Smooth,
        VanishingOrder::Finite(_) => Verdict::NonSmoothAtOrigin,
    };
    SmoothnessVerdict {
        tau: Some(tau),
        n,
        verdict,
        evidence: OrderEvidence::default(),
    }
}

/// Estimate τ for κ and apply the dichotomy, keeping the evidence. A
/// disagreement between the estimators becomes verdict Indeterminate
/// instead of an error.
pub fn classify(kappa: &Expr, n: u32, max_order: usize) -> Result<SmoothnessVerdict> {
    let (est, evidence) = estimate_order(kappa, max_order)?;
    Ok(match est {
        Estimate::Order(tau) => SmoothnessVerdict {
            evidence,
            ..smoothness_verdict(tau, n)
        },
        Estimate::Inconsistent { .. } => SmoothnessVerdict {
            tau: None,
            n,
            verdict: Verdict::Indeterminate,
            evidence,
        },
    })
}

impl std::fmt::Display for SmoothnessVerdict {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "smoothness.n = {}", self.n)?;
        match &self.tau {
            Some(tau) => writeln!(out, "smoothness.tau = {tau}")?,
            None => writeln!(out, "smoothness.tau = unresolved")?,
        }
        writeln!(out, "smoothness.verdict = {}", self.verdict)?;
        if let Some(s) = self.evidence.slope {
            writeln!(out, "smoothness.slope_fit = {s}")?;
        }
        Ok(())
    }
}

/// One row of an intermediate-derivative check: lhs = sup|F^{(ℓ)}| on
/// [0,x], rhs = F(x)^{(k−ℓ)/k}·sup|F^{(k)}|^{ℓ/k}.
#[derive(Debug, Clone, Copy, Default)]
pub struct HadamardSample {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
}

/// Result of checking max|F^{(ℓ)}| ≤ C·F^{(k−ℓ)/k}·max|F^{(k)}|^{ℓ/k}.
#[derive(Debug, Clone)]
pub struct HadamardReport {
    pub ell: u32,
    pub k: u32,
    /// Smallest C making the inequality hold on every sampled x.
    pub observed_constant: f64,
    /// F nondecreasing and infinite-order flat at 0.
    pub hypothesis_ok: bool,
    /// What failed, when `hypothesis_ok` is false.
    pub hypothesis_note: Option<String>,
    pub samples: Vec<HadamardSample>,
}

impl std::fmt::Display for HadamardReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "hadamard.ell = {}", self.ell)?;
        writeln!(out, "hadamard.k = {}", self.k)?;
        writeln!(out, "hadamard.hypothesis_ok = {}", self.hypothesis_ok)?;
        if let Some(note) = &self.hypothesis_note {
            writeln!(out, "hadamard.note = {note}")?;
        }
        writeln!(out, "hadamard.observed_constant = {}", self.observed_constant)?;
        writeln!(out, "hadamard.samples = {}", self.samples.len())
    }
}

/// Result of the derived bound sup|F^{(ℓ)}| ≤ C·F^{1−ε}.
#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub ell: u32,
    pub epsilon: f64,
    /// Smallest k ≥ k_min with exponent (k−ℓ)/k ≥ 1−ε.
    pub k_used: u32,
    /// Empirical C over the sampled x.
    pub constant: f64,
    pub hypothesis_ok: bool,
    pub hypothesis_note: Option<String>,
    /// (x, sup|F^{(ℓ)}| on [0,x], F(x)^{1−ε}).
    pub samples: Vec<HadamardSample>,
}

impl std::fmt::Display for CorollaryReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "corollary.ell = {}", self.ell)?;
        writeln!(out, "corollary.epsilon = {}", self.epsilon)?;
        writeln!(out, "corollary.k_used = {}", self.k_used)?;
        writeln!(out, "corollary.hypothesis_ok = {}", self.hypothesis_ok)?;
        if let Some(note) = &self.hypothesis_note {
            writeln!(out, "corollary.note = {note}")?;
        }
        writeln!(out, "corollary.constant = {}", self.constant)
    }
}

/// Inner sampling of [0, x]: geometric ladder x·0.95^i, i = 0..=360,
/// reaching below 1e−8·x. Suprema of the derivative magnitudes are taken
/// over it; t = x itself is rung 0.
const SUP_LADDER_STEPS: usize = 360;
const SUP_LADDER_RATIO: f64 = 0.95;

struct SupSweep {
    sup_ell: f64,
    sup_k: f64,
    fx: f64,
    decreasing_at: Option<f64>,
}

/// One recentred jet per rung gives F, F′, F^{(ℓ)}, F^{(k)} together —
/// finite differences would cancel catastrophically on flat F.
fn sup_sweep(f: &Expr, ell: u32, k: u32, x: f64) -> Result<SupSweep> {
    let order = k as usize;
    let mut sweep = SupSweep {
        sup_ell: 0.0,
        sup_k: 0.0,
        fx: f64::NAN,
        decreasing_at: None,
    };
    let mut t = x;
    for i in 0..=SUP_LADDER_STEPS {
        let jet = f.jet_at(t, 0.0, 0.0, order)?;
        if i == 0 {
            sweep.fx = jet.coeffs[0];
        }
        sweep.sup_ell = sweep.sup_ell.max(jet.derivative(ell as usize).abs());
        sweep.sup_k = sweep.sup_k.max(jet.derivative(k as usize).abs());
        if sweep.decreasing_at.is_none() && jet.derivative(1) < 0.0 {
            sweep.decreasing_at = Some(t);
        }
        t *= SUP_LADDER_RATIO;
    }
    Ok(sweep)
}

fn check_x_grid(x_grid: &[f64]) -> Result<()> {
    if x_grid.is_empty() {
        return Err(Error::Parameter("empty x grid".into()));
    }
    for &x in x_grid {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Parameter(format!(
                "x grid points must lie in (0, 1), got {x}"
            )));
        }
    }
    Ok(())
}

/// Is F infinite-order flat at 0, and if not, why not.
fn flatness_hypothesis(f: &Expr) -> Result<(bool, Option<String>)> {
    Ok(match estimate_order(f, DEFAULT_MAX_ORDER) {
        Ok((Estimate::Order(VanishingOrder::Infinite | VanishingOrder::IdenticallyZero), _)) => {
            (true, None)
        }
        Ok((Estimate::Order(VanishingOrder::Finite(m)), _)) => (
            false,
            Some(format!("F vanishes to finite order {m} at 0")),
        ),
        Ok((Estimate::Inconsistent { slope, .. }, _)) => (
            false,
            Some(format!("flatness of F unresolved (slope fit {slope:.3})")),
        ),
        Err(Error::RhsNegative { t, value, .. }) => {
            (false, Some(format!("F({t}) = {value} is negative")))
        }
        Err(e) => return Err(e),
    })
}

/// 64·`refine` geometric points filling (2^{−20}, 1/2], ascending. Each
/// refinement keeps every coarser point, so maxima over the grid can only
/// grow under refinement.
pub fn dyadic_x_grid(refine: u32) -> Vec<f64> {
    let m = 64 * refine.max(1) as i64;
    (0..m)
        .rev()
        .map(|j| 2f64.powf(-1.0 - 19.0 * j as f64 / m as f64))
        .collect()
}

/// Check the intermediate-derivative bound
/// max_{[0,x]}|F^{(ℓ)}| ≤ C·F(x)^{(k−ℓ)/k}·max_{[0,x]}|F^{(k)}|^{ℓ/k}
/// over the given x values, reporting the smallest such C. The bound is a
/// theorem for smooth nondecreasing F flat at 0; `hypothesis_ok` records
/// whether F looks like that, the constant is measured regardless.
pub fn hadamard_check(f: &Expr, ell: u32, k: u32, x_grid: &[f64]) -> Result<HadamardReport> {
    if ell < 1 || ell + 1 > k {
        return Err(Error::Parameter(format!(
            "orders must satisfy 1 <= ell <= k-1, got ell = {ell}, k = {k}"
        )));
    }
    check_x_grid(x_grid)?;
    let (flat_ok, flat_note) = flatness_hypothesis(f)?;

    #[derive(Clone, Default)]
    struct Row {
        sample: HadamardSample,
        decreasing_at: Option<f64>,
    }
    let cells: Vec<Option<Result<Row>>> = par_map(x_grid.len(), |i| {
        let x = x_grid[i];
        Some(sup_sweep(f, ell, k, x).map(|s| {
            // A negative F(x) has already failed the hypothesis; clamp so
            // the power is defined and the row reads as unsatisfiable.
            let rhs = s.fx.max(0.0).powf((k - ell) as f64 / k as f64)
                * s.sup_k.powf(ell as f64 / k as f64);
            Row {
                sample: HadamardSample {
                    x,
                    lhs: s.sup_ell,
                    rhs,
                },
                decreasing_at: s.decreasing_at,
            }
        }))
    });

    let mut samples = Vec::with_capacity(x_grid.len());
    let mut observed = 0.0f64;
    let mut decreasing_at = None;
    for cell in cells {
        let row = cell.expect("par_map fills every index")?;
        if decreasing_at.is_none() {
            decreasing_at = row.decreasing_at;
        }
        if row.sample.rhs > 0.0 {
            observed = observed.max(row.sample.lhs / row.sample.rhs);
        } else if row.sample.lhs > 0.0 {
            observed = f64::INFINITY;
        } // both zero: holds vacuously
        samples.push(row.sample);
    }

    let hypothesis_note = flat_note.or_else(|| {
        decreasing_at.map(|t| format!("F is decreasing at t = {t}"))
    });
    Ok(HadamardReport {
        ell,
        k,
        observed_constant: observed,
        hypothesis_ok: flat_ok && decreasing_at.is_none(),
        hypothesis_note,
        samples,
    })
}

/// Check the derived bound sup_{0<s≤x}|F^{(ℓ)}(s)| ≤ C·F(x)^{1−ε}: picks
/// the smallest k ≥ k_min whose exponent (k−ℓ)/k reaches 1−ε and reports
/// the empirical C.
pub fn corollary_bound_check(
    f: &Expr,
    ell: u32,
    k_min: u32,
    epsilon: f64,
    x_grid: &[f64],
) -> Result<CorollaryReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Parameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if ell < 1 {
        return Err(Error::Parameter("ell must be at least 1".into()));
    }
    check_x_grid(x_grid)?;
    let (flat_ok, flat_note) = flatness_hypothesis(f)?;
    // (k−ℓ)/k ≥ 1−ε ⇔ k ≥ ℓ/ε.
    let k_used = k_min.max((ell as f64 / epsilon).ceil() as u32);

    #[derive(Clone, Default)]
    struct Row {
        sample: HadamardSample,
        decreasing_at: Option<f64>,
    }
    let cells: Vec<Option<Result<Row>>> = par_map(x_grid.len(), |i| {
        let x = x_grid[i];
        Some(sup_sweep(f, ell, ell, x).map(|s| Row {
            sample: HadamardSample {
                x,
                lhs: s.sup_ell,
                rhs: s.fx.max(0.0).powf(1.0 - epsilon),
            },
            decreasing_at: s.decreasing_at,
        }))
    });

    let mut samples = Vec::with_capacity(x_grid.len());
    let mut constant = 0.0f64;
    let mut decreasing_at = None;
    for cell in cells {
        let row = cell.expect("par_map fills every index")?;
        if decreasing_at.is_none() {
            decreasing_at = row.decreasing_at;
        }
        if row.sample.rhs > 0.0 {
            constant = constant.max(row.sample.lhs / row.sample.rhs);
        } else if row.sample.lhs > 0.0 {
            constant = f64::INFINITY;
        }
        samples.push(row.sample);
    }

    let hypothesis_note = flat_note.or_else(|| {
        decreasing_at.map(|t| format!("F is decreasing at t = {t}"))
    });
    Ok(CorollaryReport {
        ell,
        epsilon,
        k_used,
        constant,
        hypothesis_ok: flat_ok && decreasing_at.is_none(),
        hypothesis_note,
        samples,
    })
}

/// One probed order N: the ratios h(t_j)/t_j^N down the ladder and
/// whether they decay.
#[derive(Debug, Clone)]
pub struct FlatnessRow {
    pub order: u32,
    /// (t_j, |h(t_j)|/t_j^order).
    pub ratios: Vec<(f64, f64)>,
    pub decaying: bool,
}

/// Dyadic decay table for a pointwise evaluator near 0.
#[derive(Debug, Clone)]
pub struct FlatnessProbe {
    pub t0: f64,
    pub rows: Vec<FlatnessRow>,
    /// Every requested order decays.
    pub flat: bool,
    /// First ladder point where evaluation failed; the table stops there.
    pub truncated_at: Option<f64>,
}

impl std::fmt::Display for FlatnessProbe {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "flatness.t0 = {}", self.t0)?;
        writeln!(out, "flatness.flat = {}", self.flat)?;
        for row in &self.rows {
            writeln!(
                out,
                "flatness.order.{} = {}",
                row.order,
                if row.decaying { "decaying" } else { "not decaying" }
            )?;
        }
        if let Some(t) = self.truncated_at {
            writeln!(out, "flatness.truncated_at = {t}")?;
        }
        Ok(())
    }
}

/// Probe h(t_j)/t_j^N on t_j = t₀·2^{−j}, j = 0..=20, for each order N.
/// Faster-than-any-power decay shows as every requested ratio sequence
/// still dying out; h is typically a derivative evaluator like
/// |t| g_second(&sol, t) whose center value exists only as this limit.
pub fn flatness_probe<H>(h: H, t0: f64, orders: &[u32]) -> Result<FlatnessProbe>
where
    H: Fn(f64) -> Result<f64>,
{
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::Parameter(format!(
            "probe start must be positive and finite, got {t0}"
        )));
    }
    if orders.is_empty() {
        return Err(Error::Parameter("no probe orders requested".into()));
    }
    let mut values = Vec::with_capacity(21);
    let mut truncated_at = None;
    for j in 0..=20 {
        let t = t0 * dyadic(j);
        match h(t) {
            Ok(v) if v.is_finite() => values.push((t, v)),
            _ => {
                truncated_at = Some(t);
                break;
            }
        }
    }
    let rows: Vec<FlatnessRow> = orders
        .iter()
        .map(|&order| {
            let ratios: Vec<(f64, f64)> = values
                .iter()
                .map(|&(t, v)| (t, v.abs() / t.powi(order as i32)))
                .collect();
            let decaying = decays(&ratios);
            FlatnessRow {
                order,
                ratios,
                decaying,
            }
        })
        .collect();
    let flat = rows.iter().all(|r| r.decaying);
    Ok(FlatnessProbe {
        t0,
        rows,
        flat,
        truncated_at,
    })
}
