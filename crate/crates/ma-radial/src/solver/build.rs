//! Column construction: prefix-quadrature sweeps turning a φ evaluator
//! into sampled g, g′, g″, g‴ arrays on the grid.
//!
//! Every integral is assembled cell by cell with 8-point Gauss–Legendre
//! panels aligned to the grid, so the integrand stays smooth inside each
//! panel even when it is only piecewise-cubic globally (interpolated φ).
//! Prefix sums are Kahan-compensated: the additive constant C_u comes
//! from the cancellation boundary_value − G(t_max), and near the center
//! u − u(0) can be ten orders below the totals being subtracted.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::parallel::par_map;
use crate::problem::{value_or_limit, Problem};
use crate::quadrature::{gl8_panel, Grid, KahanSum, SampledFunction};
use crate::solver::Solution;
use crate::verify;

/// Node values with |φ| below this are treated as an exact zero when the
/// running integral is still zero: the flat zone of a right-hand side
/// like exp(−1/t), where panel contributions underflow before the node
/// values do.
pub(crate) const FLAT_FLOOR: f64 = 1e-250;

/// Where the φ samples come from during a sweep.
pub(crate) enum PhiSource<'a> {
    /// f(w, 0, 0) evaluated directly — the explicit path.
    Axis(&'a Expr),
    /// f(w, g(w), w·g′(w)²) through a converged iterate's interpolants.
    /// For ξ,ζ-independent f this is bitwise the same as `Axis`.
    Composite {
        f: &'a Expr,
        g: &'a SampledFunction,
        g1: &'a SampledFunction,
    },
    /// Damped node values; φ is the interpolant itself.
    Sampled(&'a SampledFunction),
}

impl PhiSource<'_> {
    pub(crate) fn at(&self, w: f64) -> Result<f64> {
        let (v, xi, zeta) = match self {
            PhiSource::Axis(f) => (value_or_limit(f, w, 0.0, 0.0)?, 0.0, 0.0),
            PhiSource::Composite { f, g, g1 } => {
                let gv = g.interpolate(w)?;
                let sv = g1.interpolate(w)?;
                let zeta = w * sv * sv;
                (value_or_limit(f, w, gv, zeta)?, gv, zeta)
            }
            // Monotone interpolation of checked node values cannot
            // undershoot; the coordinates are the iterate's own.
            PhiSource::Sampled(s) => (s.interpolate(w)?, f64::NAN, f64::NAN),
        };
        if v < 0.0 {
            return Err(Error::RhsNegative {
                t: w,
                xi,
                zeta,
                value: v,
            });
        }
        Ok(v)
    }
}

/// The columns every consumer needs: φ, the weighted prefix integral
/// F(t) = ∫₀ᵗ w^{n/2−1} φ dw, its scaled form A = (n/2) t^{−n/2} F,
/// g′ = A^{1/n}, and g anchored to the boundary value.
pub(crate) struct GeometryColumns {
    pub phi: Vec<f64>,
    pub f_weight: Vec<f64>,
    pub average: Vec<f64>,
    pub g1: Vec<f64>,
    pub g: Vec<f64>,
    pub c_u: f64,
}

pub(crate) fn geometry(p: &Problem, grid: &Arc<Grid>, phi: &PhiSource) -> Result<GeometryColumns> {
    let nodes = grid.nodes();
    let nn = nodes.len();
    let half_n = 0.5 * p.n() as f64;
    let inv_n = 1.0 / p.n() as f64;

    let mut phi_nodes = Vec::with_capacity(nn);
    for &t in nodes {
        phi_nodes.push(phi.at(t)?);
    }

    // Per-cell ∫ w^{n/2−1} φ dw; the first cell is substituted w = σ² so
    // the integrand 2σ^{n−1} φ(σ²) stays bounded down to n = 1.
    let weight_cells: Vec<Option<Result<f64>>> = par_map(nn - 1, |k| {
        let (a, b) = (nodes[k], nodes[k + 1]);
        Some(if k == 0 {
            gl8_panel(0.0, b.sqrt(), &mut |s: f64| {
                Ok(2.0 * s.powf(2.0 * half_n - 1.0) * phi.at(s * s)?)
            })
        } else {
            gl8_panel(a, b, &mut |w: f64| Ok(w.powf(half_n - 1.0) * phi.at(w)?))
        })
    });
    let mut f_weight = vec![0.0; nn];
    let mut acc = KahanSum::default();
    for (k, cell) in weight_cells.into_iter().enumerate() {
        acc.add(cell.expect("par_map fills every index")?);
        f_weight[k + 1] = acc.total();
    }

    let mut average = vec![0.0; nn];
    let mut g1 = vec![0.0; nn];
    average[0] = phi_nodes[0];
    g1[0] = phi_nodes[0].powf(inv_n);
    for i in 1..nn {
        let a = if f_weight[i] == 0.0 {
            if phi_nodes[i].abs() >= FLAT_FLOOR {
                return Err(Error::Parameter(format!(
                    "t^(n/2) underflows on this grid for n = {}; reduce grading or node count",
                    p.n()
                )));
            }
            0.0
        } else {
            let a = half_n * nodes[i].powf(-half_n) * f_weight[i];
            if a < 0.0 {
                return Err(Error::Numeric {
                    iteration: 0,
                    what: format!(
                        "negative running average of φ at t = {} (f sampled negative between nodes)",
                        nodes[i]
                    ),
                });
            }
            a
        };
        average[i] = a;
        g1[i] = a.powf(inv_n);
    }

    // Per-cell ∫ g′(s) ds with g′(s) = {(n/2) s^{−n/2} F(s)}^{1/n}; F(s)
    // is the stored prefix plus an inner 8-point partial, 64 φ samples a
    // cell. The max(0) guards rounding of F near the flat boundary.
    let g_cells: Vec<Option<Result<f64>>> = par_map(nn - 1, |k| {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let base = f_weight[k];
        let mut g_prime = |s: f64| -> Result<f64> {
            let partial = if k == 0 {
                gl8_panel(0.0, s.sqrt(), &mut |sig: f64| {
                    Ok(2.0 * sig.powf(2.0 * half_n - 1.0) * phi.at(sig * sig)?)
                })?
            } else {
                gl8_panel(a, s, &mut |w: f64| Ok(w.powf(half_n - 1.0) * phi.at(w)?))?
            };
            let avg = half_n * s.powf(-half_n) * (base + partial);
            Ok(avg.max(0.0).powf(inv_n))
        };
        Some(gl8_panel(a, b, &mut g_prime))
    });
    let mut g = vec![0.0; nn];
    let mut acc = KahanSum::default();
    for (k, cell) in g_cells.into_iter().enumerate() {
        acc.add(cell.expect("par_map fills every index")?);
        g[k + 1] = acc.total();
    }
    let c_u = p.boundary_value() - g[nn - 1];
    for v in &mut g {
        *v += c_u;
    }
    // The anchor is exact by construction; pin it against the last ulp.
    g[nn - 1] = p.boundary_value();

    Ok(GeometryColumns {
        phi: phi_nodes,
        f_weight,
        average,
        g1,
        g,
        c_u,
    })
}

/// φ′(w) by the chain rule along the solution profile:
/// φ′ = f_t + f_ξ·g′ + f_ζ·(g′² + g′·q) with q(w) = 2w·g″(w).
pub(crate) fn phi_prime_value(
    f: &Expr,
    g: &SampledFunction,
    g1: &SampledFunction,
    q: &SampledFunction,
    w: f64,
) -> Result<f64> {
    let g1v = g1.interpolate(w)?;
    let gv = g.interpolate(w)?;
    let qv = q.interpolate(w)?;
    let pd = f.partials(w, gv, w * g1v * g1v)?;
    let v = pd.dt + pd.dxi * g1v + pd.dzeta * (g1v * g1v + g1v * qv);
    if !v.is_finite() {
        return Err(Error::Numeric {
            iteration: 0,
            what: format!("φ′ not finite at t = {w}"),
        });
    }
    Ok(v)
}

/// The two-brace third-derivative formula, shared by the node sweep and
/// the pointwise evaluator. `big_t` is T_{n/2}φ(t) and `d` is
/// T_{n/2+1}φ′(t). Every power of T is kept inside a single factor
/// 1/(t·T^{1−1/n}) and the safe ratio φ/T: forming T^{2−1/n} directly
/// underflows to 0 at the boundary of a flat zone (T ~ 1e−300) and turns
/// the quotient non-finite.
pub(crate) fn g3_formula(n: f64, t: f64, phi: f64, phi_p: f64, big_t: f64, d: f64) -> f64 {
    let inv_n = 1.0 / n;
    let half_n = 0.5 * n;
    let c1 = 0.5 * half_n.powf(inv_n - 1.0);
    let c2 = 0.5 * half_n.powf(inv_n);
    let b1 = phi_p + (inv_n - 1.0) * (phi / big_t) * d - phi / t;
    let b2 = inv_n * d - big_t / t;
    (c1 * b1 - c2 * b2) / (t * big_t.powf(1.0 - inv_n))
}

/// ∫₀ᵗ w^{β−1} h(w) dw with GL8 panels aligned to the grid cells and the
/// first cell substituted w = σ². The pointwise evaluators integrate
/// interpolants, whose third derivative jumps at the nodes; aligned
/// panels keep every integrand polynomial-smooth inside a panel, where a
/// fixed dyadic layout would drag panel boundaries across the kinks and
/// leave error that wiggles with t (fatal to finite differences of the
/// result).
pub(crate) fn weighted_prefix(
    grid: &Grid,
    beta: f64,
    t: f64,
    h: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let nodes = grid.nodes();
    let first_cell = |upper: f64, h: &mut dyn FnMut(f64) -> Result<f64>| {
        gl8_panel(0.0, upper.sqrt(), &mut |s: f64| {
            Ok(2.0 * s.powf(2.0 * beta - 1.0) * h(s * s)?)
        })
    };
    let mut acc = KahanSum::default();
    let mut k = 0;
    while k + 1 < nodes.len() && nodes[k + 1] <= t {
        acc.add(if k == 0 {
            first_cell(nodes[1], h)?
        } else {
            gl8_panel(nodes[k], nodes[k + 1], &mut |w: f64| {
                Ok(w.powf(beta - 1.0) * h(w)?)
            })?
        });
        k += 1;
    }
    if nodes[k] < t {
        acc.add(if k == 0 {
            first_cell(t, h)?
        } else {
            gl8_panel(nodes[k], t, &mut |w: f64| Ok(w.powf(beta - 1.0) * h(w)?))?
        });
    }
    Ok(acc.total())
}

/// Stencil-slope interpolant of a nonnegative column that stays exactly
/// zero across runs of zero samples and never undershoots next to them.
/// Stencil slopes (fourth-order values) are what the derivative formulas
/// need; shape-preserving slopes are a whole order worse and not even
/// exact on quadratics. The price is the undershoot risk, which only
/// matters at a flat-zone boundary — there the slope is clamped into the
/// monotone box of the transition cell, distorting a cell whose values
/// are below 1e−250 anyway.
pub(crate) fn nonneg_stencil_interpolant(grid: &Arc<Grid>, values: &[f64]) -> Result<SampledFunction> {
    let base = SampledFunction::new(grid.clone(), values.to_vec())?;
    let mut slopes = base.slopes().to_vec();
    let nodes = grid.nodes();
    for i in 0..values.len() {
        if values[i] == 0.0 {
            slopes[i] = 0.0;
            continue;
        }
        if i > 0 && values[i - 1] == 0.0 {
            let m = 3.0 * values[i] / (nodes[i] - nodes[i - 1]);
            slopes[i] = slopes[i].clamp(0.0, m);
        }
        if i + 1 < values.len() && values[i + 1] == 0.0 {
            let m = -3.0 * values[i] / (nodes[i + 1] - nodes[i]);
            slopes[i] = slopes[i].clamp(m, 0.0);
        }
    }
    SampledFunction::with_slopes(grid.clone(), values.to_vec(), slopes)
}

/// Assemble a full [`Solution`] from a φ evaluator.
pub(crate) fn build_solution(
    p: &Problem,
    grid: Arc<Grid>,
    phi: &PhiSource,
    iterations: usize,
    final_update: f64,
) -> Result<Solution> {
    let cols = geometry(p, &grid, phi)?;
    let nodes = grid.nodes();
    let nn = nodes.len();
    let n = p.n() as f64;
    let half_n = 0.5 * n;
    let inv_n = 1.0 / n;

    // g″ in the single-subtraction form (φ − A)/(2t·A^{1−1/n}); the
    // difference carries the cancellation once instead of twice.
    let mut g2 = vec![0.0; nn];
    g2[0] = f64::NAN;
    for i in 1..nn {
        if cols.f_weight[i] == 0.0 {
            continue; // flat zone: g″ = 0 exactly
        }
        let a = cols.average[i];
        g2[i] = (cols.phi[i] - a) / (2.0 * nodes[i] * a.powf(1.0 - inv_n));
        if !g2[i].is_finite() {
            return Err(Error::Numeric {
                iteration: iterations,
                what: format!("g″ not finite at t = {}", nodes[i]),
            });
        }
    }

    let g1_f = SampledFunction::new(grid.clone(), cols.g1.clone())?;
    // g interpolates with its analytic slopes g′ — pure Hermite error,
    // needed where |u − u(0)| is orders below |u|.
    let g_f = SampledFunction::with_slopes(grid.clone(), cols.g.clone(), cols.g1.clone())?;
    let phi_f = nonneg_stencil_interpolant(&grid, &cols.phi)?;
    let g2_f = SampledFunction::new(grid.clone(), g2.clone())?;
    // q(w) = 2w·g″(w) extends to the exact value 0 at the center, which
    // the NaN-marked g2 column cannot represent.
    let mut q = vec![0.0; nn];
    for i in 1..nn {
        q[i] = 2.0 * nodes[i] * g2[i];
    }
    let q_f = SampledFunction::new(grid.clone(), q)?;

    let f_expr = p.f();
    // Prefix ∫₀ᵗ w^{n/2} φ′ dw, giving D = T_{n/2+1}φ′(t) = t^{−n/2−1}·F₃(t);
    // first cell substituted as before (integrand 2σ^{n+1} φ′(σ²)).
    let f3_cells: Vec<Option<Result<f64>>> = par_map(nn - 1, |k| {
        let (a, b) = (nodes[k], nodes[k + 1]);
        Some(if k == 0 {
            gl8_panel(0.0, b.sqrt(), &mut |s: f64| {
                Ok(2.0 * s.powf(2.0 * half_n + 1.0)
                    * phi_prime_value(f_expr, &g_f, &g1_f, &q_f, s * s)?)
            })
        } else {
            gl8_panel(a, b, &mut |w: f64| {
                Ok(w.powf(half_n) * phi_prime_value(f_expr, &g_f, &g1_f, &q_f, w)?)
            })
        })
    });
    let mut f3 = vec![0.0; nn];
    let mut acc = KahanSum::default();
    for (k, cell) in f3_cells.into_iter().enumerate() {
        acc.add(cell.expect("par_map fills every index")?);
        f3[k + 1] = acc.total();
    }

    let mut g3 = vec![0.0; nn];
    g3[0] = f64::NAN;
    for i in 1..nn {
        if cols.f_weight[i] == 0.0 {
            continue; // flat zone: g‴ = 0 exactly
        }
        let t = nodes[i];
        let big_t = cols.average[i] / half_n;
        let d = f3[i] * t.powf(-(half_n + 1.0));
        let pp = phi_prime_value(f_expr, &g_f, &g1_f, &q_f, t)?;
        g3[i] = g3_formula(n, t, cols.phi[i], pp, big_t, d);
        if !g3[i].is_finite() {
            return Err(Error::Numeric {
                iteration: iterations,
                what: format!("g‴ not finite at t = {t}"),
            });
        }
    }
    let g3_f = SampledFunction::new(grid.clone(), g3)?;

    // κ column: f on the axis, with the limit value at the center.
    let mut kappa = Vec::with_capacity(nn);
    for &t in nodes {
        let v = value_or_limit(f_expr, t, 0.0, 0.0)?;
        if v < 0.0 {
            return Err(Error::RhsNegative {
                t,
                xi: 0.0,
                zeta: 0.0,
                value: v,
            });
        }
        kappa.push(v);
    }
    let kappa_f = SampledFunction::new(grid.clone(), kappa)?;

    let (residual_max, _) =
        verify::residual_profile(f_expr, p.n(), &g_f, &g1_f, &g2_f, &verify::default_check_radii(grid.t_max()))?;

    Ok(Solution {
        problem: p.clone(),
        c_u: cols.c_u,
        g: g_f,
        g1: g1_f,
        g2: g2_f,
        g3: g3_f,
        phi: phi_f,
        kappa_vals: kappa_f,
        q: q_f,
        iterations,
        final_update,
        residual_max,
        grid,
    })
}
