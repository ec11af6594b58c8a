//! Graded grids on [0, t_max], the weighted averaging operators
//! T_β h(s) = ∫₀ˢ (w/s)^β h(w) dw/w, and cumulative weighted integrals.
//!
//! Everything here revolves around integrands that live on [0, t_max] and
//! degenerate at 0 — either because the weight does (s^{n/2−1} for odd n)
//! or because the functions of interest vanish to very high or infinite
//! order there. Grids are geometrically graded toward 0, and every integral
//! is computed after an exact substitution that removes the endpoint
//! weight, on Gauss-Legendre panels that are themselves graded toward the
//! endpoint.

mod interp;
mod panels;

pub use interp::SampledFunction;
pub use panels::KahanSum;

pub(crate) use panels::{gl8_panel, integral_from_zero};

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Strictly increasing nodes t_0 = 0 < t_1 < … < t_N = t_max: a uniform
/// bulk zone above a geometric tail graded toward 0.
///
/// The tail keeps a fixed consecutive-node ratio over about ten decades,
/// so behavior on every scale down to ~1e−10·t_max is resolved no matter
/// how coarse the grid; all remaining cells go to the bulk, whose uniform
/// width matches the largest tail cell at the seam. Adding nodes therefore
/// pulls the seam toward 0 and shrinks the bulk spacing together — the
/// O(Δ⁴) interpolation error above the tail drops ~16× per doubling.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    ratio: f64,
    geometric_cells: usize,
}

impl Grid {
    pub const DEFAULT_NODES: usize = 1024;
    pub const DEFAULT_RATIO: f64 = 1.05;

    /// n_nodes total nodes on [0, t_max] with consecutive-node ratio
    /// `ratio` in the geometric tail.
    pub fn geometric(t_max: f64, n_nodes: usize, ratio: f64) -> Result<Grid> {
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::Parameter(format!("t_max must be positive, got {t_max}")));
        }
        if n_nodes < 16 {
            return Err(Error::Parameter(format!(
                "need at least 16 grid nodes, got {n_nodes}"
            )));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(Error::Parameter(format!(
                "grading ratio must exceed 1, got {ratio}"
            )));
        }
        let cells = n_nodes - 1;
        // Tail cells for a ten-decade descent below the seam; coarse grids
        // cap the tail so the bulk keeps at least a quarter of the cells.
        let descent = 1 + (10.0 * std::f64::consts::LN_10 / ratio.ln()).ceil() as usize;
        let geometric_cells = descent.min(3 * cells / 4);
        let uniform_cells = cells - geometric_cells;
        // Seam where the largest tail cell t_seam·(1 − 1/ratio) equals the
        // bulk width (t_max − t_seam)/uniform_cells.
        let t_seam = t_max * ratio / (ratio + uniform_cells as f64 * (ratio - 1.0));
        let mut nodes = Vec::with_capacity(n_nodes);
        nodes.push(0.0);
        for k in 1..=geometric_cells {
            nodes.push(t_seam * ratio.powi(-((geometric_cells - k) as i32)));
        }
        for j in 1..=uniform_cells {
            nodes.push(t_seam + (t_max - t_seam) * j as f64 / uniform_cells as f64);
        }
        let mut grid = Grid { nodes, ratio, geometric_cells };
        // Close the span exactly; the uniform formula already gives t_max
        // for j = uniform_cells but only up to rounding.
        *grid.nodes.last_mut().unwrap() = t_max;
        if grid.nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "grading ratio {ratio} with {n_nodes} nodes collapses cells; \
                 use a milder ratio or fewer nodes"
            )));
        }
        Ok(grid)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Number of cells in the geometric zone (cell 0, touching t = 0,
    /// included).
    pub fn geometric_cells(&self) -> usize {
        self.geometric_cells
    }

    /// Smallest positive node; below it sampled data carries no
    /// information.
    pub fn smallest_positive(&self) -> f64 {
        self.nodes[1]
    }
}

/// A scalar function of t on a span [0, t_max]: the shape the integral
/// operators accept. Closures returning Result, parsed expressions
/// (restricted to the t-axis), and sampled interpolants all qualify.
pub trait Curve {
    fn at(&self, t: f64) -> Result<f64>;
}

impl<F: Fn(f64) -> Result<f64> + ?Sized> Curve for F {
    fn at(&self, t: f64) -> Result<f64> {
        self(t)
    }
}

impl Curve for SampledFunction {
    fn at(&self, t: f64) -> Result<f64> {
        self.interpolate(t)
    }
}

impl Curve for Expr {
    fn at(&self, t: f64) -> Result<f64> {
        self.eval(t, 0.0, 0.0)
    }
}

/// T_β h(s) = ∫₀ˢ (w/s)^β h(w) dw/w for β > 0; T_β h(0) = h(0)/β.
///
/// Substituting y = (w/s)^β gives T_β h(s) = (1/β)·∫₀¹ h(s·y^{1/β}) dy:
/// the dw/w singularity cancels exactly and the integrand is bounded by
/// sup|h|. The remaining y^{1/β} kink at 0 is absorbed by the geometric
/// panels. For s > 0, h is only evaluated at strictly positive arguments,
/// so flat composites like exp(−1/t) need no special casing.
pub fn t_beta<H: Curve + ?Sized>(h: &H, beta: f64, s: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!(
            "averaging order must be positive, got beta = {beta}"
        )));
    }
    if !(s >= 0.0) {
        return Err(Error::Parameter(format!("t_beta needs s >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(h.at(0.0)? / beta);
    }
    let inv_beta = beta.recip();
    let mut f = |y: f64| h.at(s * y.powf(inv_beta));
    Ok(integral_from_zero(1.0, &mut f)? * inv_beta)
}

/// d^k/ds^k T_β h(s), computed as T_{β+k} h⁽ᵏ⁾(s).
///
/// Differentiating under the substituted integral and integrating back by
/// parts moves each s-derivative onto h and raises the order by one; no
/// finite differencing of the outer integral is involved. h⁽ᵏ⁾ comes from
/// jets recentred at the quadrature points.
pub fn t_beta_derivative(h: &Expr, beta: f64, k: usize, s: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Parameter(format!(
            "averaging order must be positive, got beta = {beta}"
        )));
    }
    if k == 0 {
        return t_beta(h, beta, s);
    }
    let dk = |w: f64| h.t_derivative(k, w, 0.0, 0.0);
    t_beta(&dk, beta + k as f64, s)
}

/// ∫₀ᵗ s^α h(s) ds for α > −1.
///
/// For α < 0 the substitution s = σ^p removes the endpoint singularity
/// exactly: the integrand becomes p·σ^{p(1+α)−1}·h(σ^p), bounded once
/// p(1+α) ≥ 1. The usual weight s^{n/2−1} needs only p = 2 (n = 1 is the
/// worst case at α = −1/2), but p grows as α approaches −1 so the whole
/// open range stays accurate.
pub fn cumulative<H: Curve + ?Sized>(h: &H, weight_exponent: f64, t: f64) -> Result<f64> {
    let a = weight_exponent;
    if !(a > -1.0) {
        return Err(Error::Parameter(format!(
            "weight exponent must exceed -1, got {a}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("cumulative needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if a < 0.0 {
        let p = (1.0 / (1.0 + a)).ceil().max(2.0);
        let edge = p * (1.0 + a) - 1.0;
        let mut f = |sigma: f64| Ok(p * sigma.powf(edge) * h.at(sigma.powf(p))?);
        integral_from_zero(t.powf(1.0 / p), &mut f)
    } else {
        let mut f = |s: f64| Ok(s.powf(a) * h.at(s)?);
        integral_from_zero(t, &mut f)
    }
}
