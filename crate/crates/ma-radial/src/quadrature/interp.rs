//! Piecewise-cubic Hermite interpolation of node samples.
//!
//! Slopes are taken from the caller when the derivative is known
//! analytically (g gets g′), otherwise from 4-point Lagrange stencils:
//! third-order slopes give fourth-order interpolated values. The monotone
//! variant uses Fritsch-Carlson/Butland slopes instead, trading accuracy at
//! interior extrema for a no-undershoot guarantee — T_β of a nonnegative
//! sampled φ must stay nonnegative.
//!
//! A leading run of non-finite values marks samples defined only as limits
//! (g″, g‴ carry NaN at t = 0). Stencils start at the first finite sample
//! and queries strictly below it return NaN rather than an error.

use std::sync::Arc;

use super::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SampledFunction {
    grid: Arc<Grid>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    first: usize,
}

impl SampledFunction {
    /// Samples with stencil-derived slopes.
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<SampledFunction> {
        let first = check_values(&grid, &values)?;
        let slopes = stencil_slopes(grid.nodes(), &values, first);
        Ok(SampledFunction { grid, values, slopes, first })
    }

    /// Samples with shape-preserving slopes: the interpolant of monotone
    /// data is monotone, so data decreasing to 0 never undershoots 0.
    pub fn monotone(grid: Arc<Grid>, values: Vec<f64>) -> Result<SampledFunction> {
        let first = check_values(&grid, &values)?;
        let slopes = pchip_slopes(grid.nodes(), &values, first);
        Ok(SampledFunction { grid, values, slopes, first })
    }

    /// Samples with analytically known slopes; interpolation error drops to
    /// the pure Hermite bound (Δ⁴/384)·max|h⁗| with no stencil constant.
    pub fn with_slopes(grid: Arc<Grid>, values: Vec<f64>, slopes: Vec<f64>) -> Result<SampledFunction> {
        let first = check_values(&grid, &values)?;
        if slopes.len() != values.len() {
            return Err(Error::Parameter(format!(
                "slope count {} does not match node count {}",
                slopes.len(),
                values.len()
            )));
        }
        Ok(SampledFunction { grid, values, slopes, first })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<Grid> {
        Arc::clone(&self.grid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Node slopes actually in use (stencil, shape-preserving, or supplied).
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Piecewise-cubic value at t; exact (bitwise) at nodes.
    pub fn interpolate(&self, t: f64) -> Result<f64> {
        let nodes = self.grid.nodes();
        let t_max = self.grid.t_max();
        if !(0.0..=t_max).contains(&t) {
            return Err(Error::OutsideSpan { value: t, lo: 0.0, hi: t_max });
        }
        let i = nodes.partition_point(|&x| x < t);
        if i < nodes.len() && nodes[i] == t {
            return Ok(self.values[i]);
        }
        // t lies strictly inside cell (i-1, i); i >= 1 because t > nodes[0].
        let k = i - 1;
        if k < self.first {
            return Ok(f64::NAN);
        }
        Ok(hermite(
            nodes[k],
            nodes[k + 1],
            self.values[k],
            self.values[k + 1],
            self.slopes[k],
            self.slopes[k + 1],
            t,
        ))
    }

    /// Derivative of the interpolant at t (the cubic's slope, not a new
    /// stencil); exact at nodes only up to the slope rule used.
    pub fn interpolate_slope(&self, t: f64) -> Result<f64> {
        let nodes = self.grid.nodes();
        let t_max = self.grid.t_max();
        if !(0.0..=t_max).contains(&t) {
            return Err(Error::OutsideSpan { value: t, lo: 0.0, hi: t_max });
        }
        let i = nodes.partition_point(|&x| x < t);
        if i < nodes.len() && nodes[i] == t && (i >= self.first || i + 1 == nodes.len()) {
            return Ok(self.slopes[i]);
        }
        let k = i.saturating_sub(1);
        if k < self.first {
            return Ok(f64::NAN);
        }
        Ok(hermite_slope(
            nodes[k],
            nodes[k + 1],
            self.values[k],
            self.values[k + 1],
            self.slopes[k],
            self.slopes[k + 1],
            t,
        ))
    }
}

fn check_values(grid: &Grid, values: &[f64]) -> Result<usize> {
    if values.len() != grid.nodes().len() {
        return Err(Error::Parameter(format!(
            "sample count {} does not match node count {}",
            values.len(),
            grid.nodes().len()
        )));
    }
    let first = values.iter().position(|v| v.is_finite()).unwrap_or(values.len());
    if values.len() - first < 4 {
        return Err(Error::Parameter(
            "need at least 4 finite samples to interpolate".into(),
        ));
    }
    if values[first..].iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter(
            "non-finite sample after the first finite one".into(),
        ));
    }
    Ok(first)
}

fn hermite(t0: f64, t1: f64, v0: f64, v1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = t - t0;
    let m = (v1 - v0) / h;
    let c2 = (3.0 * m - 2.0 * d0 - d1) / h;
    let c3 = (d0 + d1 - 2.0 * m) / (h * h);
    v0 + s * (d0 + s * (c2 + s * c3))
}

fn hermite_slope(t0: f64, t1: f64, v0: f64, v1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = t - t0;
    let m = (v1 - v0) / h;
    let c2 = (3.0 * m - 2.0 * d0 - d1) / h;
    let c3 = (d0 + d1 - 2.0 * m) / (h * h);
    d0 + s * (2.0 * c2 + s * 3.0 * c3)
}

/// Derivative at x of the cubic through (xs[j], ys[j]).
fn lagrange4_slope(xs: [f64; 4], ys: [f64; 4], x: f64) -> f64 {
    let mut d = 0.0;
    for j in 0..4 {
        let mut basis = 0.0;
        for m in 0..4 {
            if m == j {
                continue;
            }
            let mut p = 1.0 / (xs[j] - xs[m]);
            for l in 0..4 {
                if l != j && l != m {
                    p *= (x - xs[l]) / (xs[j] - xs[l]);
                }
            }
            basis += p;
        }
        d += ys[j] * basis;
    }
    d
}

fn stencil_slopes(nodes: &[f64], values: &[f64], first: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![f64::NAN; n];
    for i in first..n {
        let w = i.saturating_sub(1).clamp(first, n - 4);
        d[i] = lagrange4_slope(
            [nodes[w], nodes[w + 1], nodes[w + 2], nodes[w + 3]],
            [values[w], values[w + 1], values[w + 2], values[w + 3]],
            nodes[i],
        );
    }
    d
}

// Fritsch-Carlson slopes in the Butland/Brodlie weighted-harmonic form; zero
// slope at sign changes. Endpoints use the noncentered three-point formula
// clamped to preserve shape.
fn pchip_slopes(nodes: &[f64], values: &[f64], first: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![f64::NAN; n];
    let h = |k: usize| nodes[k + 1] - nodes[k];
    let sec = |k: usize| (values[k + 1] - values[k]) / h(k);
    for i in first + 1..n - 1 {
        let (m0, m1) = (sec(i - 1), sec(i));
        d[i] = if m0 * m1 > 0.0 {
            let w0 = 2.0 * h(i) + h(i - 1);
            let w1 = h(i) + 2.0 * h(i - 1);
            (w0 + w1) / (w0 / m0 + w1 / m1)
        } else {
            0.0
        };
    }
    d[first] = endpoint_slope(h(first), h(first + 1), sec(first), sec(first + 1));
    d[n - 1] = endpoint_slope(h(n - 2), h(n - 3), sec(n - 2), sec(n - 3));
    d
}

fn endpoint_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d * m0 <= 0.0 {
        0.0
    } else if m0 * m1 <= 0.0 && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Grid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid(n: usize) -> Arc<Grid> {
        Arc::new(Grid::geometric(0.5, n, 1.05).unwrap())
    }

    #[test]
    fn exact_at_nodes_bitwise() {
        let g = grid(64);
        let values: Vec<f64> = g.nodes().iter().map(|&t| (7.3 * t).sin() + 0.1).collect();
        let f = SampledFunction::new(Arc::clone(&g), values.clone()).unwrap();
        for (i, &t) in g.nodes().iter().enumerate() {
            assert_eq!(f.interpolate(t).unwrap().to_bits(), values[i].to_bits());
        }
    }

    #[test]
    fn reproduces_cubics() {
        let g = grid(64);
        let p = |t: f64| 2.0 - t + 3.0 * t * t - 5.0 * t * t * t;
        let values: Vec<f64> = g.nodes().iter().map(|&t| p(t)).collect();
        let f = SampledFunction::new(g, values).unwrap();
        for i in 0..=500 {
            let t = 0.5 * i as f64 / 500.0;
            assert_relative_eq!(f.interpolate(t).unwrap(), p(t), max_relative = 1e-12);
        }
    }

    #[test]
    fn sin_on_256_nodes() {
        let g = grid(256);
        let values: Vec<f64> = g.nodes().iter().map(|&t| t.sin()).collect();
        let f = SampledFunction::new(g, values).unwrap();
        assert!((f.interpolate(0.123).unwrap() - 0.123f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn supplied_slopes_beat_stencils() {
        let g = grid(1024);
        let values: Vec<f64> = g.nodes().iter().map(|&t| (9.0 * t).cos()).collect();
        let slopes: Vec<f64> = g.nodes().iter().map(|&t| -9.0 * (9.0 * t).sin()).collect();
        let with = SampledFunction::with_slopes(Arc::clone(&g), values.clone(), slopes).unwrap();
        let without = SampledFunction::new(g, values).unwrap();
        let (mut err_with, mut err_without) = (0.0f64, 0.0f64);
        for i in 0..2000 {
            let t = 0.26 + 0.2 * i as f64 / 2000.0;
            let truth = (9.0 * t).cos();
            err_with = err_with.max((with.interpolate(t).unwrap() - truth).abs());
            err_without = err_without.max((without.interpolate(t).unwrap() - truth).abs());
        }
        assert!(
            2.0 * err_with < err_without,
            "exact slopes {err_with} vs stencil {err_without}"
        );
        assert!(err_with < 2e-9);
    }

    #[test]
    fn leading_nan_prefix() {
        let g = grid(64);
        let mut values: Vec<f64> = g.nodes().iter().map(|&t| t + 1.0).collect();
        values[0] = f64::NAN;
        let f = SampledFunction::new(Arc::clone(&g), values).unwrap();
        // Below the first finite node: NaN, not error, not poisoned slopes.
        let below = 0.5 * g.nodes()[1];
        assert!(f.interpolate(below).unwrap().is_nan());
        assert!(f.interpolate(0.0).unwrap().is_nan());
        // From the first finite node on, values are clean.
        assert_relative_eq!(
            f.interpolate(0.3).unwrap(),
            1.3,
            max_relative = 1e-12
        );
        assert!(f.interpolate(g.nodes()[1]).unwrap().is_finite());
    }

    #[test]
    fn outside_span_is_an_error() {
        let g = grid(32);
        let values = vec![1.0; 32];
        let f = SampledFunction::new(g, values).unwrap();
        assert!(matches!(
            f.interpolate(0.6),
            Err(crate::Error::OutsideSpan { .. })
        ));
        assert!(matches!(
            f.interpolate(-0.1),
            Err(crate::Error::OutsideSpan { .. })
        ));
    }

    #[test]
    fn monotone_variant_never_undershoots_decay_to_zero() {
        let g = grid(128);
        // Sharply decaying, nonnegative, monotone data.
        let values: Vec<f64> = g.nodes().iter().map(|&t| (-40.0 * t).exp()).collect();
        let f = SampledFunction::monotone(g, values).unwrap();
        let mut prev = f.interpolate(0.0).unwrap();
        for i in 1..=4000 {
            let t = 0.5 * i as f64 / 4000.0;
            let v = f.interpolate(t).unwrap();
            assert!(v >= 0.0, "undershoot at t={t}: {v}");
            assert!(v <= prev + 1e-15, "monotonicity lost at t={t}");
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            raw in proptest::collection::vec(0.0f64..1.0, 32),
        ) {
            let g = grid(32);
            let mut acc = 0.0;
            let values: Vec<f64> = raw.iter().map(|r| { acc += r; acc }).collect();
            let f = SampledFunction::monotone(g, values).unwrap();
            let mut prev = f.interpolate(0.0).unwrap();
            for i in 1..=600 {
                let t = 0.5 * i as f64 / 600.0;
                let v = f.interpolate(t).unwrap();
                prop_assert!(v >= prev - 1e-12);
                prev = v;
            }
        }

        #[test]
        fn interpolant_slope_matches_difference_quotient(
            a in 0.5f64..3.0, b in -2.0f64..2.0,
        ) {
            let g = grid(64);
            let values: Vec<f64> = g.nodes().iter().map(|&t| a * (3.0 * t).sin() + b * t).collect();
            let f = SampledFunction::new(g, values).unwrap();
            let h = 1e-7;
            for t in [0.1, 0.2, 0.35] {
                let fd = (f.interpolate(t + h).unwrap() - f.interpolate(t - h).unwrap()) / (2.0 * h);
                let an = f.interpolate_slope(t).unwrap();
                prop_assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()));
            }
        }
    }
}
