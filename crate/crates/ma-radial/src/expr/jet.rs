//! Truncated power-series arithmetic (Taylor jets).
//!
//! A [`TaylorJet`] holds coefficients `c[k] = f^(k)(center)/k!` up to a fixed
//! truncation order. All kernels are the classical series recurrences; the
//! product is the truncated Cauchy product, so polynomial inputs of degree
//! at most the truncation order are represented exactly.

use super::{Func, Node, Var};
use crate::error::{Error, Result};

/// Truncated power series in `t` about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    pub center: f64,
    /// `coeffs[k]` is the k-th Taylor coefficient f^(k)(center)/k!.
    pub coeffs: Vec<f64>,
}

impl TaylorJet {
    pub fn constant(center: f64, v: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = v;
        TaylorJet { center, coeffs }
    }

    /// The series of the variable `t` itself: center + (t - center).
    pub fn variable(center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        TaylorJet { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// k-th derivative at the center: `k! * coeffs[k]`.
    pub fn derivative(&self, k: usize) -> f64 {
        assert!(k <= self.order(), "derivative order exceeds truncation");
        (1..=k).fold(self.coeffs[k], |acc, j| acc * j as f64)
    }
}

fn len(a: &TaylorJet) -> usize {
    a.coeffs.len()
}

pub fn add(a: &TaylorJet, b: &TaylorJet) -> TaylorJet {
    let mut c = a.clone();
    for k in 0..len(a) {
        c.coeffs[k] += b.coeffs[k];
    }
    c
}

pub fn sub(a: &TaylorJet, b: &TaylorJet) -> TaylorJet {
    let mut c = a.clone();
    for k in 0..len(a) {
        c.coeffs[k] -= b.coeffs[k];
    }
    c
}

pub fn neg(a: &TaylorJet) -> TaylorJet {
    TaylorJet {
        center: a.center,
        coeffs: a.coeffs.iter().map(|v| -v).collect(),
    }
}

/// Truncated Cauchy product.
pub fn mul(a: &TaylorJet, b: &TaylorJet) -> TaylorJet {
    let n = len(a);
    let mut coeffs = vec![0.0; n];
    for k in 0..n {
        let mut s = 0.0;
        for j in 0..=k {
            s += a.coeffs[j] * b.coeffs[k - j];
        }
        coeffs[k] = s;
    }
    TaylorJet {
        center: a.center,
        coeffs,
    }
}

pub fn div(a: &TaylorJet, b: &TaylorJet, fragment: &dyn Fn() -> String) -> Result<TaylorJet> {
    if b.coeffs[0] == 0.0 {
        return Err(singular(a.center, "division by a series vanishing at the center", fragment));
    }
    let n = len(a);
    let mut c = vec![0.0; n];
    for k in 0..n {
        let mut s = a.coeffs[k];
        for j in 0..k {
            s -= c[j] * b.coeffs[k - j];
        }
        c[k] = s / b.coeffs[0];
    }
    Ok(TaylorJet {
        center: a.center,
        coeffs: c,
    })
}

pub fn exp(a: &TaylorJet) -> TaylorJet {
    let n = len(a);
    let mut c = vec![0.0; n];
    c[0] = a.coeffs[0].exp();
    for k in 1..n {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * a.coeffs[j] * c[k - j];
        }
        c[k] = s / k as f64;
    }
    TaylorJet {
        center: a.center,
        coeffs: c,
    }
}

pub fn log(a: &TaylorJet, fragment: &dyn Fn() -> String) -> Result<TaylorJet> {
    if a.coeffs[0] <= 0.0 {
        return Err(singular(a.center, "log of a series non-positive at the center", fragment));
    }
    let n = len(a);
    let mut c = vec![0.0; n];
    c[0] = a.coeffs[0].ln();
    for k in 1..n {
        let mut s = k as f64 * a.coeffs[k];
        for j in 1..k {
            s -= j as f64 * c[j] * a.coeffs[k - j];
        }
        c[k] = s / (k as f64 * a.coeffs[0]);
    }
    Ok(TaylorJet {
        center: a.center,
        coeffs: c,
    })
}

pub fn sin_cos(a: &TaylorJet) -> (TaylorJet, TaylorJet) {
    let n = len(a);
    let mut s = vec![0.0; n];
    let mut c = vec![0.0; n];
    s[0] = a.coeffs[0].sin();
    c[0] = a.coeffs[0].cos();
    for k in 1..n {
        let mut ds = 0.0;
        let mut dc = 0.0;
        for j in 1..=k {
            ds += j as f64 * a.coeffs[j] * c[k - j];
            dc += j as f64 * a.coeffs[j] * s[k - j];
        }
        s[k] = ds / k as f64;
        c[k] = -dc / k as f64;
    }
    (
        TaylorJet {
            center: a.center,
            coeffs: s,
        },
        TaylorJet {
            center: a.center,
            coeffs: c,
        },
    )
}

pub fn sqrt(a: &TaylorJet, fragment: &dyn Fn() -> String) -> Result<TaylorJet> {
    if a.coeffs[0] < 0.0 {
        return Err(singular(a.center, "sqrt of a series negative at the center", fragment));
    }
    if a.coeffs[0] == 0.0 {
        if a.coeffs.iter().all(|&v| v == 0.0) {
            return Ok(TaylorJet {
                center: a.center,
                coeffs: vec![0.0; len(a)],
            });
        }
        return Err(singular(a.center, "sqrt of a series vanishing at the center", fragment));
    }
    let n = len(a);
    let mut c = vec![0.0; n];
    c[0] = a.coeffs[0].sqrt();
    for k in 1..n {
        let mut s = a.coeffs[k];
        for j in 1..k {
            s -= c[j] * c[k - j];
        }
        c[k] = s / (2.0 * c[0]);
    }
    Ok(TaylorJet {
        center: a.center,
        coeffs: c,
    })
}

/// Integer power by repeated multiplication (exact on polynomials).
pub fn powi(a: &TaylorJet, k: i32, fragment: &dyn Fn() -> String) -> Result<TaylorJet> {
    if k == 0 {
        return Ok(TaylorJet::constant(a.center, 1.0, a.order()));
    }
    if k < 0 {
        let one = TaylorJet::constant(a.center, 1.0, a.order());
        let inv = div(&one, a, fragment)?;
        return powi(&inv, -k, fragment);
    }
    let mut acc = a.clone();
    for _ in 1..k {
        acc = mul(&acc, a);
    }
    Ok(acc)
}

fn singular(center: f64, what: &str, fragment: &dyn Fn() -> String) -> Error {
    Error::SingularAtCenter {
        center,
        what: format!("{what} in `{}`", fragment()),
    }
}

/// Evaluate `node` in jet arithmetic with `t` expanded about `center`.
pub fn eval_jet(node: &Node, center: f64, xi: f64, zeta: f64, order: usize) -> Result<TaylorJet> {
    let frag = || node.to_string();
    match node {
        Node::Num(v) => Ok(TaylorJet::constant(center, *v, order)),
        Node::Var(Var::T) => Ok(TaylorJet::variable(center, order)),
        Node::Var(Var::Xi) => Ok(TaylorJet::constant(center, xi, order)),
        Node::Var(Var::Zeta) => Ok(TaylorJet::constant(center, zeta, order)),
        Node::Neg(a) => Ok(neg(&eval_jet(a, center, xi, zeta, order)?)),
        Node::Add(a, b) => Ok(add(
            &eval_jet(a, center, xi, zeta, order)?,
            &eval_jet(b, center, xi, zeta, order)?,
        )),
        Node::Sub(a, b) => Ok(sub(
            &eval_jet(a, center, xi, zeta, order)?,
            &eval_jet(b, center, xi, zeta, order)?,
        )),
        Node::Mul(a, b) => Ok(mul(
            &eval_jet(a, center, xi, zeta, order)?,
            &eval_jet(b, center, xi, zeta, order)?,
        )),
        Node::Div(a, b) => div(
            &eval_jet(a, center, xi, zeta, order)?,
            &eval_jet(b, center, xi, zeta, order)?,
            &frag,
        ),
        Node::PowI(a, k) => powi(&eval_jet(a, center, xi, zeta, order)?, *k, &frag),
        Node::Pow(a, b) => {
            // exp(b ln a); requires a positive at the center.
            let a = eval_jet(a, center, xi, zeta, order)?;
            let b = eval_jet(b, center, xi, zeta, order)?;
            let ln_a = log(&a, &frag)?;
            Ok(exp(&mul(&b, &ln_a)))
        }
        Node::Call(func, arg) => {
            let a = eval_jet(arg, center, xi, zeta, order)?;
            match func {
                Func::Exp => Ok(exp(&a)),
                Func::Log => log(&a, &frag),
                Func::Sin => Ok(sin_cos(&a).0),
                Func::Cos => Ok(sin_cos(&a).1),
                Func::Sqrt => sqrt(&a, &frag),
                Func::Abs => {
                    if a.coeffs[0] > 0.0 {
                        Ok(a)
                    } else if a.coeffs[0] < 0.0 {
                        Ok(neg(&a))
                    } else if a.coeffs.iter().all(|&v| v == 0.0) {
                        Ok(a)
                    } else {
                        Err(Error::NotDifferentiable {
                            what: "abs of a series vanishing at the center".into(),
                            fragment: frag(),
                        })
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[test]
    fn mul_is_cauchy_product() {
        let a = TaylorJet {
            center: 0.0,
            coeffs: vec![1.0, 2.0, 3.0, 0.0],
        };
        let b = TaylorJet {
            center: 0.0,
            coeffs: vec![4.0, 5.0, 0.0, 0.0],
        };
        let c = mul(&a, &b);
        assert_eq!(c.coeffs, vec![4.0, 13.0, 22.0, 15.0]);
    }

    #[test]
    fn exp_series_in_t() {
        let t = TaylorJet::variable(0.0, 5);
        let e = exp(&t);
        for (k, &c) in e.coeffs.iter().enumerate() {
            let expect = 1.0 / (1..=k).map(|j| j as f64).product::<f64>();
            assert!((c - expect).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn division_recovers_geometric_series() {
        // 1/(1 - t) = sum t^k
        let one = TaylorJet::constant(0.0, 1.0, 6);
        let denom = TaylorJet {
            center: 0.0,
            coeffs: vec![1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        let q = div(&one, &denom, &|| "1/(1-t)".to_string()).unwrap();
        assert!(q.coeffs.iter().all(|&c| (c - 1.0).abs() < 1e-15));
    }

    #[test]
    fn recentred_jet_evaluates_consistently() {
        // sin about center 0.3, order 8: partial sums reproduce sin nearby.
        let t = TaylorJet::variable(0.3, 8);
        let s = sin_cos(&t).0;
        let dx = 0.05;
        let approx = poly_eval(&s.coeffs, dx);
        assert!((approx - (0.3f64 + dx).sin()).abs() < 1e-12);
        assert!((s.derivative(1) - 0.3f64.cos()).abs() < 1e-15);
        assert!((s.derivative(2) + 0.3f64.sin()).abs() < 1e-15);
    }
}
