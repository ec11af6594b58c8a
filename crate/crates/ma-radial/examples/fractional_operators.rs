//! The weighted averaging operator behind the radial solver:
//! T_β h(s) = s^{−β} ∫₀ˢ w^{β−1} h(w) dw, with T_β h(0) = h(0)/β.
//!
//! Differentiating under the integral shifts the weight,
//! dᵏ/dsᵏ T_β h = T_{β+k} h⁽ᵏ⁾ — the identity that lets the solver trade
//! derivatives of averages for averages of derivatives. Both sides are
//! computed independently here: the right by the shifted operator, the
//! left by finite differences of the plain quadrature.
//!
//!     cargo run --example fractional_operators

use ma_radial::{t_beta, t_beta_derivative, Expr};

fn main() {
    // Closed forms first: constants and monomials average to themselves,
    // scaled by the weight they pick up.
    for beta in [1.0, 1.5, 2.0] {
        let s = 0.3f64;
        let constant = t_beta(&"7".parse::<Expr>().unwrap(), beta, s).unwrap();
        let quartic = t_beta(&"t^4".parse::<Expr>().unwrap(), beta, s).unwrap();
        println!(
            "beta = {beta}:  T 7 = {constant:.12} (exact {:.12})   T t^4 at {s} = {quartic:.12} (exact {:.12})",
            7.0 / beta,
            s.powi(4) / (beta + 4.0),
        );
    }

    println!();
    for h_text in ["1 + 2*t + 3*t^2 - t^3", "exp(t)", "sin(t)"] {
        let h: Expr = h_text.parse().unwrap();
        for beta in [1.0, 1.5, 2.0] {
            for k in [1usize, 2] {
                let mut worst = 0.0f64;
                for s in [0.1, 0.25, 0.4] {
                    let shifted = t_beta_derivative(&h, beta, k, s).unwrap();
                    let direct = finite_difference(&h, beta, k, s);
                    worst = worst.max((shifted - direct).abs() / (1.0 + shifted.abs()));
                }
                println!(
                    "h = {h_text:<22} beta = {beta:<4} k = {k}: identity holds to {worst:.2e}"
                );
            }
        }
    }
}

/// k-th derivative of s ↦ T_β h(s) by five-point differences of the
/// quadrature — deliberately independent of the shift identity.
fn finite_difference(h: &Expr, beta: f64, k: usize, s: f64) -> f64 {
    let d = 1e-2;
    let at = |x: f64| t_beta(h, beta, x).unwrap();
    let (m2, m1, p1, p2) = (at(s - 2.0 * d), at(s - d), at(s + d), at(s + 2.0 * d));
    match k {
        1 => (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * d),
        2 => (-m2 + 16.0 * m1 - 30.0 * at(s) + 16.0 * p1 - p2) / (12.0 * d * d),
        _ => unreachable!("only first and second differences are set up"),
    }
}
