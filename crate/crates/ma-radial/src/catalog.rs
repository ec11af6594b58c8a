//! Built-in problem catalog.
//!
//! The homogeneous family det D²u = r^{2m} (right-hand side (2t)^m in the
//! t = r²/2 coordinate) is the reference set: the exact solution is
//! u = c·r^p with p = 2 + 2m/n, the Hessian determinant is available in
//! closed form, and the origin verdict is decided by whether m is a
//! positive multiple of n. [`catalog_problems`] widens the set with flat
//! and (ξ, ζ)-coupled right-hand sides that exercise the iterative path.

use crate::error::Result;
use crate::problem::Problem;
use crate::regularity::{smoothness_verdict, VanishingOrder, Verdict};

/// One member of the homogeneous family u = c·r^p, det D²u = r^{2m}.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub n: u32,
    pub m: u32,
    /// p = 2 + 2m/n.
    pub exponent: f64,
    /// c = 1/(p·(p−1)^{1/n}).
    pub coefficient: f64,
    pub expected: Verdict,
}

/// The constant in u = c·r^p: matching det D²u = u″(u′/r)^{n−1} to r^{2m}
/// forces p = 2 + 2m/n and cⁿ·pⁿ·(p−1) = 1, i.e. c = 1/(p(p−1)^{1/n}).
pub fn homogeneous_coefficient(n: u32, m: u32) -> f64 {
    let p = 2.0 + 2.0 * m as f64 / n as f64;
    1.0 / (p * (p - 1.0).powf(1.0 / n as f64))
}

/// det D²u = (2t)^m on the unit ball, boundary value chosen so the exact
/// solution is c·r^p itself (no additive shift).
pub fn homogeneous_problem(n: u32, m: u32) -> Result<Problem> {
    let f = format!("(2*t)^{m}").parse()?;
    Problem::new(n, f, homogeneous_coefficient(n, m))
}

/// The ten reference entries: n ∈ {2, 3}, m ∈ 0..=4.
pub fn homogeneous_catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for n in [2u32, 3] {
        for m in 0..=4u32 {
            out.push(CatalogEntry {
                name: format!("n{n}-m{m}"),
                n,
                m,
                exponent: 2.0 + 2.0 * m as f64 / n as f64,
                coefficient: homogeneous_coefficient(n, m),
                expected: smoothness_verdict(VanishingOrder::Finite(m), n).verdict,
            });
        }
    }
    out
}

/// A named, ready-to-solve problem.
#[derive(Debug, Clone)]
pub struct NamedProblem {
    pub name: String,
    pub problem: Problem,
}

/// Every problem the crate ships: the homogeneous family plus flat,
/// coupled, and oscillatory right-hand sides. All solve to the default
/// residual target; none is adversarial.
pub fn catalog_problems() -> Result<Vec<NamedProblem>> {
    let mut out = Vec::new();
    for entry in homogeneous_catalog() {
        out.push(NamedProblem {
            name: entry.name.clone(),
            problem: homogeneous_problem(entry.n, entry.m)?,
        });
    }
    let extras: [(&str, u32, &str, f64); 6] = [
        // Infinite-order flat at the center; smooth there by the dichotomy.
        ("flat-n2", 2, "exp(-1/t)", 0.0),
        ("flat-n3", 3, "exp(-1/t)", 0.0),
        // Couples to u through exp(ξ): the fixed-point path.
        ("coupled-n2", 2, "(2*t)^2*exp(xi)", 0.0),
        ("flat-coupled-n2", 2, "exp(-1/t)*exp(xi)", 0.0),
        // Smooth, strictly positive, wiggly: convergence-rate fixtures.
        ("wiggle-n2", 2, "1 + t + 0.5*sin(25*t)", 0.1),
        ("cosine-n3", 3, "2 + cos(20*t)", 0.2),
    ];
    for (name, n, f, bv) in extras {
        out.push(NamedProblem {
            name: name.to_string(),
            problem: Problem::new(n, f.parse()?, bv)?,
        });
    }
    Ok(out)
}
