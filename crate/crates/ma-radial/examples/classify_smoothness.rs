//! The origin dichotomy: u is smooth at 0 exactly when the vanishing
//! order τ of κ(t) = f(t, 0, 0) is zero, infinite, or a positive
//! multiple of n.
//!
//!     cargo run --example classify_smoothness

use ma_radial::{classify, Expr, DEFAULT_MAX_ORDER};

fn main() {
    let cases: [(&str, u32); 8] = [
        ("1", 2),          // positive at the center: no degeneracy
        ("2*t", 2),        // τ = 1, not a multiple of 2
        ("(2*t)^2", 2),    // τ = 2 = n
        ("(2*t)^3", 2),    // τ = 3, odd again
        ("(2*t)^3", 3),    // same κ, divisible in R³
        ("sin(t)^2", 3),   // τ = 2 from the expansion, 2 ∉ 3Z
        ("exp(-1/t)", 2),  // flat: smooth in every dimension
        ("t^2.5", 2),      // no integer order at this resolution
    ];
    for (kappa, n) in cases {
        let report = classify(&kappa.parse::<Expr>().unwrap(), n, DEFAULT_MAX_ORDER)
            .expect("nonnegative kappa");
        let tau = match &report.tau {
            Some(tau) => tau.to_string(),
            None => "unresolved".to_string(),
        };
        let slope = match report.evidence.slope {
            Some(s) => format!("{s:.4}"),
            None => "-".to_string(),
        };
        println!(
            "kappa = {kappa:<10} n = {n}   tau = {tau:<16} slope fit {slope:<8} -> {}",
            report.verdict
        );
    }
}
