//! Interpolation of derivatives for flat functions: if F vanishes to
//! infinite order at 0 and stays nondecreasing near it, then on (0, 1)
//!
//!     |F^(ℓ)(x)|  ≲  F(x)^{1−ℓ/k} · sup_{(0,x]} |F^(k)|^{ℓ/k},
//!
//! with a constant independent of x. `hadamard_check` hunts for the
//! worst ratio over a dyadic grid of x values; a finite observed
//! constant that is stable under grid refinement is the numerical
//! signature of the inequality. A function vanishing to *finite* order
//! breaks the hypothesis, and the checker says so.
//!
//!     cargo run --example hadamard_inequality

use ma_radial::{dyadic_x_grid, hadamard_check, Expr};

fn main() {
    for f_text in ["exp(-1/t)", "exp(-1/t^2)"] {
        let f: Expr = f_text.parse().unwrap();
        println!("F = {f_text}");
        for (ell, k) in [(1, 2), (1, 3), (2, 3)] {
            let coarse = hadamard_check(&f, ell, k, &dyadic_x_grid(4)).unwrap();
            let fine = hadamard_check(&f, ell, k, &dyadic_x_grid(16)).unwrap();
            let drift = (fine.observed_constant - coarse.observed_constant).abs()
                / coarse.observed_constant;
            println!(
                "  (ell, k) = ({ell}, {k}): constant {:.6}  -> {:.6} on a 4x finer grid (drift {:.2e})",
                coarse.observed_constant, fine.observed_constant, drift,
            );
        }
        println!();
    }

    // t^3 vanishes to order three: the flatness hypothesis fails, and the
    // report carries the reason even though the ratio itself stays finite.
    let cubic: Expr = "t^3".parse().unwrap();
    let report = hadamard_check(&cubic, 1, 2, &dyadic_x_grid(1)).unwrap();
    println!("F = t^3");
    println!("  hypothesis_ok = {}", report.hypothesis_ok);
    if let Some(note) = &report.hypothesis_note {
        println!("  note: {note}");
    }
    println!("  observed constant anyway: {:.6}", report.observed_constant);
}
