//! The measure-theoretic sanity check on a solved profile: for a convex
//! u the gradient image of an annulus has measure ∫ det D²u over the
//! annulus, both sides computable in closed form from g′ alone. The
//! identity is exact for the Monge–Ampère solution and additive over
//! nested annuli, so it catches solver bias that a pointwise residual
//! would miss.
//!
//!     cargo run --example verify_alexandrov

use std::f64::consts::PI;

use ma_radial::{gradient_image_measure, solve, verify, Problem};

fn main() {
    // The paraboloid: det D²u = 1 gives u = r²/2, so ∇u is the identity
    // and the image of an annulus is the annulus itself.
    let p = Problem::new(2, "1".parse().unwrap(), 0.5).unwrap();
    let sol = solve(&p).unwrap();
    println!("f = 1, n = 2 (the paraboloid):");
    for (r1, r2) in [(0.2, 0.6), (0.3, 0.9), (0.6, 1.0)] {
        let (measure, integral) = gradient_image_measure(&sol, r1, r2).unwrap();
        let exact = PI * (r2 * r2 - r1 * r1);
        println!(
            "  annulus ({r1}, {r2}): |grad u(A)| = {measure:.12}  integral = {integral:.12}  pi*(r2^2 - r1^2) = {exact:.12}"
        );
    }

    let (inner, _) = gradient_image_measure(&sol, 0.2, 0.5).unwrap();
    let (outer, _) = gradient_image_measure(&sol, 0.5, 0.9).unwrap();
    let (whole, _) = gradient_image_measure(&sol, 0.2, 0.9).unwrap();
    println!("  additivity defect over (0.2, 0.5) + (0.5, 0.9): {:.3e}", (inner + outer - whole).abs());

    // Full report on a problem with no closed form.
    let p = Problem::new(3, "2 + cos(20*t)".parse().unwrap(), 0.2).unwrap();
    let sol = solve(&p).unwrap();
    println!("\nf = 2 + cos(20*t), n = 3:");
    print!("{}", verify(&sol).unwrap());
}
