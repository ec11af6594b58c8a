//! Solve det D²u = r^{2m} on the unit ball and compare with the exact
//! solution u = c·r^p, p = 2 + 2m/n, c = 1/(p(p−1)^{1/n}).
//!
//!     cargo run --example solve_homogeneous

use ma_radial::{homogeneous_catalog, homogeneous_problem, solve};

fn main() {
    for entry in homogeneous_catalog() {
        let p = homogeneous_problem(entry.n, entry.m).expect("catalog entries are valid");
        let sol = solve(&p).expect("homogeneous right-hand sides solve explicitly");

        let mut worst = 0.0f64;
        for j in 0..=40 {
            let r = 0.05 + 0.95 * j as f64 / 40.0;
            let exact = entry.coefficient * r.powf(entry.exponent);
            let got = sol.u(r).expect("r inside the ball");
            worst = worst.max((got - exact).abs() / exact);
        }
        println!(
            "{}: u = {:.7}*r^{:.4}  max rel err {:.2e}  residual {:.2e}  ({:?})",
            entry.name, entry.coefficient, entry.exponent, worst, sol.residual_max, entry.expected,
        );
    }
}
