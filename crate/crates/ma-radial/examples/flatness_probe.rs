//! When the right-hand side vanishes to infinite order at the center,
//! so does every derivative of the solution profile. `flatness_probe`
//! watches |h(t)|/t^N along a dyadic ladder t0·2^{−j}: decay for every
//! requested N is the numerical signature of infinite-order vanishing.
//!
//!     cargo run --example flatness_probe

use ma_radial::{flatness_probe, homogeneous_problem, solve, Problem};

fn main() {
    // Infinitely flat data: det D²u = exp(-1/t) in the plane.
    let p = Problem::new(2, "exp(-1/t)".parse().unwrap(), 0.0).unwrap();
    let sol = solve(&p).unwrap();
    println!("f = exp(-1/t), n = 2");
    for (label, h) in [("g2", &sol.g2), ("g3", &sol.g3)] {
        let probe = flatness_probe(|t| h.interpolate(t), 0.25, &[1, 2, 3, 4, 5]).unwrap();
        println!("-- probe of {label} --");
        print!("{probe}");
    }

    // Contrast: for f = (2t)^2 the profile is g = c·(2t)^2, so g″ tends
    // to the nonzero constant 8c and already |g″|/t refuses to decay.
    let sol = solve(&homogeneous_problem(2, 2).unwrap()).unwrap();
    let probe = flatness_probe(|t| sol.g2.interpolate(t), 0.25, &[1, 2, 3]).unwrap();
    println!("\nf = (2*t)^2, n = 2");
    println!("-- probe of g2 --");
    print!("{probe}");
}
