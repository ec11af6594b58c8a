//! Radial Monge-Ampere equations on the unit ball, and what happens to them
//! at the origin.
//!
//! For rotationally symmetric u(x) = g(|x|^2/2) the equation
//! det D^2 u = f(|x|^2/2, u, |grad u|^2/2) collapses to a one-dimensional
//! fixed-point problem for g on [0, t_max]. This crate solves that problem
//! (directly when f ignores u and grad u, by damped Picard iteration
//! otherwise), classifies whether the resulting convex solution is smooth at
//! the origin from the vanishing order of t -> f(t, 0, 0), and checks the
//! interpolation inequalities that drive the classification on concrete data.
//!
//! Entry points:
//! * [`Problem`] + [`solve_explicit`] / [`picard_solve`] -> [`Solution`]
//! * [`vanishing_order`] + [`smoothness_verdict`] for the origin dichotomy
//! * [`hadamard_check`] / [`flatness_probe`] for the supporting inequalities
//! * [`verify`] for a posteriori residual and measure checks
//!
//! The `examples/` directory exercises each of these end to end; the
//! `ma-radial` binary wraps solve/analyze/verify/demo for shell use.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod expr;
pub(crate) mod parallel;
pub mod problem;
pub mod quadrature;
pub mod regularity;
pub mod solver;
pub mod verify;

pub use catalog::{
    catalog_problems, homogeneous_catalog, homogeneous_coefficient, homogeneous_problem,
    CatalogEntry, NamedProblem,
};
pub use error::{Error, Result};
pub use expr::{Expr, Partials, TaylorJet};
pub use problem::{
    check_comparability, taylor_factor, ComparabilityReport, Problem, RatioSample, SolverParams,
    TaylorFactorization,
};
pub use quadrature::{cumulative, t_beta, t_beta_derivative, Curve, Grid, SampledFunction};
pub use regularity::{
    classify, corollary_bound_check, dyadic_x_grid, flatness_probe, hadamard_check,
    smoothness_verdict, vanishing_order, CorollaryReport, FlatnessProbe, FlatnessRow,
    HadamardReport, HadamardSample, OrderEvidence, SmoothnessVerdict, VanishingOrder, Verdict,
    DEFAULT_MAX_ORDER,
};
pub use solver::{
    g_prime_from_phi, g_second, g_third, picard_solve, solve, solve_explicit, Solution,
};
pub use verify::{
    convexity_and_c1, gradient_image_measure, hessian_det_radial, ma_residual, verify, AnnulusRow,
    ResidualRow, VerifyReport,
};
