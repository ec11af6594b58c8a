//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; variants carry enough context
//! (positions, witness points, iteration counts) for callers to report a
//! useful diagnostic without re-running the computation.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Tokenizer or parser rejected the source text. `pos` is a byte offset.
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// Identifier is neither a variable (`t`, `xi`, `zeta`) nor a known function.
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    /// A function was called with the wrong number of arguments.
    #[error("{name} expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },

    /// Evaluation left the domain of a primitive (log of a non-positive
    /// number, division by zero, negative square root, ...).
    #[error("domain error: {what} in `{fragment}`")]
    Domain { what: String, fragment: String },

    /// Derivative requested at a point where the expression is not
    /// differentiable (`abs` at zero).
    #[error("not differentiable: {what} in `{fragment}`")]
    NotDifferentiable { what: String, fragment: String },

    /// Power-series expansion does not exist at the requested center
    /// (e.g. `1/t` or `exp(-1/t)` expanded at t = 0). Callers fall back to
    /// limit-based probing.
    #[error("expression is singular at t = {center}: {what}")]
    SingularAtCenter { center: f64, what: String },

    /// A parameter fell outside its documented range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Query outside the span of a sampled function or solution.
    #[error("argument {value} outside span [{lo}, {hi}]")]
    OutsideSpan { value: f64, lo: f64, hi: f64 },

    /// The right-hand side must be nonnegative; a negative value was sampled.
    #[error("RHS negative at (t, xi, zeta) = ({t}, {xi}, {zeta}): f = {value}")]
    RhsNegative {
        t: f64,
        xi: f64,
        zeta: f64,
        value: f64,
    },

    /// `solve_explicit` was called on an f that depends on xi or zeta.
    #[error("f depends on xi or zeta; not explicit; use picard_solve")]
    NotExplicit,

    /// Fixed-point iteration did not reach the tolerance within `max_iter`.
    #[error("no convergence after {iterations} iterations (last update {last_update:.3e})")]
    NonConvergence { iterations: usize, last_update: f64 },

    /// A non-finite value appeared during iteration.
    #[error("non-finite value at iteration {iteration}: {what}")]
    Numeric { iteration: usize, what: String },

    /// The two vanishing-order estimators disagree.
    #[error("order estimate indeterminate: jet suggests {jet_order:?}, slope fit {slope:.3}")]
    Indeterminate {
        jet_order: Option<u32>,
        slope: f64,
    },

    /// Malformed configuration file.
    #[error("invalid config: {0}")]
    Config(String),

    /// Malformed solution CSV.
    #[error("invalid solution file: {0}")]
    SolutionFile(String),

    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}
