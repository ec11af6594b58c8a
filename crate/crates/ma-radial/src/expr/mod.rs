//! Expression trees in the variables `t`, `xi`, `zeta`.
//!
//! This is the input language for right-hand sides f(t, xi, zeta): the four
//! arithmetic operators, `^` (right-associative, integer or real exponent),
//! unary minus, the functions `exp log sin cos sqrt abs`, numeric literals
//! and the three variable names. In the radial reduction the slot meanings
//! are t = r^2/2, xi = u, zeta = |grad u|^2/2.
//!
//! Three evaluators share one tree:
//! * [`Expr::eval`] - plain f64 evaluation with domain checks,
//! * [`Expr::partials`] - forward-mode derivatives (f, f_t, f_xi, f_zeta),
//! * [`Expr::taylor_in_t`] / [`Expr::jet_at`] - truncated power series in t,
//!   used for vanishing orders and for derivatives of any order without
//!   finite differencing.

mod dual;
mod jet;
mod parser;
mod token;

pub use dual::Dual3;
pub use jet::TaylorJet;

use crate::error::{Error, Result};

/// Default truncation order for Taylor expansions in `t`.
pub const DEFAULT_TAYLOR_ORDER: usize = 12;
/// Hard cap on requested expansion orders.
pub const MAX_TAYLOR_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    Xi,
    Zeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Abs,
}

impl Func {
    fn by_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            _ => None,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

/// Parsed expression node. `PowI` is the integer-exponent specialization
/// (repeated multiplication; defined for negative bases), `Pow` the general
/// real power evaluated through exp/log.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    PowI(Box<Node>, i32),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed, immutable expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
}

/// First partial derivatives of f at a point, from one forward-AD pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub value: f64,
    pub dt: f64,
    pub dxi: f64,
    pub dzeta: f64,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Ok(Expr {
            root: parser::parse(src)?,
        })
    }

    pub fn eval(&self, t: f64, xi: f64, zeta: f64) -> Result<f64> {
        eval_node(&self.root, t, xi, zeta)
    }

    pub fn partials(&self, t: f64, xi: f64, zeta: f64) -> Result<Partials> {
        let d = dual::eval_dual(&self.root, t, xi, zeta)?;
        Ok(Partials {
            value: d.v,
            dt: d.dt,
            dxi: d.dxi,
            dzeta: d.dzeta,
        })
    }

    /// Taylor expansion in `t` about 0 with `xi`, `zeta` held fixed.
    ///
    /// Fails with [`Error::SingularAtCenter`] when the expression has no
    /// power-series expansion there (e.g. `1/t`, `exp(-1/t)`), which callers
    /// treat as the signal to switch to limit-based probing.
    pub fn taylor_in_t(&self, xi: f64, zeta: f64, order: usize) -> Result<TaylorJet> {
        self.jet_at(0.0, xi, zeta, order)
    }

    /// Taylor expansion in `t` about an arbitrary center.
    pub fn jet_at(&self, center: f64, xi: f64, zeta: f64, order: usize) -> Result<TaylorJet> {
        if order > MAX_TAYLOR_ORDER {
            return Err(Error::Parameter(format!(
                "taylor order {order} exceeds maximum {MAX_TAYLOR_ORDER}"
            )));
        }
        jet::eval_jet(&self.root, center, xi, zeta, order)
    }

    /// k-th t-derivative at `center` via a recentred jet (never finite
    /// differences, which cancel catastrophically on flat functions).
    pub fn t_derivative(&self, k: usize, center: f64, xi: f64, zeta: f64) -> Result<f64> {
        Ok(self.jet_at(center, xi, zeta, k)?.derivative(k))
    }

    /// Substitute constants for `xi` and `zeta`, leaving a function of `t`
    /// alone. No simplification is performed, so evaluation of the result
    /// reproduces `eval(t, xi0, zeta0)` bitwise.
    pub fn substitute(&self, xi0: f64, zeta0: f64) -> Expr {
        Expr {
            root: substitute_node(&self.root, xi0, zeta0),
        }
    }

    /// True when the tree mentions the variable.
    pub fn uses(&self, var: Var) -> bool {
        uses_node(&self.root, var)
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

fn eval_node(node: &Node, t: f64, xi: f64, zeta: f64) -> Result<f64> {
    let frag = || node.to_string();
    match node {
        Node::Num(v) => Ok(*v),
        Node::Var(Var::T) => Ok(t),
        Node::Var(Var::Xi) => Ok(xi),
        Node::Var(Var::Zeta) => Ok(zeta),
        Node::Neg(a) => Ok(-eval_node(a, t, xi, zeta)?),
        Node::Add(a, b) => Ok(eval_node(a, t, xi, zeta)? + eval_node(b, t, xi, zeta)?),
        Node::Sub(a, b) => Ok(eval_node(a, t, xi, zeta)? - eval_node(b, t, xi, zeta)?),
        Node::Mul(a, b) => Ok(eval_node(a, t, xi, zeta)? * eval_node(b, t, xi, zeta)?),
        Node::Div(a, b) => {
            let num = eval_node(a, t, xi, zeta)?;
            let den = eval_node(b, t, xi, zeta)?;
            if den == 0.0 {
                return Err(Error::Domain {
                    what: "division by zero".into(),
                    fragment: frag(),
                });
            }
            Ok(num / den)
        }
        Node::PowI(a, k) => {
            let base = eval_node(a, t, xi, zeta)?;
            if base == 0.0 && *k < 0 {
                return Err(Error::Domain {
                    what: "zero raised to a negative power".into(),
                    fragment: frag(),
                });
            }
            Ok(base.powi(*k))
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, t, xi, zeta)?;
            let e = eval_node(b, t, xi, zeta)?;
            if base < 0.0 || (base == 0.0 && e <= 0.0) {
                return Err(Error::Domain {
                    what: format!("{base} raised to real power {e}"),
                    fragment: frag(),
                });
            }
            Ok(base.powf(e))
        }
        Node::Call(func, arg) => {
            let a = eval_node(arg, t, xi, zeta)?;
            match func {
                Func::Exp => Ok(a.exp()),
                Func::Log => {
                    if a <= 0.0 {
                        return Err(Error::Domain {
                            what: format!("log of non-positive value {a}"),
                            fragment: frag(),
                        });
                    }
                    Ok(a.ln())
                }
                Func::Sin => Ok(a.sin()),
                Func::Cos => Ok(a.cos()),
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(Error::Domain {
                            what: format!("sqrt of negative value {a}"),
                            fragment: frag(),
                        });
                    }
                    Ok(a.sqrt())
                }
                Func::Abs => Ok(a.abs()),
            }
        }
    }
}

fn substitute_node(node: &Node, xi0: f64, zeta0: f64) -> Node {
    match node {
        Node::Num(v) => Node::Num(*v),
        Node::Var(Var::T) => Node::Var(Var::T),
        Node::Var(Var::Xi) => Node::Num(xi0),
        Node::Var(Var::Zeta) => Node::Num(zeta0),
        Node::Neg(a) => Node::Neg(Box::new(substitute_node(a, xi0, zeta0))),
        Node::Add(a, b) => Node::Add(
            Box::new(substitute_node(a, xi0, zeta0)),
            Box::new(substitute_node(b, xi0, zeta0)),
        ),
        Node::Sub(a, b) => Node::Sub(
            Box::new(substitute_node(a, xi0, zeta0)),
            Box::new(substitute_node(b, xi0, zeta0)),
        ),
        Node::Mul(a, b) => Node::Mul(
            Box::new(substitute_node(a, xi0, zeta0)),
            Box::new(substitute_node(b, xi0, zeta0)),
        ),
        Node::Div(a, b) => Node::Div(
            Box::new(substitute_node(a, xi0, zeta0)),
            Box::new(substitute_node(b, xi0, zeta0)),
        ),
        Node::PowI(a, k) => Node::PowI(Box::new(substitute_node(a, xi0, zeta0)), *k),
        Node::Pow(a, b) => Node::Pow(
            Box::new(substitute_node(a, xi0, zeta0)),
            Box::new(substitute_node(b, xi0, zeta0)),
        ),
        Node::Call(f, a) => Node::Call(*f, Box::new(substitute_node(a, xi0, zeta0))),
    }
}

fn uses_node(node: &Node, var: Var) -> bool {
    match node {
        Node::Num(_) => false,
        Node::Var(v) => *v == var,
        Node::Neg(a) | Node::PowI(a, _) | Node::Call(_, a) => uses_node(a, var),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b)
        | Node::Pow(a, b) => uses_node(a, var) || uses_node(b, var),
    }
}

// Precedence levels for printing: additive 0, multiplicative 1, unary 2,
// power 3, atom 4.
fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => 0,
        Node::Mul(..) | Node::Div(..) => 1,
        Node::Neg(..) => 2,
        Node::PowI(..) | Node::Pow(..) => 3,
        Node::Num(v) if *v < 0.0 => 2,
        _ => 4,
    }
}

impl std::fmt::Display for Node {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn paren(f: &mut std::fmt::Formatter<'_>, child: &Node, min: u8) -> std::fmt::Result {
            if precedence(child) < min {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        }
        match self {
            Node::Num(v) => write!(f, "{v}"),
            Node::Var(Var::T) => write!(f, "t"),
            Node::Var(Var::Xi) => write!(f, "xi"),
            Node::Var(Var::Zeta) => write!(f, "zeta"),
            Node::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, 2)
            }
            Node::Add(a, b) => {
                paren(f, a, 0)?;
                write!(f, " + ")?;
                paren(f, b, 1)
            }
            Node::Sub(a, b) => {
                paren(f, a, 0)?;
                write!(f, " - ")?;
                paren(f, b, 1)
            }
            Node::Mul(a, b) => {
                paren(f, a, 1)?;
                write!(f, "*")?;
                paren(f, b, 2)
            }
            Node::Div(a, b) => {
                paren(f, a, 1)?;
                write!(f, "/")?;
                paren(f, b, 4)
            }
            Node::PowI(a, k) => {
                paren(f, a, 4)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Pow(a, b) => {
                paren(f, a, 4)?;
                write!(f, "^")?;
                paren(f, b, 4)
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
