//! Forward-mode automatic differentiation with three simultaneous partials.

use super::{Func, Node, Var};
use crate::error::{Error, Result};

/// Value together with its gradient in (t, xi, zeta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual3 {
    pub v: f64,
    pub dt: f64,
    pub dxi: f64,
    pub dzeta: f64,
}

impl Dual3 {
    fn constant(v: f64) -> Self {
        Dual3 {
            v,
            dt: 0.0,
            dxi: 0.0,
            dzeta: 0.0,
        }
    }

    fn chain(self, v: f64, dv: f64) -> Self {
        Dual3 {
            v,
            dt: dv * self.dt,
            dxi: dv * self.dxi,
            dzeta: dv * self.dzeta,
        }
    }
}

pub fn eval_dual(node: &Node, t: f64, xi: f64, zeta: f64) -> Result<Dual3> {
    let frag = || node.to_string();
    match node {
        Node::Num(v) => Ok(Dual3::constant(*v)),
        Node::Var(Var::T) => Ok(Dual3 {
            v: t,
            dt: 1.0,
            dxi: 0.0,
            dzeta: 0.0,
        }),
        Node::Var(Var::Xi) => Ok(Dual3 {
            v: xi,
            dt: 0.0,
            dxi: 1.0,
            dzeta: 0.0,
        }),
        Node::Var(Var::Zeta) => Ok(Dual3 {
            v: zeta,
            dt: 0.0,
            dxi: 0.0,
            dzeta: 1.0,
        }),
        Node::Neg(a) => {
            let a = eval_dual(a, t, xi, zeta)?;
            Ok(Dual3 {
                v: -a.v,
                dt: -a.dt,
                dxi: -a.dxi,
                dzeta: -a.dzeta,
            })
        }
        Node::Add(a, b) => {
            let a = eval_dual(a, t, xi, zeta)?;
            let b = eval_dual(b, t, xi, zeta)?;
            Ok(Dual3 {
                v: a.v + b.v,
                dt: a.dt + b.dt,
                dxi: a.dxi + b.dxi,
                dzeta: a.dzeta + b.dzeta,
            })
        }
        Node::Sub(a, b) => {
            let a = eval_dual(a, t, xi, zeta)?;
            let b = eval_dual(b, t, xi, zeta)?;
            Ok(Dual3 {
                v: a.v - b.v,
                dt: a.dt - b.dt,
                dxi: a.dxi - b.dxi,
                dzeta: a.dzeta - b.dzeta,
            })
        }
        Node::Mul(a, b) => {
            let a = eval_dual(a, t, xi, zeta)?;
            let b = eval_dual(b, t, xi, zeta)?;
            Ok(Dual3 {
                v: a.v * b.v,
                dt: a.dt * b.v + a.v * b.dt,
                dxi: a.dxi * b.v + a.v * b.dxi,
                dzeta: a.dzeta * b.v + a.v * b.dzeta,
            })
        }
        Node::Div(a, b) => {
            let a = eval_dual(a, t, xi, zeta)?;
            let b = eval_dual(b, t, xi, zeta)?;
            if b.v == 0.0 {
                return Err(Error::Domain {
                    what: "division by zero".into(),
                    fragment: frag(),
                });
            }
            let v = a.v / b.v;
            Ok(Dual3 {
                v,
                dt: (a.dt - v * b.dt) / b.v,
                dxi: (a.dxi - v * b.dxi) / b.v,
                dzeta: (a.dzeta - v * b.dzeta) / b.v,
            })
        }
        Node::PowI(a, k) => {
            let a = eval_dual(a, t, xi, zeta)?;
            if a.v == 0.0 && *k < 0 {
                return Err(Error::Domain {
                    what: "zero raised to a negative power".into(),
                    fragment: frag(),
                });
            }
            let v = a.v.powi(*k);
            // d(a^k) = k a^(k-1) da; guard 0^0 and 0^1 which have dv 0 and 1*da.
            let dv = if *k == 0 {
                0.0
            } else {
                *k as f64 * a.v.powi(*k - 1)
            };
            Ok(a.chain(v, dv))
        }
        Node::Pow(a, b) => {
            let a = eval_dual(a, t, xi, zeta)?;
            let b = eval_dual(b, t, xi, zeta)?;
            // General power via exp(b ln a): requires a > 0.
            if a.v <= 0.0 {
                return Err(Error::Domain {
                    what: format!("non-positive base {} for real exponent", a.v),
                    fragment: frag(),
                });
            }
            let v = a.v.powf(b.v);
            let ln_a = a.v.ln();
            Ok(Dual3 {
                v,
                dt: v * (b.dt * ln_a + b.v * a.dt / a.v),
                dxi: v * (b.dxi * ln_a + b.v * a.dxi / a.v),
                dzeta: v * (b.dzeta * ln_a + b.v * a.dzeta / a.v),
            })
        }
        Node::Call(func, arg) => {
            let a = eval_dual(arg, t, xi, zeta)?;
            match func {
                Func::Exp => {
                    let v = a.v.exp();
                    Ok(a.chain(v, v))
                }
                Func::Log => {
                    if a.v <= 0.0 {
                        return Err(Error::Domain {
                            what: format!("log of non-positive value {}", a.v),
                            fragment: frag(),
                        });
                    }
                    Ok(a.chain(a.v.ln(), 1.0 / a.v))
                }
                Func::Sin => Ok(a.chain(a.v.sin(), a.v.cos())),
                Func::Cos => Ok(a.chain(a.v.cos(), -a.v.sin())),
                Func::Sqrt => {
                    if a.v < 0.0 {
                        return Err(Error::Domain {
                            what: format!("sqrt of negative value {}", a.v),
                            fragment: frag(),
                        });
                    }
                    if a.v == 0.0 {
                        // Derivative unbounded; only a constant argument passes.
                        if a.dt == 0.0 && a.dxi == 0.0 && a.dzeta == 0.0 {
                            return Ok(Dual3::constant(0.0));
                        }
                        return Err(Error::NotDifferentiable {
                            what: "sqrt at zero".into(),
                            fragment: frag(),
                        });
                    }
                    let v = a.v.sqrt();
                    Ok(a.chain(v, 0.5 / v))
                }
                Func::Abs => {
                    if a.v == 0.0 {
                        if a.dt == 0.0 && a.dxi == 0.0 && a.dzeta == 0.0 {
                            return Ok(Dual3::constant(0.0));
                        }
                        return Err(Error::NotDifferentiable {
                            what: "abs at zero".into(),
                            fragment: frag(),
                        });
                    }
                    Ok(a.chain(a.v.abs(), a.v.signum()))
                }
            }
        }
    }
}
