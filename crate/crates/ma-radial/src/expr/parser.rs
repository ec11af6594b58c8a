//! Recursive-descent parser.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term  (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          -- right-associative
//! atom    := number | variable | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` with a constant integer exponent is specialized to [`Node::PowI`]
//! (evaluated by repeated multiplication, exact on polynomials and defined
//! for negative bases); any other exponent goes through exp/log.

use super::token::{tokenize, Spanned, Tok};
use super::{Func, Node, Var};
use crate::error::{Error, Result};

pub fn parse(src: &str) -> Result<Node> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        i: 0,
        end: src.len(),
    };
    let node = p.expr()?;
    if p.i < p.toks.len() {
        let s = &p.toks[p.i];
        return Err(Error::Syntax {
            pos: s.pos,
            msg: format!("unexpected `{}`", s.tok),
        });
    }
    Ok(node)
}

struct Parser {
    toks: Vec<Spanned>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|s| &s.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|s| s.pos).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|s| s.tok.clone());
        self.i += 1;
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.i += 1;
                Ok(())
            }
            Some(t) => Err(Error::Syntax {
                pos: self.pos(),
                msg: format!("expected `{want}`, found `{t}`"),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                msg: format!("expected `{want}`, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.i += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.i += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.i += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.i += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.i += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.i += 1;
            let exponent = self.unary()?;
            return Ok(make_pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::Ident(name)) => match name.as_str() {
                "t" => Ok(Node::Var(Var::T)),
                "xi" => Ok(Node::Var(Var::Xi)),
                "zeta" => Ok(Node::Var(Var::Zeta)),
                _ => {
                    if let Some(func) = Func::by_name(&name) {
                        self.expect(&Tok::LParen).map_err(|_| Error::Syntax {
                            pos,
                            msg: format!("function `{name}` requires parentheses"),
                        })?;
                        let arg = self.expr()?;
                        // A comma here would mean a second argument.
                        if matches!(self.peek(), Some(Tok::Comma)) {
                            let mut got = 1;
                            while matches!(self.peek(), Some(Tok::Comma)) {
                                self.i += 1;
                                self.expr()?;
                                got += 1;
                            }
                            self.expect(&Tok::RParen)?;
                            return Err(Error::Arity {
                                name,
                                expected: 1,
                                got,
                            });
                        }
                        self.expect(&Tok::RParen)?;
                        Ok(Node::Call(func, Box::new(arg)))
                    } else {
                        Err(Error::UnknownIdentifier { name, pos })
                    }
                }
            },
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Some(t) => Err(Error::Syntax {
                pos,
                msg: format!("unexpected `{t}`"),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Fold a constant exponent into `PowI` when it is integral.
fn make_pow(base: Node, exponent: Node) -> Node {
    if let Some(v) = const_value(&exponent) {
        if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 {
            return Node::PowI(Box::new(base), v as i32);
        }
    }
    Node::Pow(Box::new(base), Box::new(exponent))
}

fn const_value(node: &Node) -> Option<f64> {
    match node {
        Node::Num(v) => Some(*v),
        Node::Neg(inner) => const_value(inner).map(|v| -v),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        // -t^2 parses as -(t^2)
        let e = parse("-t^2").unwrap();
        assert_eq!(
            e,
            Node::Neg(Box::new(Node::PowI(Box::new(Node::Var(Var::T)), 2)))
        );
    }

    #[test]
    fn caret_right_associative() {
        let e = parse("t^2^3").unwrap();
        // t^(2^3); inner 2^3 is constant-folded into PowI only at the outer
        // level if integral, so expect Pow(t, PowI(2,3)).
        assert_eq!(
            e,
            Node::Pow(
                Box::new(Node::Var(Var::T)),
                Box::new(Node::PowI(Box::new(Node::Num(2.0)), 3))
            )
        );
    }

    #[test]
    fn negative_integer_exponent_folds() {
        let e = parse("t^-2").unwrap();
        assert_eq!(e, Node::PowI(Box::new(Node::Var(Var::T)), -2));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("t + * 3").unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!(pos, 4),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("y + 1").unwrap_err();
        assert!(matches!(err, Error::UnknownIdentifier { .. }));
    }

    #[test]
    fn arity_mismatch() {
        let err = parse("exp(t, 1)").unwrap_err();
        assert!(matches!(
            err,
            Error::Arity {
                expected: 1,
                got: 2,
                ..
            }
        ));
    }
}
