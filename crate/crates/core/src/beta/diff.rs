//! Symbolic differentiation of closed identities in one parameter.

use num_traits::Zero;

use super::smart;
use super::ClosedIdentity;
use crate::dsl::{Expr, Func, Linear, Var};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::model::{ClosedSide, Summand};

/// The digamma combination produced for one binomial factor. For
/// `binom(B, C)` the coefficients multiply `H(B)`, `H(C)` and `H(B−C)`; for
/// `rbinom(B, C)` they multiply `H(C)`, `H(B−C)` and `H(B)`. They always sum
/// to zero, which is what cancels the Euler constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaTrace {
    pub factor: String,
    pub coefficients: [Rational; 3],
}

struct Ctx {
    var: Var,
    traces: Vec<GammaTrace>,
}

fn constant_slope(e: &Expr, var: Var) -> Result<Rational> {
    if !e.mentions(var) {
        return Ok(Rational::zero());
    }
    match Linear::from_expr(e) {
        Some(l) => Ok(l.coefficient(var)),
        None => Err(Error::Shape(format!(
            "`{e}` is not affine with constant slope in {}",
            var.name()
        ))),
    }
}

fn h(arg: Expr) -> Expr {
    Expr::call(Func::H, vec![arg])
}

/// `Σ c_i H(x_i)` with zero terms dropped.
fn h_combination(parts: Vec<(Rational, Expr)>) -> Expr {
    let mut acc = Expr::int(0);
    for (c, x) in parts {
        if c.is_zero() {
            continue;
        }
        let term = smart::mul(Expr::Num(c.clone()), h(x.clone()));
        acc = if smart::is_zero(&acc) {
            term
        } else if c < Rational::zero() {
            smart::sub(acc, smart::mul(Expr::Num(-c), h(x)))
        } else {
            smart::add(acc, term)
        };
    }
    acc
}

impl Ctx {
    fn d(&mut self, e: &Expr) -> Result<Expr> {
        if !e.mentions(self.var) {
            return Ok(Expr::int(0));
        }
        match e {
            Expr::Num(_) => Ok(Expr::int(0)),
            Expr::Var(_) => Ok(Expr::int(1)),
            Expr::Neg(a) => Ok(smart::neg(self.d(a)?)),
            Expr::Add(a, b) => Ok(smart::add(self.d(a)?, self.d(b)?)),
            Expr::Sub(a, b) => Ok(smart::sub(self.d(a)?, self.d(b)?)),
            Expr::Mul(a, b) => {
                let (da, db) = (self.d(a)?, self.d(b)?);
                Ok(smart::add(
                    smart::mul(da, (**b).clone()),
                    smart::mul((**a).clone(), db),
                ))
            }
            Expr::Div(a, b) => {
                let da = self.d(a)?;
                if !b.mentions(self.var) {
                    return Ok(smart::div(da, (**b).clone()));
                }
                let db = self.d(b)?;
                Ok(smart::sub(
                    smart::div(da, (**b).clone()),
                    smart::div(
                        smart::mul((**a).clone(), db),
                        smart::pow((**b).clone(), Expr::int(2)),
                    ),
                ))
            }
            Expr::Pow(x, y) => {
                if y.mentions(self.var) {
                    return Err(Error::Shape(format!(
                        "exponent `{y}` depends on {}",
                        self.var.name()
                    )));
                }
                let lowered = match &**y {
                    Expr::Num(q) => Expr::Num(q - Rational::from_integer(1.into())),
                    other => smart::sub(other.clone(), Expr::int(1)),
                };
                Ok(smart::mul(
                    smart::mul((**y).clone(), smart::pow((**x).clone(), lowered)),
                    self.d(x)?,
                ))
            }
            Expr::Call(f @ (Func::Binom | Func::RBinom), args) => self.d_binom(*f, args, e),
            Expr::Call(f, _) => Err(Error::Shape(format!(
                "cannot differentiate `{}` with a {}-dependent argument",
                f.name(),
                self.var.name()
            ))),
            Expr::Sum {
                index,
                lo,
                hi,
                body,
            } => {
                if lo.mentions(self.var) || hi.mentions(self.var) {
                    return Err(Error::Shape(
                        "summation bounds depend on the variable".into(),
                    ));
                }
                let db = self.d(body)?;
                if smart::is_zero(&db) {
                    return Ok(db);
                }
                Ok(Expr::sum(*index, (**lo).clone(), (**hi).clone(), db))
            }
        }
    }

    fn d_binom(&mut self, f: Func, args: &[Expr], whole: &Expr) -> Result<Expr> {
        let (b, c) = (&args[0], &args[1]);
        let (db, dc) = (constant_slope(b, self.var)?, constant_slope(c, self.var)?);
        let b_minus_c = match (Linear::from_expr(b), Linear::from_expr(c)) {
            (Some(lb), Some(lc)) => lb.minus(&lc).to_expr(),
            _ => smart::sub(b.clone(), c.clone()),
        };
        let dbc = &db - &dc;
        let (parts, coefficients) = if f == Func::Binom {
            (
                vec![
                    (db.clone(), b.clone()),
                    (-dc.clone(), c.clone()),
                    (-dbc.clone(), b_minus_c),
                ],
                [db.clone(), -dc.clone(), -dbc.clone()],
            )
        } else {
            (
                vec![
                    (dc.clone(), c.clone()),
                    (dbc.clone(), b_minus_c),
                    (-db.clone(), b.clone()),
                ],
                [dc.clone(), dbc.clone(), -db.clone()],
            )
        };
        self.traces.push(GammaTrace {
            factor: whole.to_string(),
            coefficients,
        });
        Ok(smart::mul(whole.clone(), h_combination(parts)))
    }

    fn side(&mut self, side: &ClosedSide) -> Result<ClosedSide> {
        let mut sums = Vec::new();
        for s in &side.sums {
            if s.lower.mentions(self.var) || s.upper.mentions(self.var) {
                return Err(Error::Shape(format!(
                    "summation bounds depend on {}",
                    self.var.name()
                )));
            }
            let coeff = self.d(&s.coeff)?;
            if !smart::is_zero(&coeff) {
                sums.push(Summand {
                    coeff,
                    lower: s.lower.clone(),
                    upper: s.upper.clone(),
                });
            }
        }
        let extra = match &side.extra {
            Some(e) => Some(self.d(e)?).filter(|x| !smart::is_zero(x)),
            None => None,
        };
        Ok(ClosedSide { sums, extra })
    }
}

#[cfg(test)]
pub(crate) fn tests_side(side: &ClosedSide, var: Var) -> ClosedSide {
    Ctx {
        var,
        traces: Vec::new(),
    }
    .side(side)
    .unwrap()
}

/// `d/d var` of a single expression.
pub fn derivative(e: &Expr, var: Var) -> Result<Expr> {
    Ctx {
        var,
        traces: Vec::new(),
    }
    .d(e)
}

/// Differentiates both sides in `var` (which should be `r` or `s`).
pub fn differentiate(cid: &ClosedIdentity, var: Var) -> Result<ClosedIdentity> {
    Ok(differentiate_traced(cid, var)?.0)
}

/// Like [`differentiate`], also returning the per-factor digamma bookkeeping.
pub fn differentiate_traced(
    cid: &ClosedIdentity,
    var: Var,
) -> Result<(ClosedIdentity, Vec<GammaTrace>)> {
    let mut ctx = Ctx {
        var,
        traces: Vec::new(),
    };
    let lhs = ctx.side(&cid.lhs)?;
    let rhs = ctx.side(&cid.rhs)?;
    let mut provenance = cid.provenance.clone();
    provenance.push(format!("d/d{}", var.name()));
    Ok((
        ClosedIdentity {
            name: format!("{}/d{}", cid.name, var.name()),
            provenance,
            lhs,
            rhs,
        },
        ctx.traces,
    ))
}
