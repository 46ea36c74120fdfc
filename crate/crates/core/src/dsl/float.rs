//! Arbitrary-precision numerical evaluation at real (non-half-integer)
//! parameter values. Subexpressions whose inputs are all exact are still
//! evaluated exactly, so poles at fixed arguments keep their exact
//! semantics.

use num_traits::ToPrimitive;
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::eval::apply;
use super::{Expr, Func, Var};
use crate::error::{Error, Result};
use crate::exact::{HalfInt, SymConst};

#[derive(Clone, Debug)]
enum Slot {
    Exact(HalfInt),
    Approx(Float),
}

/// Variable values for [`eval_float`]: exact half-integers or reals.
#[derive(Clone, Debug, Default)]
pub struct FloatBindings {
    slots: Vec<(Var, Slot)>,
}

impl FloatBindings {
    pub fn new() -> Self {
        FloatBindings::default()
    }

    pub fn exact(mut self, v: Var, value: HalfInt) -> Self {
        self.put(v, Slot::Exact(value));
        self
    }

    pub fn real(mut self, v: Var, value: Float) -> Self {
        self.put(v, Slot::Approx(value));
        self
    }

    fn put(&mut self, v: Var, s: Slot) {
        self.slots.retain(|(w, _)| *w != v);
        self.slots.push((v, s));
    }

    fn get(&self, v: Var) -> Option<&Slot> {
        self.slots.iter().find(|(w, _)| *w == v).map(|(_, s)| s)
    }
}

#[derive(Clone, Debug)]
enum Val {
    Exact(SymConst),
    Approx(Float),
}

impl Val {
    fn to_float(&self, prec: u32) -> Float {
        match self {
            Val::Exact(c) => c.to_float(digits_for(prec)),
            Val::Approx(f) => f.clone(),
        }
    }
}

fn digits_for(prec: u32) -> u32 {
    (f64::from(prec) / std::f64::consts::LOG2_10).ceil() as u32
}

/// Evaluates `e` with `prec` bits of working precision.
pub fn eval_float(e: &Expr, b: &FloatBindings, prec: u32) -> Result<Float> {
    Ok(eval(e, b, prec)?.to_float(prec))
}

fn eval(e: &Expr, b: &FloatBindings, prec: u32) -> Result<Val> {
    match e {
        Expr::Num(q) => Ok(Val::Exact(SymConst::rational(q.clone()))),
        Expr::Var(v) => match b.get(*v) {
            Some(Slot::Exact(h)) => Ok(Val::Exact(SymConst::rational(h.to_rational()))),
            Some(Slot::Approx(f)) => Ok(Val::Approx(f.clone())),
            None => Err(Error::UnboundVariable(v.name().into())),
        },
        Expr::Neg(a) => Ok(match eval(a, b, prec)? {
            Val::Exact(c) => Val::Exact(-c),
            Val::Approx(f) => Val::Approx(-f),
        }),
        Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
            let (lhs, rhs) = (eval(x, b, prec)?, eval(y, b, prec)?);
            if let (Val::Exact(l), Val::Exact(r)) = (&lhs, &rhs) {
                return Ok(Val::Exact(match e {
                    Expr::Add(..) => l + r,
                    Expr::Sub(..) => l - r,
                    Expr::Mul(..) => l * r,
                    _ => {
                        if r.is_zero() {
                            return Err(Error::DivisionByZero(format!("`{y}` evaluates to 0")));
                        }
                        l * &r.inverse()?
                    }
                }));
            }
            let (l, r) = (lhs.to_float(prec), rhs.to_float(prec));
            Ok(Val::Approx(match e {
                Expr::Add(..) => l + r,
                Expr::Sub(..) => l - r,
                Expr::Mul(..) => l * r,
                _ => {
                    if r.is_zero() {
                        return Err(Error::DivisionByZero(format!("`{y}` evaluates to 0")));
                    }
                    l / r
                }
            }))
        }
        Expr::Pow(x, y) => {
            let exp = match eval(y, b, prec)? {
                Val::Exact(c) => c
                    .as_integer()
                    .and_then(|n| n.to_i32())
                    .ok_or_else(|| Error::Type(format!("exponent `{y}` must be an integer")))?,
                Val::Approx(_) => return Err(Error::Type(format!("exponent `{y}` must be exact"))),
            };
            match eval(x, b, prec)? {
                Val::Exact(c) => Ok(Val::Exact(c.pow(i64::from(exp))?)),
                Val::Approx(f) => Ok(Val::Approx(f.pow(exp))),
            }
        }
        Expr::Call(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval(a, b, prec))
                .collect::<Result<Vec<_>>>()?;
            if vals.iter().all(|v| matches!(v, Val::Exact(_))) {
                let exact: Vec<SymConst> = vals
                    .into_iter()
                    .map(|v| match v {
                        Val::Exact(c) => c,
                        Val::Approx(_) => unreachable!(),
                    })
                    .collect();
                return Ok(Val::Exact(apply(*f, &exact)?));
            }
            let fl: Vec<Float> = vals.iter().map(|v| v.to_float(prec)).collect();
            match f {
                Func::Binom => match binom_float(&fl[0], &fl[1], prec) {
                    Some(v) => Ok(Val::Approx(v)),
                    None => Err(Error::Pole(format!("binom at `{e}` is infinite"))),
                },
                Func::RBinom => match binom_float(&fl[0], &fl[1], prec) {
                    None => Ok(Val::Approx(Float::with_val(prec, 0))),
                    Some(v) if v.is_zero() => Err(Error::DivisionByZero(format!("`{e}`"))),
                    Some(v) => Ok(Val::Approx(v.recip())),
                },
                Func::H => {
                    let z = Float::with_val(prec, &fl[0] + 1u32);
                    if is_nonpos_int(&z) {
                        return Err(Error::Pole(format!("H at `{e}`")));
                    }
                    Ok(Val::Approx(
                        z.digamma() + Float::with_val(prec, Constant::Euler),
                    ))
                }
                _ => Err(Error::Type(format!(
                    "`{}` needs exact arguments in `{e}`",
                    f.name()
                ))),
            }
        }
        Expr::Sum {
            index,
            lo,
            hi,
            body,
        } => {
            let bound = |x: &Expr| -> Result<i64> {
                match eval(x, b, prec)? {
                    Val::Exact(c) => c
                        .as_integer()
                        .and_then(|n| n.to_i64())
                        .ok_or_else(|| Error::Type(format!("sum bound `{x}` must be an integer"))),
                    Val::Approx(_) => Err(Error::Type(format!("sum bound `{x}` must be exact"))),
                }
            };
            let (lo, hi) = (bound(lo)?, bound(hi)?);
            let mut acc = Val::Exact(SymConst::zero());
            for i in lo..=hi {
                let inner = b.clone().exact(*index, HalfInt::from_int(i));
                let term = eval(body, &inner, prec)?;
                acc = match (acc, term) {
                    (Val::Exact(a), Val::Exact(t)) => Val::Exact(a + t),
                    (a, t) => Val::Approx(a.to_float(prec) + t.to_float(prec)),
                };
            }
            Ok(acc)
        }
    }
}

fn is_nonpos_int(z: &Float) -> bool {
    z.is_integer() && *z <= 0
}

/// `Γ(x+1)/(Γ(y+1)Γ(x-y+1))`; `None` when only the numerator has a pole.
fn binom_float(x: &Float, y: &Float, prec: u32) -> Option<Float> {
    let num = Float::with_val(prec, x + 1u32);
    let da = Float::with_val(prec, y + 1u32);
    let db = Float::with_val(prec, x - y) + 1u32;
    if is_nonpos_int(&da) || is_nonpos_int(&db) {
        return Some(Float::with_val(prec, 0));
    }
    if is_nonpos_int(&num) {
        return None;
    }
    Some(num.gamma() / (da.gamma() * db.gamma()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    #[test]
    fn matches_exact_values_at_half_integers() {
        let prec = 200;
        let e = parse("rbinom(k + r, s)*H(k + r - s)").unwrap();
        let exact = FloatBindings::new()
            .exact(Var::K, HalfInt::from_int(2))
            .exact(Var::R, "3/2".parse().unwrap())
            .exact(Var::S, HalfInt::from_int(1));
        let real = FloatBindings::new()
            .exact(Var::K, HalfInt::from_int(2))
            .real(Var::R, Float::with_val(prec, 1.5))
            .real(Var::S, Float::with_val(prec, 1));
        let a = eval_float(&e, &exact, prec).unwrap();
        let b = eval_float(&e, &real, prec).unwrap();
        let diff = Float::with_val(prec, &a - &b).abs();
        assert!(diff < 1e-50, "{a} vs {b}");
    }

    #[test]
    fn exact_poles_survive() {
        let e = parse("rbinom(k - 1, s)").unwrap();
        let b = FloatBindings::new()
            .exact(Var::K, HalfInt::from_int(0))
            .real(Var::S, Float::with_val(100, 0.5));
        assert_eq!(eval_float(&e, &b, 100).unwrap(), 0);
    }
}
