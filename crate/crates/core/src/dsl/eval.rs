use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{Bindings, Expr, Func, NamedSeq, Var};
use crate::error::{Error, Result};
use crate::exact::{HalfInt, Rational, SymConst};
use crate::special::{self, BinomValue};

/// Exact value of a scalar expression.
pub fn eval_scalar(e: &Expr, b: &Bindings) -> Result<SymConst> {
    match e {
        Expr::Num(q) => Ok(SymConst::rational(q.clone())),
        Expr::Var(Var::T) => Err(Error::Type("`t` in a scalar expression".into())),
        Expr::Var(v) => b
            .get(*v)
            .map(|h| SymConst::rational(h.to_rational()))
            .ok_or_else(|| Error::UnboundVariable(v.name().into())),
        Expr::Neg(a) => Ok(-eval_scalar(a, b)?),
        Expr::Add(x, y) => Ok(eval_scalar(x, b)? + eval_scalar(y, b)?),
        Expr::Sub(x, y) => Ok(eval_scalar(x, b)? - eval_scalar(y, b)?),
        Expr::Mul(x, y) => {
            let lhs = eval_scalar(x, b)?;
            if lhs.is_zero() {
                // still evaluate for errors in the other factor
                eval_scalar(y, b)?;
                return Ok(lhs);
            }
            Ok(lhs * eval_scalar(y, b)?)
        }
        Expr::Div(x, y) => {
            let num = eval_scalar(x, b)?;
            let den = eval_scalar(y, b)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero(format!("`{y}` evaluates to 0")));
            }
            Ok(num * den.inverse()?)
        }
        Expr::Pow(x, y) => {
            let base = eval_scalar(x, b)?;
            let exp = integer_arg(&eval_scalar(y, b)?, "exponent")?;
            let exp = exp
                .to_i64()
                .ok_or_else(|| Error::Type("exponent too large".into()))?;
            if base.is_zero() && exp < 0 {
                return Err(Error::DivisionByZero(format!("`{x}` = 0 raised to {exp}")));
            }
            base.pow(exp)
        }
        Expr::Call(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_scalar(a, b))
                .collect::<Result<Vec<_>>>()?;
            apply(*f, &vals)
        }
        Expr::Sum {
            index,
            lo,
            hi,
            body,
        } => {
            let lo = integer_arg(&eval_scalar(lo, b)?, "sum lower bound")?;
            let hi = integer_arg(&eval_scalar(hi, b)?, "sum upper bound")?;
            let mut inner = b.clone();
            let mut acc = SymConst::zero();
            let mut i = lo;
            while i <= hi {
                inner.set(*index, HalfInt::from_int(i.clone()));
                acc += &eval_scalar(body, &inner)?;
                i += 1;
            }
            Ok(acc)
        }
    }
}

fn halfint_arg(v: &SymConst, what: &str) -> Result<HalfInt> {
    v.as_halfint()
        .ok_or_else(|| Error::Type(format!("{what} must be a half-integer, got `{v}`")))
}

fn integer_arg(v: &SymConst, what: &str) -> Result<BigInt> {
    v.as_integer()
        .ok_or_else(|| Error::Type(format!("{what} must be an integer, got `{v}`")))
}

fn small_nonneg(v: &SymConst, what: &str) -> Result<u64> {
    integer_arg(v, what)?
        .to_u64()
        .ok_or_else(|| Error::Type(format!("{what} must be a non-negative integer, got `{v}`")))
}

pub(crate) fn apply(f: Func, vals: &[SymConst]) -> Result<SymConst> {
    match f {
        Func::Binom => {
            let (x, y) = (
                halfint_arg(&vals[0], "binom argument")?,
                halfint_arg(&vals[1], "binom argument")?,
            );
            match special::gen_binom(&x, &y) {
                BinomValue::Finite(v) => Ok(v),
                BinomValue::Infinite => Err(Error::Pole(format!("binom({x}, {y}) is infinite"))),
            }
        }
        Func::RBinom => {
            let (x, y) = (
                halfint_arg(&vals[0], "rbinom argument")?,
                halfint_arg(&vals[1], "rbinom argument")?,
            );
            special::recip_binom(&x, &y)
        }
        Func::H => special::harmonic(&halfint_arg(&vals[0], "harmonic index")?),
        Func::Hm => {
            let n = small_nonneg(&vals[0], "Hm index")?;
            let m = order(&vals[1])?;
            Ok(SymConst::rational(special::harmonic_m(n, m)))
        }
        Func::O => Ok(SymConst::rational(special::odd_harmonic_m(
            small_nonneg(&vals[0], "O index")?,
            1,
        ))),
        Func::Om => {
            let n = small_nonneg(&vals[0], "Om index")?;
            let m = order(&vals[1])?;
            Ok(SymConst::rational(special::odd_harmonic_m(n, m)))
        }
        Func::Kron => Ok(SymConst::integer(i64::from(vals[0] == vals[1]))),
        Func::Fact => Ok(SymConst::rational(special::factorial(small_nonneg(
            &vals[0],
            "factorial argument",
        )?))),
        Func::Sign => {
            let a = integer_arg(&vals[0], "sign argument")?;
            Ok(SymConst::integer(if a.is_even() { 1 } else { -1 }))
        }
        Func::Seq(seq) => {
            let j = integer_arg(&vals[0], "sequence index")?;
            if j.is_zero() && seq != NamedSeq::One {
                return Err(Error::DivisionByZero(format!("{}(0)", f.name())));
            }
            let j = Rational::from_integer(j);
            let one = Rational::from_integer(BigInt::from(1));
            Ok(SymConst::rational(match seq {
                NamedSeq::One => one,
                NamedSeq::Recip => one / j,
                NamedSeq::RecipSq => one / (&j * &j),
                NamedSeq::AltRecip => {
                    let sign = if j.to_integer().is_even() { -1 } else { 1 };
                    Rational::from_integer(BigInt::from(sign)) / j
                }
            }))
        }
    }
}

fn order(v: &SymConst) -> Result<u32> {
    integer_arg(v, "order")?
        .to_u32()
        .filter(|m| *m >= 1)
        .ok_or_else(|| Error::Type(format!("order must be a positive integer, got `{v}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn ev(src: &str, b: &Bindings) -> Result<SymConst> {
        eval_scalar(&parse(src).unwrap(), b)
    }

    fn sc(s: &str) -> SymConst {
        s.parse().unwrap()
    }

    #[test]
    fn evaluates_examples() {
        let none = Bindings::new();
        assert_eq!(ev("H(5/2)", &none).unwrap(), sc("46/15 - 2*L"));
        let n2 = Bindings::new().with_int(Var::N, 2);
        assert_eq!(
            ev("sum(k, 0, n, sign(k)*binom(n,k)/(k+1))", &n2).unwrap(),
            sc("1/3")
        );
        let b = Bindings::new().with_int(Var::N, 3).with_int(Var::K, 3);
        assert_eq!(ev("kron(n,k)", &b).unwrap(), sc("1"));
        let b = Bindings::new().with_int(Var::N, 3).with_int(Var::K, 2);
        assert_eq!(ev("kron(n,k)", &b).unwrap(), sc("0"));
        assert_eq!(ev("binom(-1/2, 3)", &none).unwrap(), sc("-5/16"));
        assert_eq!(ev("sum(k,1,4,1/(2*k-1))", &none).unwrap(), sc("176/105"));
        assert_eq!(ev("2^(-2)", &none).unwrap(), sc("1/4"));
        assert_eq!(
            ev("a_altrecip(2) + a_recipsq(3) + a_one(5)", &none).unwrap(),
            sc("11/18")
        );
    }

    #[test]
    fn empty_sums_are_zero() {
        let b = Bindings::new().with_int(Var::N, 0);
        assert_eq!(ev("sum(k, 1, n, 1/k)", &b).unwrap(), SymConst::zero());
        assert_eq!(ev("sum(k, 0, n-1, H(k))", &b).unwrap(), SymConst::zero());
    }

    #[test]
    fn error_paths() {
        let none = Bindings::new();
        assert!(matches!(ev("H(-2)", &none), Err(Error::Pole(_))));
        assert!(matches!(
            ev("1/(2-2)", &none),
            Err(Error::DivisionByZero(_))
        ));
        assert!(matches!(ev("sign(1/2)", &none), Err(Error::Type(_))));
        assert!(matches!(ev("2^(1/2)", &none), Err(Error::Type(_))));
        assert!(matches!(ev("n + 1", &none), Err(Error::UnboundVariable(_))));
        assert!(matches!(ev("binom(-1, 1/2)", &none), Err(Error::Pole(_))));
        assert_eq!(ev("rbinom(-1, 1/2)", &none).unwrap(), SymConst::zero());
        assert!(matches!(
            ev("rbinom(2, 3)", &none),
            Err(Error::DivisionByZero(_))
        ));
        assert!(matches!(ev("1/(1 + H(1/2))", &none), Err(Error::Type(_))));
    }
}
