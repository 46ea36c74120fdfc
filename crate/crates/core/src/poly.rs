//! Dense polynomials in `t` over the constant field and exact
//! verification of t-bearing identities at concrete `n`.

use std::fmt;

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;

use crate::dsl::{eval_scalar, Bindings, Expr, Var};
use crate::error::{Error, Result};
use crate::exact::{HalfInt, Rational, SymConst};
use crate::model::{Base, Identity, Side, StdTerm};
use crate::report::{Outcome, Point, PointReport, Value, VerificationReport};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DensePoly {
    coeffs: Vec<SymConst>,
}

impl DensePoly {
    pub fn zero() -> Self {
        DensePoly::default()
    }

    pub fn constant(c: SymConst) -> Self {
        DensePoly::from_coeffs(vec![c])
    }

    /// `t`
    pub fn t() -> Self {
        DensePoly::from_coeffs(vec![SymConst::zero(), SymConst::one()])
    }

    pub fn from_coeffs(coeffs: Vec<SymConst>) -> Self {
        let mut p = DensePoly { coeffs };
        p.trim();
        p
    }

    pub fn from_rationals(coeffs: &[Rational]) -> Self {
        DensePoly::from_coeffs(coeffs.iter().cloned().map(SymConst::rational).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(SymConst::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coefficients(&self) -> &[SymConst] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> SymConst {
        self.coeffs.get(i).cloned().unwrap_or_else(SymConst::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn as_constant(&self) -> Option<SymConst> {
        match self.coeffs.len() {
            0 => Some(SymConst::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn add_at(&mut self, i: usize, c: &SymConst) {
        if self.coeffs.len() <= i {
            self.coeffs.resize(i + 1, SymConst::zero());
        }
        self.coeffs[i] += c;
    }

    pub fn add(&self, other: &DensePoly) -> DensePoly {
        let mut out = self.clone();
        for (i, c) in other.coeffs.iter().enumerate() {
            out.add_at(i, c);
        }
        out.trim();
        out
    }

    pub fn scale(&self, c: &SymConst) -> DensePoly {
        DensePoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn neg(&self) -> DensePoly {
        self.scale(&SymConst::integer(-1))
    }

    pub fn sub(&self, other: &DensePoly) -> DensePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &DensePoly) -> DensePoly {
        if self.is_zero() || other.is_zero() {
            return DensePoly::zero();
        }
        let mut out = vec![SymConst::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        DensePoly::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> DensePoly {
        let mut acc = DensePoly::constant(SymConst::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `t^a (1 ± t)^b`
    pub fn monomial_times_base(a: usize, base: Base, b: usize) -> DensePoly {
        let mut coeffs = vec![SymConst::zero(); a + b + 1];
        let sign = if base == Base::OneMinusT { -1 } else { 1 };
        let mut c = Rational::one();
        for i in 0..=b {
            let signed = if i % 2 == 1 && sign < 0 {
                -c.clone()
            } else {
                c.clone()
            };
            coeffs[a + i] = SymConst::rational(signed);
            c = c * Rational::from_integer((b - i).into()) / Rational::from_integer((i + 1).into());
        }
        DensePoly::from_coeffs(coeffs)
    }
}

impl fmt::Display for DensePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `∫₀¹ p(t) dt`
pub fn integrate_unit(p: &DensePoly) -> SymConst {
    let mut acc = SymConst::zero();
    for (i, c) in p.coeffs.iter().enumerate() {
        acc += &c.scale(&Rational::new(1.into(), ((i + 1) as i64).into()));
    }
    acc
}

pub(crate) fn int_bound(e: &Expr, b: &Bindings) -> Result<i64> {
    eval_scalar(e, b)?
        .as_integer()
        .and_then(|x| x.to_i64())
        .ok_or_else(|| Error::Type(format!("summation bound `{e}` is not an integer")))
}

fn expand_term(t: &StdTerm, n: i64, out: &mut DensePoly) -> Result<()> {
    let nb = Bindings::new().with_int(Var::N, n);
    let (lo, hi) = (int_bound(&t.lower, &nb)?, int_bound(&t.upper, &nb)?);
    for k in lo..=hi {
        let (a, b) = (t.t_exp.eval(k, n), t.base_exp.eval(k, n));
        for e in [a, b] {
            if e < 0 {
                return Err(Error::NegativeExponent { k, exponent: e });
            }
        }
        let kb = nb.clone().with_int(Var::K, k);
        let c = eval_scalar(&t.coeff, &kb).map_err(|e| e.at_k(k))?;
        if c.is_zero() {
            continue;
        }
        let shape = DensePoly::monomial_times_base(a as usize, t.base, b as usize);
        for (i, x) in shape.coeffs.iter().enumerate() {
            out.add_at(i, &(x * &c));
        }
    }
    Ok(())
}

/// Evaluates an expression containing `t` to a polynomial.
pub fn eval_poly(e: &Expr, b: &Bindings) -> Result<DensePoly> {
    if !e.mentions(Var::T) {
        return Ok(DensePoly::constant(eval_scalar(e, b)?));
    }
    match e {
        Expr::Var(_) => Ok(DensePoly::t()),
        Expr::Neg(a) => Ok(eval_poly(a, b)?.neg()),
        Expr::Add(x, y) => Ok(eval_poly(x, b)?.add(&eval_poly(y, b)?)),
        Expr::Sub(x, y) => Ok(eval_poly(x, b)?.sub(&eval_poly(y, b)?)),
        Expr::Mul(x, y) => {
            let lhs = eval_poly(x, b)?;
            if lhs.is_zero() {
                eval_poly(y, b)?;
                return Ok(lhs);
            }
            Ok(lhs.mul(&eval_poly(y, b)?))
        }
        Expr::Div(x, y) => {
            if y.mentions(Var::T) {
                return Err(Error::Type(format!("division by the polynomial `{y}`")));
            }
            let d = eval_scalar(y, b)?;
            if d.is_zero() {
                return Err(Error::DivisionByZero(format!("`{y}` evaluates to 0")));
            }
            Ok(eval_poly(x, b)?.scale(&d.inverse()?))
        }
        Expr::Pow(x, y) => {
            let exp = eval_scalar(y, b)?
                .as_integer()
                .and_then(|i| i.to_i64())
                .ok_or_else(|| Error::Type(format!("exponent `{y}` must be an integer")))?;
            let k = b.get(Var::K).and_then(HalfInt::to_i64).unwrap_or(0);
            if exp < 0 {
                return Err(Error::NegativeExponent { k, exponent: exp });
            }
            Ok(eval_poly(x, b)?.pow(exp as u32))
        }
        Expr::Call(f, _) => Err(Error::Type(format!(
            "`{}` applied to a t-bearing argument",
            f.name()
        ))),
        Expr::Sum {
            index,
            lo,
            hi,
            body,
        } => {
            let (lo, hi) = (int_bound(lo, b)?, int_bound(hi, b)?);
            let mut acc = DensePoly::zero();
            let mut inner = b.clone();
            for i in lo..=hi {
                inner.set(*index, HalfInt::from_int(i));
                acc = acc.add(&eval_poly(body, &inner).map_err(|e| e.at_k(i))?);
            }
            Ok(acc)
        }
        Expr::Num(_) => unreachable!("t-free"),
    }
}

/// Expands a t-bearing side at a concrete `n`.
pub fn expand_side(side: &Side, n: i64) -> Result<DensePoly> {
    match side {
        Side::Standard(terms) => {
            let mut out = DensePoly::zero();
            for t in terms {
                expand_term(t, n, &mut out)?;
            }
            out.trim();
            Ok(out)
        }
        Side::GeneralPoly(e) => eval_poly(e, &Bindings::new().with_int(Var::N, n)),
        Side::Closed(_) => Err(Error::Shape(
            "closed side has no polynomial expansion".into(),
        )),
    }
}

/// Compares both sides coefficient-wise at `n`.
pub fn verify_poly(id: &Identity, n: i64) -> Result<PointReport> {
    let lhs = expand_side(&id.lhs, n)?;
    let rhs = expand_side(&id.rhs, n)?;
    let outcome = if lhs == rhs {
        Outcome::Equal(Value::Poly(lhs))
    } else {
        let len = lhs.coeffs.len().max(rhs.coeffs.len());
        let first = (0..len).find(|&i| lhs.coefficient(i) != rhs.coefficient(i));
        Outcome::Unequal {
            lhs: Value::Poly(lhs),
            rhs: Value::Poly(rhs),
            first_diff: first,
        }
    };
    Ok(PointReport {
        point: Point::new(n),
        outcome,
    })
}

/// `verify_poly` over a range of `n`; evaluation errors become undefined points.
pub fn verify_poly_range(id: &Identity, ns: impl IntoIterator<Item = i64>) -> VerificationReport {
    let ns: Vec<i64> = ns.into_iter().collect();
    let points = ns
        .par_iter()
        .map(|&n| {
            verify_poly(id, n).unwrap_or_else(|e| PointReport {
                point: Point::new(n),
                outcome: Outcome::Undefined(e.to_string()),
            })
        })
        .collect();
    VerificationReport::new(id.name.clone(), points)
}
