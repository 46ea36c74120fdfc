use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{Expr, Var};
use crate::exact::Rational;

/// A rational-linear combination of variables plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Linear {
    pub terms: BTreeMap<Var, Rational>,
    pub constant: Rational,
}

impl Linear {
    pub fn constant(c: Rational) -> Self {
        Linear {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Rational::one());
        Linear {
            terms,
            constant: Rational::zero(),
        }
    }

    /// Reads `e` as a linear form; `None` when it is not structurally linear.
    pub fn from_expr(e: &Expr) -> Option<Linear> {
        match e {
            Expr::Num(q) => Some(Linear::constant(q.clone())),
            Expr::Var(v) => Some(Linear::var(*v)),
            Expr::Neg(a) => Some(Linear::from_expr(a)?.scale(&-Rational::one())),
            Expr::Add(a, b) => Some(Linear::from_expr(a)?.plus(&Linear::from_expr(b)?)),
            Expr::Sub(a, b) => Some(Linear::from_expr(a)?.minus(&Linear::from_expr(b)?)),
            Expr::Mul(a, b) => {
                let (x, y) = (Linear::from_expr(a)?, Linear::from_expr(b)?);
                if x.is_constant() {
                    Some(y.scale(&x.constant))
                } else if y.is_constant() {
                    Some(x.scale(&y.constant))
                } else {
                    None
                }
            }
            Expr::Div(a, b) => {
                let y = Linear::from_expr(b)?;
                if !y.is_constant() || y.constant.is_zero() {
                    return None;
                }
                Some(Linear::from_expr(a)?.scale(&y.constant.recip()))
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, v: Var) -> Rational {
        self.terms.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Linear {
        let mut out = Linear::constant(&self.constant * c);
        for (v, q) in &self.terms {
            let p = q * c;
            if !p.is_zero() {
                out.terms.insert(*v, p);
            }
        }
        out
    }

    pub fn plus(&self, other: &Linear) -> Linear {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (v, q) in &other.terms {
            let p = out.coefficient(*v) + q;
            if p.is_zero() {
                out.terms.remove(v);
            } else {
                out.terms.insert(*v, p);
            }
        }
        out
    }

    pub fn minus(&self, other: &Linear) -> Linear {
        self.plus(&other.scale(&-Rational::one()))
    }

    /// Canonical expression: variables in `Var` order, constant last.
    pub fn to_expr(&self) -> Expr {
        let mut parts: Vec<(bool, Expr)> = Vec::new();
        for (v, q) in &self.terms {
            let mag = q.abs();
            let e = if mag.is_one() {
                Expr::Var(*v)
            } else {
                Expr::Num(mag).mul(Expr::Var(*v))
            };
            parts.push((q.is_negative(), e));
        }
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push((self.constant.is_negative(), Expr::Num(self.constant.abs())));
        }
        let mut it = parts.into_iter();
        let (neg, first) = it.next().expect("non-empty");
        let mut acc = if neg { first.neg() } else { first };
        for (neg, e) in it {
            acc = if neg { acc.sub(e) } else { acc.add(e) };
        }
        acc
    }
}
