//! The expression language for coefficients, closed-form sides and
//! polynomial sides.
//!
//! ```text
//! expr   := term (("+"|"-") term)* ;
//! term   := unary (("*"|"/") unary)* ;
//! unary  := "-" unary | power ;
//! power  := atom ("^" unary)? ;
//! atom   := RATIONAL | VAR | "(" expr ")" | call ;
//! call   := IDENT "(" expr ("," expr)* ")" ;
//! ```
//!
//! `sum(index, lo, hi, body)` is a bounded sum. Polynomial sides may also use
//! the indeterminate `t`.

mod eval;
mod float;
mod linear;
mod parse;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use crate::exact::{HalfInt, Rational};

pub use eval::eval_scalar;
pub use float::{eval_float, FloatBindings};
pub use linear::Linear;
pub use parse::{parse, parse_poly};

/// Expression variables. `T` only appears in polynomial expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    N,
    K,
    J,
    R,
    S,
    U,
    V,
    T,
}

impl Var {
    pub const ALL: [Var; 8] = [
        Var::N,
        Var::K,
        Var::J,
        Var::R,
        Var::S,
        Var::U,
        Var::V,
        Var::T,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::N => "n",
            Var::K => "k",
            Var::J => "j",
            Var::R => "r",
            Var::S => "s",
            Var::U => "u",
            Var::V => "v",
            Var::T => "t",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Concrete sequences usable as unary calls, standing in for an arbitrary
/// sequence `a_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedSeq {
    /// `1/j`
    Recip,
    /// `1/j^2`
    RecipSq,
    /// `1`
    One,
    /// `(-1)^(j+1)/j`
    AltRecip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Binom,
    /// Reciprocal binomial; an infinite binomial contributes 0.
    RBinom,
    H,
    Hm,
    O,
    Om,
    Kron,
    Fact,
    /// `sign(a) = (-1)^a` for integer `a`.
    Sign,
    Seq(NamedSeq),
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Binom => "binom",
            Func::RBinom => "rbinom",
            Func::H => "H",
            Func::Hm => "Hm",
            Func::O => "O",
            Func::Om => "Om",
            Func::Kron => "kron",
            Func::Fact => "fact",
            Func::Sign => "sign",
            Func::Seq(NamedSeq::Recip) => "a_recip",
            Func::Seq(NamedSeq::RecipSq) => "a_recipsq",
            Func::Seq(NamedSeq::One) => "a_one",
            Func::Seq(NamedSeq::AltRecip) => "a_altrecip",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Binom | Func::RBinom | Func::Hm | Func::Om | Func::Kron => 2,
            _ => 1,
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        const ALL: [Func; 13] = [
            Func::Binom,
            Func::RBinom,
            Func::H,
            Func::Hm,
            Func::O,
            Func::Om,
            Func::Kron,
            Func::Fact,
            Func::Sign,
            Func::Seq(NamedSeq::Recip),
            Func::Seq(NamedSeq::RecipSq),
            Func::Seq(NamedSeq::One),
            Func::Seq(NamedSeq::AltRecip),
        ];
        ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression AST. Scalar expressions never mention `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    Sum {
        index: Var,
        lo: Box<Expr>,
        hi: Box<Expr>,
        body: Box<Expr>,
    },
}

/// Scalar-valued expression.
pub type SeqExpr = Expr;
/// Expression that may contain the indeterminate `t`.
pub type PolyExpr = Expr;

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(crate::exact::int(n))
    }

    pub fn num(q: Rational) -> Expr {
        Expr::Num(q)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        Expr::Call(f, args)
    }

    pub fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn pow(self, rhs: Expr) -> Expr {
        Expr::Pow(Box::new(self), Box::new(rhs))
    }

    pub fn sum(index: Var, lo: Expr, hi: Expr, body: Expr) -> Expr {
        Expr::Sum {
            index,
            lo: Box::new(lo),
            hi: Box::new(hi),
            body: Box::new(body),
        }
    }

    /// Free variables; a bounded sum binds its index.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(*v);
                }
            }
            Expr::Neg(a) => a.collect_free(bound, out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_free(bound, out)),
            Expr::Sum {
                index,
                lo,
                hi,
                body,
            } => {
                lo.collect_free(bound, out);
                hi.collect_free(bound, out);
                bound.push(*index);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.free_vars().contains(&v)
    }

    /// Simultaneously replaces free occurrences of variables.
    ///
    /// Replacement expressions must not mention the index of any sum they
    /// are substituted into.
    pub fn substitute(&self, map: &[(Var, Expr)]) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Var(v) => map
                .iter()
                .find(|(w, _)| w == v)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Expr::Neg(a) => Expr::Neg(Box::new(a.substitute(map))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| a.substitute(map)).collect()),
            Expr::Sum {
                index,
                lo,
                hi,
                body,
            } => {
                let inner: Vec<(Var, Expr)> =
                    map.iter().filter(|(w, _)| w != index).cloned().collect();
                Expr::Sum {
                    index: *index,
                    lo: Box::new(lo.substitute(map)),
                    hi: Box::new(hi.substitute(map)),
                    body: Box::new(body.substitute(&inner)),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

/// Values of the scalar variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    slots: [Option<HalfInt>; 8],
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn with(mut self, v: Var, value: HalfInt) -> Self {
        self.set(v, value);
        self
    }

    pub fn with_int(self, v: Var, value: i64) -> Self {
        self.with(v, HalfInt::from_int(value))
    }

    pub fn set(&mut self, v: Var, value: HalfInt) {
        self.slots[v.slot()] = Some(value);
    }

    pub fn get(&self, v: Var) -> Option<&HalfInt> {
        self.slots[v.slot()].as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &HalfInt)> {
        Var::ALL
            .into_iter()
            .filter_map(move |v| self.get(v).map(|x| (v, x)))
    }
}
