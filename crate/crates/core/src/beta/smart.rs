//! Expression constructors that fold trivial constants.

use num_traits::{One, Zero};

use crate::dsl::Expr;
use crate::exact::Rational;

fn num(e: &Expr) -> Option<&Rational> {
    match e {
        Expr::Num(q) => Some(q),
        _ => None,
    }
}

pub(crate) fn is_zero(e: &Expr) -> bool {
    num(e).is_some_and(Zero::is_zero)
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(q) => Expr::Num(-q),
        Expr::Neg(x) => *x,
        Expr::Sub(x, y) => Expr::Sub(y, x),
        other => other.neg(),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return b;
    }
    if is_zero(&b) {
        return a;
    }
    if let (Some(x), Some(y)) = (num(&a), num(&b)) {
        return Expr::Num(x + y);
    }
    match b {
        Expr::Neg(y) => a.sub(*y),
        Expr::Num(q) if q < Rational::zero() => a.sub(Expr::Num(-q)),
        b => a.add(b),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    if is_zero(&b) {
        return a;
    }
    if is_zero(&a) {
        return neg(b);
    }
    if let (Some(x), Some(y)) = (num(&a), num(&b)) {
        return Expr::Num(x - y);
    }
    match b {
        Expr::Neg(y) => a.add(*y),
        b => a.sub(b),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) || is_zero(&b) {
        return Expr::int(0);
    }
    if num(&a).is_some_and(One::is_one) {
        return b;
    }
    if num(&b).is_some_and(One::is_one) {
        return a;
    }
    if let (Some(x), Some(y)) = (num(&a), num(&b)) {
        return Expr::Num(x * y);
    }
    if num(&a).is_some_and(|q| *q == -Rational::one()) {
        return neg(b);
    }
    if num(&b).is_some_and(|q| *q == -Rational::one()) {
        return neg(a);
    }
    match (a, b) {
        (Expr::Neg(x), b) => neg(mul(*x, b)),
        (a, Expr::Neg(y)) => neg(mul(a, *y)),
        (a, b) => a.mul(b),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if is_zero(&a) {
        return Expr::int(0);
    }
    if num(&b).is_some_and(One::is_one) {
        return a;
    }
    if let (Some(x), Some(y)) = (num(&a), num(&b)) {
        if !y.is_zero() {
            return Expr::Num(x / y);
        }
    }
    match a {
        Expr::Neg(x) => neg(div(*x, b)),
        a => a.div(b),
    }
}

pub(crate) fn pow(a: Expr, e: Expr) -> Expr {
    if is_zero(&e) {
        return Expr::int(1);
    }
    if num(&e).is_some_and(One::is_one) {
        return a;
    }
    a.pow(e)
}
