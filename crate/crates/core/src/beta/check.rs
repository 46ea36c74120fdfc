//! High-precision central-difference check of symbolic derivatives.

use rug::Float;

use super::ClosedIdentity;
use crate::dsl::{eval_float, Expr, FloatBindings, Var};
use crate::error::{Error, Result};
use crate::exact::{float_precision, rational_to_float, HalfInt, Rational};
use crate::model::ClosedSide;
use crate::report::Point;

#[derive(Clone, Debug)]
pub struct DerivativeCheck {
    pub symbolic: Float,
    pub numeric: Float,
    /// Relative deviation; 0 when both values vanish to working precision.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn side_expr(side: &ClosedSide) -> Expr {
    let mut parts: Vec<Expr> = side
        .sums
        .iter()
        .map(|s| Expr::sum(Var::K, s.lower.clone(), s.upper.clone(), s.coeff.clone()))
        .collect();
    parts.extend(side.extra.clone());
    parts
        .into_iter()
        .reduce(Expr::add)
        .unwrap_or_else(|| Expr::int(0))
}

fn bindings(point: &Point, skip: Var) -> FloatBindings {
    let mut b = FloatBindings::new().exact(Var::N, HalfInt::from_int(point.n));
    for (v, x) in &point.params {
        if *v != skip {
            b = b.exact(*v, x.clone());
        }
    }
    b
}

/// Compares `d/dvar side` (given as `dside`) with `(f(θ+h) − f(θ−h))/2h`
/// evaluated at `digits` decimal digits.
pub fn side_derivative_check(
    side: &ClosedSide,
    dside: &ClosedSide,
    var: Var,
    point: &Point,
    digits: u32,
    h: &Rational,
) -> Result<DerivativeCheck> {
    let prec = float_precision(digits);
    let theta = point
        .get(var)
        .ok_or_else(|| Error::UnboundVariable(var.name().into()))?
        .to_rational();
    let theta = rational_to_float(&theta, prec);
    let hf = rational_to_float(h, prec);
    let h = hf.to_f64();
    let f = side_expr(side);
    let at = |x: Float| eval_float(&f, &bindings(point, var).real(var, x), prec);
    let plus = at(Float::with_val(prec, &theta + &hf))?;
    let minus = at(Float::with_val(prec, &theta - &hf))?;
    let numeric = Float::with_val(prec, &plus - &minus) / Float::with_val(prec, &hf * 2u32);
    let symbolic = eval_float(&side_expr(dside), &bindings(point, Var::T), prec)?;

    let floor = 10f64.powi(4 - digits as i32);
    let scale = symbolic.to_f64().abs().max(numeric.to_f64().abs());
    let deviation = if scale <= floor {
        0.0
    } else {
        Float::with_val(prec, &symbolic - &numeric).to_f64().abs() / scale
    };
    let tolerance = (10.0 * h * h).max(floor);
    Ok(DerivativeCheck {
        pass: deviation <= tolerance,
        symbolic,
        numeric,
        deviation,
        tolerance,
    })
}

/// Runs [`side_derivative_check`] on both sides of `cid` against `dcid`.
pub fn float_derivative_check(
    cid: &ClosedIdentity,
    dcid: &ClosedIdentity,
    var: Var,
    point: &Point,
    digits: u32,
    h: &Rational,
) -> Result<[DerivativeCheck; 2]> {
    Ok([
        side_derivative_check(&cid.lhs, &dcid.lhs, var, point, digits, h)?,
        side_derivative_check(&cid.rhs, &dcid.rhs, var, point, digits, h)?,
    ])
}
