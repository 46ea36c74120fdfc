//! Beta-integral transforms of standard-form identities, symbolic
//! differentiation in `r` or `s`, the central-binomial transforms, and
//! exact evaluation of the resulting t-free identities.

mod central;
mod check;
mod diff;
pub(crate) mod smart;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::dsl::{eval_scalar, Bindings, Expr, Func, Linear, Var};
use crate::error::{Error, Result};
use crate::exact::{HalfInt, SymConst};
use crate::model::{Base, ClosedSide, Identity, Side, StdTerm, Summand};
use crate::poly::int_bound;
use crate::report::{Outcome, Point, PointReport, Value, VerificationReport};

pub use central::{central_transform_uv, central_transform_v};
pub use check::{float_derivative_check, side_derivative_check, DerivativeCheck};
pub use diff::{derivative, differentiate, differentiate_traced, GammaTrace};

/// A t-free identity together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedIdentity {
    pub name: String,
    pub provenance: Vec<String>,
    pub lhs: ClosedSide,
    pub rhs: ClosedSide,
}

impl ClosedIdentity {
    /// Wraps an identity whose sides are already closed.
    pub fn from_identity(id: &Identity) -> Result<Self> {
        match (&id.lhs, &id.rhs) {
            (Side::Closed(l), Side::Closed(r)) => Ok(ClosedIdentity {
                name: id.name.clone(),
                provenance: vec![format!("stated: {}", id.paper_ref)],
                lhs: l.clone(),
                rhs: r.clone(),
            }),
            _ => Err(Error::Shape(format!(
                "`{}` is not a closed identity",
                id.name
            ))),
        }
    }

    /// Parameter variables among r, s, u, v.
    pub fn parameters(&self) -> BTreeSet<Var> {
        let mut out = self.lhs.free_vars();
        out.extend(self.rhs.free_vars());
        out.retain(|v| matches!(v, Var::R | Var::S | Var::U | Var::V));
        out
    }

    pub fn render(&self) -> String {
        format!("{}\n  = {}", render_side(&self.lhs), render_side(&self.rhs))
    }
}

pub fn render_side(side: &ClosedSide) -> String {
    let mut parts: Vec<String> = side
        .sums
        .iter()
        .map(|s| format!("sum(k, {}, {}, {})", s.lower, s.upper, s.coeff))
        .collect();
    if let Some(e) = &side.extra {
        parts.push(e.to_string());
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// `coeff` times the Beta weight of `t^a (1−t)^b`, `rbinom(a+b+r, a+s)/(a+s)`.
fn beta_weighted(term: &StdTerm) -> Expr {
    let a = term.t_exp.to_linear();
    let b = term.base_exp.to_linear();
    let top = a.plus(&b).plus(&Linear::var(Var::R)).to_expr();
    let bottom = a.plus(&Linear::var(Var::S)).to_expr();
    let rb = Expr::call(Func::RBinom, vec![top, bottom.clone()]);
    smart::div(smart::mul(term.coeff.clone(), rb), bottom)
}

fn beta_side(side: &Side, name: &str) -> Result<ClosedSide> {
    let Side::Standard(terms) = side else {
        return Err(Error::Shape(format!(
            "beta transform needs standard-form sides (`{name}`)"
        )));
    };
    let mut sums = Vec::new();
    for t in terms {
        if t.base == Base::OnePlusT && !t.base_exp.is_zero() {
            return Err(Error::Shape(format!(
                "`{name}` has a (1+t) factor; apply t -> -t first (--negate-t)"
            )));
        }
        sums.push(Summand {
            coeff: beta_weighted(t),
            lower: t.lower.clone(),
            upper: t.upper.clone(),
        });
    }
    Ok(ClosedSide { sums, extra: None })
}

/// Integrates both sides against `t^{s−1}(1−t)^{r−s}` over `[0, 1]`.
pub fn beta_transform(id: &Identity) -> Result<ClosedIdentity> {
    Ok(ClosedIdentity {
        name: format!("{}/beta", id.name),
        provenance: vec![
            format!("source: {} ({})", id.name, id.paper_ref),
            "beta: multiply by t^(s-1)(1-t)^r, integrate over [0,1], then r -> r - s".into(),
            "weights carry 1/(a+s); the overall factor s is not applied".into(),
        ],
        lhs: beta_side(&id.lhs, &id.name)?,
        rhs: beta_side(&id.rhs, &id.name)?,
    })
}

/// Exact value of one closed side.
pub fn eval_closed_side(side: &ClosedSide, b: &Bindings) -> Result<SymConst> {
    let mut acc = SymConst::zero();
    for s in &side.sums {
        let (lo, hi) = (int_bound(&s.lower, b)?, int_bound(&s.upper, b)?);
        let mut kb = b.clone();
        for k in lo..=hi {
            kb.set(Var::K, HalfInt::from_int(k));
            acc += &eval_scalar(&s.coeff, &kb).map_err(|e| e.at_k(k))?;
        }
    }
    if let Some(e) = &side.extra {
        acc += &eval_scalar(e, b)?;
    }
    Ok(acc)
}

/// Both sides at a grid point.
pub fn eval_closed_at(cid: &ClosedIdentity, p: &Point) -> Result<(SymConst, SymConst)> {
    let b = p.bindings();
    Ok((
        eval_closed_side(&cid.lhs, &b)?,
        eval_closed_side(&cid.rhs, &b)?,
    ))
}

/// Both sides at `(n, r, s)`. Admissibility is the caller's concern so that
/// limit evaluations outside the admissible set remain possible.
pub fn eval_closed(
    cid: &ClosedIdentity,
    n: i64,
    r: &HalfInt,
    s: &HalfInt,
) -> Result<(SymConst, SymConst)> {
    let p = Point::new(n)
        .with(Var::R, r.clone())
        .with(Var::S, s.clone());
    eval_closed_at(cid, &p)
}

pub fn outcome_at(cid: &ClosedIdentity, p: &Point) -> Outcome {
    match eval_closed_at(cid, p) {
        Ok((l, r)) if l == r => Outcome::Equal(Value::Scalar(l)),
        Ok((l, r)) => Outcome::Unequal {
            lhs: Value::Scalar(l),
            rhs: Value::Scalar(r),
            first_diff: None,
        },
        Err(e) => Outcome::Undefined(e.to_string()),
    }
}

/// Evaluates at every grid point (in parallel); errors become undefined points.
pub fn verify_closed(cid: &ClosedIdentity, points: &[Point]) -> VerificationReport {
    let reports = points
        .par_iter()
        .map(|p| PointReport {
            point: p.clone(),
            outcome: outcome_at(cid, p),
        })
        .collect();
    VerificationReport::new(cid.name.clone(), reports)
}

/// The default parameter values `{1/2, 1, 3/2, 2, 5/2, 3}`.
pub fn default_params() -> Vec<HalfInt> {
    (1..=6).map(HalfInt::from_twice).collect()
}

/// The cartesian grid over `ns` and each parameter the identity uses,
/// filtered by `keep`.
pub fn grid(
    ns: impl IntoIterator<Item = i64>,
    params: &[(Var, Vec<HalfInt>)],
    keep: impl Fn(&Point) -> bool,
) -> Vec<Point> {
    let mut points: Vec<Point> = ns.into_iter().map(Point::new).collect();
    for (v, values) in params {
        points = points
            .into_iter()
            .flat_map(|p| values.iter().map(move |x| p.clone().with(*v, x.clone())))
            .collect();
    }
    points.retain(|p| keep(p));
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::load_identity;

    fn kb() -> Identity {
        load_identity(
            r#"{"name": "kb", "paper_ref": "A", "status": "verified", "form": "polynomial",
            "lhs": [{"coeff": "sign(k-1)*binom(n,k)*H(k)", "t_exp": "k", "lower": 1, "upper": "n"}],
            "rhs": [{"coeff": "-H(n)", "base_exp": "n", "lower": "n", "upper": "n"},
                    {"coeff": "1/k", "base_exp": "n-k", "lower": 1, "upper": "n"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn weights_have_the_expected_shape() {
        let cid = beta_transform(&kb()).unwrap();
        assert_eq!(
            cid.lhs.sums[0].coeff.to_string(),
            "sign(k - 1)*binom(n, k)*H(k)*rbinom(k + r, k + s)/(k + s)"
        );
        assert_eq!(
            cid.rhs.sums[1].coeff.to_string(),
            "1/k*rbinom(n - k + r, s)/s"
        );
    }

    #[test]
    fn transformed_kb_matches_at_a_point() {
        let cid = beta_transform(&kb()).unwrap();
        let one = HalfInt::from_int(1);
        let (l, r) = eval_closed(&cid, 1, &one, &one).unwrap();
        assert_eq!(l, r);
    }
}
