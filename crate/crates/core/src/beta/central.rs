//! Linear functionals sending `t^a` and `(1+t)^e` to central-binomial
//! weights, applied termwise to standard-form identities.

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::smart;
use super::ClosedIdentity;
use crate::dsl::{Expr, Func, Linear, Var};
use crate::error::{Error, Result};
use crate::exact::{int, rat};
use crate::model::{AffineForm, Base, ClosedSide, Identity, Side, StdTerm, Summand};

/// Weight of one pure power. `even` restricts it to even exponents.
struct Rule {
    even: bool,
    weight: fn(&Linear) -> Expr,
}

struct Functional {
    t_pow: Rule,
    plus_pow: Rule,
}

fn lx(l: &Linear) -> Expr {
    l.to_expr()
}

fn v() -> Linear {
    Linear::var(Var::V)
}

fn u() -> Linear {
    Linear::var(Var::U)
}

fn half(l: &Linear) -> Linear {
    l.scale(&rat(1, 2))
}

fn binom(a: Linear, b: Linear) -> Expr {
    Expr::call(Func::Binom, vec![lx(&a), lx(&b)])
}

fn rbinom(a: Linear, b: Linear) -> Expr {
    Expr::call(Func::RBinom, vec![lx(&a), lx(&b)])
}

fn power(base: i64, e: &Linear) -> Expr {
    smart::pow(Expr::int(base), lx(e))
}

fn sign(e: &Linear) -> Expr {
    if e.is_constant() {
        let odd = e.constant.to_integer().is_odd();
        return Expr::int(if odd { -1 } else { 1 });
    }
    Expr::call(Func::Sign, vec![lx(e)])
}

/// `binom(2e+v, e+v/2) rbinom(e+v, v/2) / 2^e`
fn lv_plus(e: &Linear) -> Expr {
    let w = smart::mul(
        binom(e.scale(&int(2)).plus(&v()), e.plus(&half(&v()))),
        rbinom(e.plus(&v()), half(&v())),
    );
    smart::div(w, power(2, e))
}

/// `binom(a, a/2) rbinom((a+v)/2, v/2) / 2^a`, for even `a`.
fn lv_t(a: &Linear) -> Expr {
    let w = smart::mul(
        binom(a.clone(), half(a)),
        rbinom(half(&a.plus(&v())), half(&v())),
    );
    smart::div(w, power(2, a))
}

fn lv_dual_t(a: &Linear) -> Expr {
    smart::mul(sign(a), lv_plus(a))
}

/// `binom(v, v/2) binom(2e+u, e+u/2) rbinom(e+(u+v)/2, v/2) / 4^e`
fn m_plus(e: &Linear) -> Expr {
    let uv = half(&u().plus(&v()));
    let w = smart::mul(
        smart::mul(
            binom(v(), half(&v())),
            binom(e.scale(&int(2)).plus(&u()), e.plus(&half(&u()))),
        ),
        rbinom(e.plus(&uv), half(&v())),
    );
    smart::div(w, power(4, e))
}

/// `(-1)^a binom(u, u/2) binom(2a+v, a+v/2) rbinom(a+(u+v)/2, u/2) / 4^a`
fn m_t(a: &Linear) -> Expr {
    let uv = half(&u().plus(&v()));
    let w = smart::mul(
        smart::mul(
            binom(u(), half(&u())),
            binom(a.scale(&int(2)).plus(&v()), a.plus(&half(&v()))),
        ),
        rbinom(a.plus(&uv), half(&u())),
    );
    smart::mul(sign(a), smart::div(w, power(4, a)))
}

const L_V: Functional = Functional {
    t_pow: Rule {
        even: true,
        weight: lv_t,
    },
    plus_pow: Rule {
        even: false,
        weight: lv_plus,
    },
};

const L_V_DUAL: Functional = Functional {
    t_pow: Rule {
        even: false,
        weight: lv_dual_t,
    },
    plus_pow: Rule {
        even: true,
        weight: lv_t,
    },
};

const M_UV: Functional = Functional {
    t_pow: Rule {
        even: false,
        weight: m_t,
    },
    plus_pow: Rule {
        even: false,
        weight: m_plus,
    },
};

/// `⌊x/2⌋` (or `⌈x/2⌉`) of an integer-valued expression.
fn halve(x: &Linear, ceil: bool) -> Expr {
    if x.is_constant() {
        let q = x.constant.to_integer();
        let (d, m) = q.div_mod_floor(&2.into());
        let r = if ceil && m.to_i64() != Some(0) {
            d + 1
        } else {
            d
        };
        return Expr::Num(int(r.to_i64().expect("small bound")));
    }
    // ⌊x/2⌋ = (2x − 1 + (−1)^x)/4 and ⌈x/2⌉ = (2x + 1 − (−1)^x)/4
    let two_x = lx(&x.scale(&int(2)));
    let s = sign(x);
    let top = if ceil {
        smart::sub(smart::add(two_x, Expr::int(1)), s)
    } else {
        smart::add(smart::sub(two_x, Expr::int(1)), s)
    };
    smart::div(top, Expr::int(4))
}

fn bound(e: &Expr) -> Result<Linear> {
    Linear::from_expr(e).ok_or_else(|| Error::Shape(format!("summation bound `{e}` is not affine")))
}

fn apply_rule(term: &StdTerm, exp: &AffineForm, rule: &Rule) -> Result<Summand> {
    if !rule.even {
        return Ok(Summand {
            coeff: smart::mul(term.coeff.clone(), (rule.weight)(&exp.to_linear())),
            lower: term.lower.clone(),
            upper: term.upper.clone(),
        });
    }
    let a = Linear::constant(int(exp.c)).plus(&Linear::var(Var::N).scale(&int(exp.cn)));
    let k2 = Linear::var(Var::K).scale(&int(2));
    let (lo, hi) = (bound(&term.lower)?, bound(&term.upper)?);
    match exp.ck {
        0 => {
            let j2 = Linear::var(Var::J).scale(&int(2));
            let inner = Expr::sum(
                Var::J,
                halve(&a, true),
                halve(&a, false),
                (rule.weight)(&j2),
            );
            Ok(Summand {
                coeff: smart::mul(term.coeff.clone(), inner),
                lower: term.lower.clone(),
                upper: term.upper.clone(),
            })
        }
        1 => {
            let k_new = k2.minus(&a).to_expr();
            Ok(Summand {
                coeff: smart::mul(
                    term.coeff.substitute(&[(Var::K, k_new)]),
                    (rule.weight)(&k2),
                ),
                lower: halve(&lo.plus(&a), true),
                upper: halve(&hi.plus(&a), false),
            })
        }
        -1 => {
            let k_new = a.minus(&k2).to_expr();
            Ok(Summand {
                coeff: smart::mul(
                    term.coeff.substitute(&[(Var::K, k_new)]),
                    (rule.weight)(&k2),
                ),
                lower: halve(&a.minus(&hi), true),
                upper: halve(&a.minus(&lo), false),
            })
        }
        c => Err(Error::Shape(format!(
            "parity restriction needs a unit k-coefficient in the exponent, found {c}"
        ))),
    }
}

fn apply_term(term: &StdTerm, f: &Functional, name: &str) -> Result<Summand> {
    if term.base_exp.is_zero() {
        apply_rule(term, &term.t_exp, &f.t_pow)
    } else if term.base == Base::OneMinusT {
        Err(Error::Shape(format!(
            "`{name}` has a (1-t) factor; apply t -> -t first (--negate-t)"
        )))
    } else if term.t_exp.is_zero() {
        apply_rule(term, &term.base_exp, &f.plus_pow)
    } else {
        Err(Error::Shape(format!(
            "`{name}` has a mixed term t^a (1+t)^b; only pure powers are supported"
        )))
    }
}

fn apply_side(side: &Side, f: &Functional, name: &str) -> Result<ClosedSide> {
    let Side::Standard(terms) = side else {
        return Err(Error::Shape(format!(
            "central transforms need standard-form sides (`{name}`)"
        )));
    };
    let sums = terms
        .iter()
        .map(|t| apply_term(t, f, name))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedSide { sums, extra: None })
}

fn apply(id: &Identity, f: &Functional, tag: &str, what: &str) -> Result<ClosedIdentity> {
    Ok(ClosedIdentity {
        name: format!("{}/{tag}", id.name),
        provenance: vec![
            format!("source: {} ({})", id.name, id.paper_ref),
            what.to_string(),
        ],
        lhs: apply_side(&id.lhs, f, &id.name)?,
        rhs: apply_side(&id.rhs, f, &id.name)?,
    })
}

/// The one-parameter central transform and its reflection `p(t) ↦ p(−1−t)`.
pub fn central_transform_v(id: &Identity) -> Result<(ClosedIdentity, ClosedIdentity)> {
    Ok((
        apply(
            id,
            &L_V,
            "central_v",
            "central_v: (1+t)^e -> binom(2e+v, e+v/2)/(2^e binom(e+v, v/2)), t^a -> even a only",
        )?,
        apply(
            id,
            &L_V_DUAL,
            "central_v_dual",
            "central_v_dual: the central_v weights after t -> -1-t",
        )?,
    ))
}

/// The two-parameter central transform in `u` and `v`.
pub fn central_transform_uv(id: &Identity) -> Result<ClosedIdentity> {
    apply(
        id,
        &M_UV,
        "central_uv",
        "central_uv: (1+t)^e and t^a mapped to products of central binomials in u, v",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::eval_closed_at;
    use crate::exact::{HalfInt, SymConst};
    use crate::model::load_identity;
    use crate::report::Point;

    fn binomial_theorem() -> Identity {
        load_identity(
            r#"{"name": "bt", "paper_ref": "x", "status": "verified", "form": "polynomial",
            "lhs": [{"coeff": "1", "base": "1+t", "base_exp": "n", "lower": "n", "upper": "n"}],
            "rhs": [{"coeff": "binom(n, k)", "t_exp": "k", "lower": 0, "upper": "n"}]}"#,
        )
        .unwrap()
    }

    fn at(n: i64, u: i64, v: i64) -> Point {
        Point::new(n)
            .with(Var::U, HalfInt::from_int(u))
            .with(Var::V, HalfInt::from_int(v))
    }

    #[test]
    fn binomial_theorem_values() {
        let id = binomial_theorem();
        let (lv, dual) = central_transform_v(&id).unwrap();
        let (l, r) = eval_closed_at(&lv, &at(2, 0, 0)).unwrap();
        assert_eq!((l.clone(), r), (SymConst::rational(rat(3, 2)), l));
        let m = central_transform_uv(&id).unwrap();
        let (l, r) = eval_closed_at(&m, &at(2, 0, 0)).unwrap();
        assert_eq!((l.clone(), r), (SymConst::rational(rat(3, 8)), l));
        for n in 0..8 {
            for v in 0..4 {
                let (l, r) = eval_closed_at(&lv, &at(n, 0, v)).unwrap();
                assert_eq!(l, r, "L at n={n} v={v}");
                let (l, r) = eval_closed_at(&dual, &at(n, 0, v)).unwrap();
                assert_eq!(l, r, "L' at n={n} v={v}");
                let (l, r) = eval_closed_at(&m, &at(n, 1, v)).unwrap();
                assert_eq!(l, r, "M at n={n} v={v}");
            }
        }
    }

    #[test]
    fn floor_and_ceiling_forms() {
        use crate::dsl::{eval_scalar, Bindings};
        let x = Linear::var(Var::N).plus(&Linear::constant(int(-3)));
        for n in -4..6i64 {
            let b = Bindings::new().with_int(Var::N, n);
            let f = eval_scalar(&halve(&x, false), &b).unwrap();
            let c = eval_scalar(&halve(&x, true), &b).unwrap();
            assert_eq!(f, SymConst::integer(Integer::div_floor(&(n - 3), &2)));
            assert_eq!(c, SymConst::integer(-(Integer::div_floor(&(3 - n), &2))));
        }
    }

    #[test]
    fn rejects_one_minus_t() {
        let id = load_identity(
            r#"{"name": "x", "paper_ref": "x", "status": "verified", "form": "polynomial",
            "lhs": [{"coeff": "1", "base_exp": "n", "lower": "n", "upper": "n"}],
            "rhs": [{"coeff": "sign(k)*binom(n, k)", "t_exp": "k", "lower": 0, "upper": "n"}]}"#,
        )
        .unwrap();
        let err = central_transform_v(&id).unwrap_err();
        assert!(err.to_string().contains("--negate-t"));
    }
}
