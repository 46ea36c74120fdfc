//! Identities and their on-disk documents.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::dsl::{parse, parse_poly, Bindings, Expr, Func, Linear, Var};
use crate::error::{Error, Result};
use crate::exact::{int, HalfInt};

/// `ck·k + cn·n + c` with integer coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub ck: i64,
    pub cn: i64,
    pub c: i64,
}

impl AffineForm {
    pub const ZERO: AffineForm = AffineForm { ck: 0, cn: 0, c: 0 };
    pub const K: AffineForm = AffineForm { ck: 1, cn: 0, c: 0 };

    pub fn new(ck: i64, cn: i64, c: i64) -> Self {
        AffineForm { ck, cn, c }
    }

    pub fn eval(&self, k: i64, n: i64) -> i64 {
        self.ck * k + self.cn * n + self.c
    }

    pub fn is_zero(&self) -> bool {
        *self == AffineForm::ZERO
    }

    pub fn to_linear(&self) -> Linear {
        Linear::constant(int(self.c))
            .plus(&Linear::var(Var::N).scale(&int(self.cn)))
            .plus(&Linear::var(Var::K).scale(&int(self.ck)))
    }

    pub fn to_expr(&self) -> Expr {
        self.to_linear().to_expr()
    }

    /// Reads an affine form from text such as `n - k`; anything that is not
    /// an integer combination of `k` and `n` is a format error.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || {
            Error::Format(format!(
                "exponent `{text}` is not an integer affine form in k, n"
            ))
        };
        let e = parse(text)?;
        let lin = Linear::from_expr(&e).ok_or_else(bad)?;
        if lin.terms.keys().any(|v| !matches!(v, Var::K | Var::N)) {
            return Err(bad());
        }
        let as_int = |q: num_rational::BigRational| {
            if q.is_integer() {
                q.to_integer().to_i64()
            } else {
                None
            }
        };
        Ok(AffineForm {
            ck: as_int(lin.coefficient(Var::K)).ok_or_else(bad)?,
            cn: as_int(lin.coefficient(Var::N)).ok_or_else(bad)?,
            c: as_int(lin.constant.clone()).ok_or_else(bad)?,
        })
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Base {
    OneMinusT,
    OnePlusT,
}

impl Base {
    pub fn flip(self) -> Base {
        match self {
            Base::OneMinusT => Base::OnePlusT,
            Base::OnePlusT => Base::OneMinusT,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Base::OneMinusT => "1-t",
            Base::OnePlusT => "1+t",
        }
    }
}

/// One summand `coeff(k, n) · t^a · (1±t)^b` for `k = lower..=upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StdTerm {
    pub coeff: Expr,
    pub t_exp: AffineForm,
    pub base: Base,
    pub base_exp: AffineForm,
    pub lower: Expr,
    pub upper: Expr,
}

/// A sum `Σ_{k=lower}^{upper} coeff` on a closed side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub coeff: Expr,
    pub lower: Expr,
    pub upper: Expr,
}

/// A t-free side: bounded sums over `k` plus an optional standalone term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedSide {
    pub sums: Vec<Summand>,
    pub extra: Option<Expr>,
}

impl ClosedSide {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for s in &self.sums {
            let mut c = s.coeff.free_vars();
            c.remove(&Var::K);
            out.extend(c);
            out.extend(s.lower.free_vars());
            out.extend(s.upper.free_vars());
        }
        if let Some(e) = &self.extra {
            out.extend(e.free_vars());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Side {
    Standard(Vec<StdTerm>),
    GeneralPoly(Expr),
    Closed(ClosedSide),
}

impl Side {
    pub fn is_closed(&self) -> bool {
        matches!(self, Side::Closed(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Check,
    Disputed,
    ErratumClaimed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Check => "check",
            Status::Disputed => "disputed",
            Status::ErratumClaimed => "erratum_claimed",
        }
    }
}

impl FromStr for Status {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Format(format!("unknown status `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Polynomial,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Ge,
    Gt,
    Le,
    Lt,
    Ne,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Lt => "<",
            CmpOp::Ne => "!=",
        }
    }
}

/// A restriction on the parameters at which an identity is claimed.
/// Constraints on unbound variables hold vacuously.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// `admissible(r,s)`
    Admissible,
    /// `integer(x)`
    Integer(Var),
    /// `x >= c` and friends
    Cmp(Var, CmpOp, HalfInt),
}

impl Constraint {
    pub fn holds(&self, b: &Bindings) -> bool {
        match self {
            Constraint::Admissible => admissible_partial(b.get(Var::R), b.get(Var::S)),
            Constraint::Integer(v) => b.get(*v).is_none_or(HalfInt::is_integer),
            Constraint::Cmp(v, op, c) => b.get(*v).is_none_or(|x| match op {
                CmpOp::Ge => x >= c,
                CmpOp::Gt => x > c,
                CmpOp::Le => x <= c,
                CmpOp::Lt => x < c,
                CmpOp::Ne => x != c,
            }),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Admissible => f.write_str("admissible(r,s)"),
            Constraint::Integer(v) => write!(f, "integer({v})"),
            Constraint::Cmp(v, op, c) => write!(f, "{v} {} {c}", op.as_str()),
        }
    }
}

impl FromStr for Constraint {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::Format(format!("unrecognised constraint `{text}`"));
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "admissible(r,s)" {
            return Ok(Constraint::Admissible);
        }
        if let Some(inner) = t.strip_prefix("integer(").and_then(|x| x.strip_suffix(')')) {
            return Var::from_name(inner)
                .map(Constraint::Integer)
                .ok_or_else(bad);
        }
        for (sym, op) in [
            (">=", CmpOp::Ge),
            ("<=", CmpOp::Le),
            ("!=", CmpOp::Ne),
            (">", CmpOp::Gt),
            ("<", CmpOp::Lt),
        ] {
            if let Some((lhs, rhs)) = t.split_once(sym) {
                let v = Var::from_name(lhs).ok_or_else(bad)?;
                let c: HalfInt = rhs.parse().map_err(|_| bad())?;
                return Ok(Constraint::Cmp(v, op, c));
            }
        }
        Err(bad())
    }
}

fn admissible_partial(r: Option<&HalfInt>, s: Option<&HalfInt>) -> bool {
    if r.is_some_and(HalfInt::is_negative_integer) {
        return false;
    }
    if s.is_some_and(|s| s.is_negative_integer() || s.is_zero()) {
        return false;
    }
    match (r, s) {
        (Some(r), Some(s)) => !(r - s).is_negative_integer(),
        _ => true,
    }
}

/// `r, s ∉ ℤ⁻`, `s ≠ 0` and `r − s ∉ ℤ⁻`.
pub fn admissible(r: &HalfInt, s: &HalfInt) -> bool {
    admissible_partial(Some(r), Some(s))
}

/// A two-sided equation with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub name: String,
    pub paper_ref: String,
    pub status: Status,
    pub lhs: Side,
    pub rhs: Side,
    pub params: Vec<Constraint>,
    pub notes: String,
}

impl Identity {
    pub fn form(&self) -> Form {
        if self.lhs.is_closed() {
            Form::Closed
        } else {
            Form::Polynomial
        }
    }

    /// Parameter variables (r, s, u, v) the identity depends on.
    pub fn parameters(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for side in [&self.lhs, &self.rhs] {
            if let Side::Closed(c) = side {
                out.extend(c.free_vars());
            }
        }
        out.retain(|v| matches!(v, Var::R | Var::S | Var::U | Var::V));
        out
    }

    pub fn constraints_hold(&self, b: &Bindings) -> bool {
        self.params.iter().all(|c| c.holds(b))
    }

    fn validate(&self) -> Result<()> {
        if self.lhs.is_closed() != self.rhs.is_closed() {
            return Err(Error::Shape(format!(
                "`{}` mixes a closed side with a t-bearing side",
                self.name
            )));
        }
        for side in [&self.lhs, &self.rhs] {
            match side {
                Side::Standard(terms) => {
                    for t in terms {
                        only(&t.coeff, &[Var::K, Var::N], "standard-term coefficient")?;
                        only(&t.lower, &[Var::N], "summation bound")?;
                        only(&t.upper, &[Var::N], "summation bound")?;
                    }
                }
                Side::GeneralPoly(e) => only(e, &[Var::N, Var::T], "polynomial side")?,
                Side::Closed(c) => {
                    let params = [Var::N, Var::R, Var::S, Var::U, Var::V];
                    for s in &c.sums {
                        let mut with_k = params.to_vec();
                        with_k.push(Var::K);
                        only(&s.coeff, &with_k, "closed summand")?;
                        only(&s.lower, &params, "summation bound")?;
                        only(&s.upper, &params, "summation bound")?;
                    }
                    if let Some(e) = &c.extra {
                        only(e, &params, "closed standalone term")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn only(e: &Expr, allowed: &[Var], what: &str) -> Result<()> {
    match e.free_vars().into_iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(Error::Format(format!("{what} `{e}` mentions `{v}`"))),
        None => Ok(()),
    }
}

/// The same identity after `t ↦ −t`: every base flips and each coefficient
/// picks up `(−1)^{t_exp}`. Applying it twice gives back the original.
pub fn substitute_neg_t(id: &Identity) -> Result<Identity> {
    let flip = |side: &Side| -> Result<Side> {
        let Side::Standard(terms) = side else {
            return Err(Error::Shape(format!(
                "t -> -t needs standard-form sides in `{}`",
                id.name
            )));
        };
        Ok(Side::Standard(
            terms
                .iter()
                .map(|t| StdTerm {
                    coeff: toggle_sign(&t.coeff, &t.t_exp),
                    base: t.base.flip(),
                    ..t.clone()
                })
                .collect(),
        ))
    };
    Ok(Identity {
        lhs: flip(&id.lhs)?,
        rhs: flip(&id.rhs)?,
        ..id.clone()
    })
}

fn toggle_sign(coeff: &Expr, t_exp: &AffineForm) -> Expr {
    if t_exp.is_zero() {
        return coeff.clone();
    }
    let factor = Expr::call(Func::Sign, vec![t_exp.to_expr()]);
    if let Expr::Mul(a, b) = coeff {
        if **a == factor {
            return (**b).clone();
        }
    }
    factor.mul(coeff.clone())
}

// ---- documents ----

#[derive(Debug, Serialize, Deserialize)]
struct Doc {
    name: String,
    paper_ref: String,
    status: Status,
    form: Form,
    lhs: SideDoc,
    rhs: SideDoc,
    #[serde(default)]
    params: Vec<String>,
    #[serde(default)]
    notes: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SideDoc {
    Poly(String),
    Standard(Vec<TermDoc>),
    Closed(ClosedDoc),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    coeff: Text,
    #[serde(default)]
    t_exp: AffineDoc,
    #[serde(default = "default_base")]
    base: String,
    #[serde(default)]
    base_exp: AffineDoc,
    lower: Text,
    upper: Text,
}

fn default_base() -> String {
    "1-t".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum AffineDoc {
    Coeffs([i64; 3]),
    Int(i64),
    Text(String),
}

impl Default for AffineDoc {
    fn default() -> Self {
        AffineDoc::Coeffs([0, 0, 0])
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Text {
    Str(String),
    Int(i64),
}

impl Text {
    fn expr(&self) -> Result<Expr> {
        match self {
            Text::Str(s) => parse(s),
            Text::Int(i) => Ok(Expr::int(*i)),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClosedDoc {
    #[serde(default)]
    sums: Vec<SummandDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extra: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummandDoc {
    coeff: Text,
    lower: Text,
    upper: Text,
}

fn affine_from_doc(d: &AffineDoc) -> Result<AffineForm> {
    match d {
        AffineDoc::Coeffs([ck, cn, c]) => Ok(AffineForm::new(*ck, *cn, *c)),
        AffineDoc::Int(c) => Ok(AffineForm::new(0, 0, *c)),
        AffineDoc::Text(s) => AffineForm::parse(s).map_err(|e| match e {
            Error::Syntax { .. } => Error::Format(format!("malformed exponent `{s}`")),
            other => other,
        }),
    }
}

fn side_from_doc(d: &SideDoc) -> Result<Side> {
    Ok(match d {
        SideDoc::Poly(s) => Side::GeneralPoly(parse_poly(s)?),
        SideDoc::Standard(terms) => Side::Standard(
            terms
                .iter()
                .map(|t| {
                    let base = match t.base.replace(' ', "").as_str() {
                        "1-t" => Base::OneMinusT,
                        "1+t" => Base::OnePlusT,
                        other => return Err(Error::Format(format!("unknown base `{other}`"))),
                    };
                    Ok(StdTerm {
                        coeff: t.coeff.expr()?,
                        t_exp: affine_from_doc(&t.t_exp)?,
                        base,
                        base_exp: affine_from_doc(&t.base_exp)?,
                        lower: t.lower.expr()?,
                        upper: t.upper.expr()?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        SideDoc::Closed(c) => Side::Closed(ClosedSide {
            sums: c
                .sums
                .iter()
                .map(|s| {
                    Ok(Summand {
                        coeff: s.coeff.expr()?,
                        lower: s.lower.expr()?,
                        upper: s.upper.expr()?,
                    })
                })
                .collect::<Result<_>>()?,
            extra: c.extra.as_deref().map(parse).transpose()?,
        }),
    })
}

fn side_to_doc(s: &Side) -> SideDoc {
    let text = |e: &Expr| Text::Str(e.to_string());
    let aff = |a: &AffineForm| AffineDoc::Coeffs([a.ck, a.cn, a.c]);
    match s {
        Side::GeneralPoly(e) => SideDoc::Poly(e.to_string()),
        Side::Standard(terms) => SideDoc::Standard(
            terms
                .iter()
                .map(|t| TermDoc {
                    coeff: text(&t.coeff),
                    t_exp: aff(&t.t_exp),
                    base: t.base.as_str().into(),
                    base_exp: aff(&t.base_exp),
                    lower: text(&t.lower),
                    upper: text(&t.upper),
                })
                .collect(),
        ),
        Side::Closed(c) => SideDoc::Closed(ClosedDoc {
            sums: c
                .sums
                .iter()
                .map(|s| SummandDoc {
                    coeff: text(&s.coeff),
                    lower: text(&s.lower),
                    upper: text(&s.upper),
                })
                .collect(),
            extra: c.extra.as_ref().map(|e| e.to_string()),
        }),
    }
}

/// Parses and validates an identity document.
pub fn load_identity(document: &str) -> Result<Identity> {
    let doc: Doc = serde_json::from_str(document)
        .map_err(|e| Error::Format(format!("identity document: {e}")))?;
    let id = Identity {
        name: doc.name,
        paper_ref: doc.paper_ref,
        status: doc.status,
        lhs: side_from_doc(&doc.lhs)?,
        rhs: side_from_doc(&doc.rhs)?,
        params: doc
            .params
            .iter()
            .map(|p| p.parse())
            .collect::<Result<_>>()?,
        notes: doc.notes,
    };
    id.validate()?;
    if id.form() != doc.form {
        return Err(Error::Shape(format!(
            "`{}` declares form {:?} but its sides are {:?}",
            id.name,
            doc.form,
            id.form()
        )));
    }
    Ok(id)
}

pub fn load_identity_file(path: &Path) -> Result<Identity> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_identity(&text).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Canonical serialization; `load_identity(&save_identity(id)) == id`.
pub fn save_identity(id: &Identity) -> String {
    let doc = Doc {
        name: id.name.clone(),
        paper_ref: id.paper_ref.clone(),
        status: id.status,
        form: id.form(),
        lhs: side_to_doc(&id.lhs),
        rhs: side_to_doc(&id.rhs),
        params: id.params.iter().map(|c| c.to_string()).collect(),
        notes: id.notes.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("documents serialize")
}
