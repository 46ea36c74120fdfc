//! Verification outcomes per grid point and their aggregate.

use serde_json::{json, Value as Json};

use crate::dsl::{Bindings, Var};
use crate::exact::{HalfInt, SymConst};
use crate::poly::DensePoly;

/// A grid point: `n` plus whatever parameters the identity uses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub n: i64,
    pub params: Vec<(Var, HalfInt)>,
}

impl Point {
    pub fn new(n: i64) -> Self {
        Point {
            n,
            params: Vec::new(),
        }
    }

    pub fn with(mut self, v: Var, x: HalfInt) -> Self {
        self.params.retain(|(w, _)| *w != v);
        self.params.push((v, x));
        self.params.sort();
        self
    }

    pub fn get(&self, v: Var) -> Option<&HalfInt> {
        self.params.iter().find(|(w, _)| *w == v).map(|(_, x)| x)
    }

    pub fn bindings(&self) -> Bindings {
        let mut b = Bindings::new().with_int(Var::N, self.n);
        for (v, x) in &self.params {
            b.set(*v, x.clone());
        }
        b
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n = {}", self.n)?;
        for (v, x) in &self.params {
            write!(f, ", {v} = {x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(SymConst),
    Poly(DensePoly),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Scalar(c) => write!(f, "{c}"),
            Value::Poly(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Equal(Value),
    Unequal {
        lhs: Value,
        rhs: Value,
        /// Lowest power of `t` whose coefficients differ.
        first_diff: Option<usize>,
    },
    /// A pole, division by zero or similar made a side meaningless here.
    Undefined(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    pub point: Point,
    pub outcome: Outcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equal,
    Unequal,
    /// No point could be evaluated.
    Undefined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::Unequal => "unequal",
            Verdict::Undefined => "undefined",
        }
    }
}

/// All point outcomes of one identity, ordered by `(n, r, s, …)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub name: String,
    pub points: Vec<PointReport>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>, mut points: Vec<PointReport>) -> Self {
        points.sort_by(|a, b| a.point.cmp(&b.point));
        VerificationReport {
            name: name.into(),
            points,
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.count_unequal() > 0 {
            Verdict::Unequal
        } else if self.count_equal() > 0 {
            Verdict::Equal
        } else {
            Verdict::Undefined
        }
    }

    pub fn count_equal(&self) -> usize {
        self.points
            .iter()
            .filter(|p| matches!(p.outcome, Outcome::Equal(_)))
            .count()
    }

    pub fn count_unequal(&self) -> usize {
        self.points
            .iter()
            .filter(|p| matches!(p.outcome, Outcome::Unequal { .. }))
            .count()
    }

    pub fn count_undefined(&self) -> usize {
        self.points
            .iter()
            .filter(|p| matches!(p.outcome, Outcome::Undefined(_)))
            .count()
    }

    pub fn first_unequal(&self) -> Option<&PointReport> {
        self.points
            .iter()
            .find(|p| matches!(p.outcome, Outcome::Unequal { .. }))
    }

    pub fn at(&self, point: &Point) -> Option<&Outcome> {
        self.points
            .iter()
            .find(|p| &p.point == point)
            .map(|p| &p.outcome)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "name": self.name,
            "verdict": self.verdict().as_str(),
            "equal": self.count_equal(),
            "unequal": self.count_unequal(),
            "undefined": self.count_undefined(),
            "points": self.points.iter().map(point_json).collect::<Vec<_>>(),
        })
    }
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Scalar(c) => Json::String(c.to_string()),
        Value::Poly(p) => Json::Array(
            p.coefficients()
                .iter()
                .map(|c| Json::String(c.to_string()))
                .collect(),
        ),
    }
}

fn point_json(p: &PointReport) -> Json {
    let mut obj = serde_json::Map::new();
    obj.insert("n".into(), json!(p.point.n));
    for (v, x) in &p.point.params {
        obj.insert(v.name().into(), Json::String(x.to_string()));
    }
    match &p.outcome {
        Outcome::Equal(v) => {
            obj.insert("outcome".into(), json!("equal"));
            obj.insert("value".into(), value_json(v));
        }
        Outcome::Unequal {
            lhs,
            rhs,
            first_diff,
        } => {
            obj.insert("outcome".into(), json!("unequal"));
            obj.insert("lhs".into(), value_json(lhs));
            obj.insert("rhs".into(), value_json(rhs));
            if let Some(d) = first_diff {
                obj.insert("first_differing_power".into(), json!(d));
            }
        }
        Outcome::Undefined(why) => {
            obj.insert("outcome".into(), json!("undefined"));
            obj.insert("reason".into(), json!(why));
        }
    }
    Json::Object(obj)
}
