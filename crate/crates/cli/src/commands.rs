use std::path::{Path, PathBuf};

use polysum::beta::{default_params, grid, DerivativeCheck, GammaTrace};
use polysum::corpus::{self, CorpusEntry, EntryResult, Expected, Filter, GridSpec};
use polysum::dsl::{self, Bindings, Var};
use polysum::model::{load_identity_file, substitute_neg_t, Constraint};
use polysum::report::{Outcome, PointReport, Value};
use polysum::{
    beta_transform, central_transform_uv, central_transform_v, differentiate_traced, verify_closed,
    ClosedIdentity, Error, HalfInt, Rational, Status,
};
use serde_json::{json, Value as Json};

use crate::{Format, GridArgs, Op};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Exit = Result<u8, Failure>;

const MISMATCH: u8 = 1;
const USAGE: u8 = 2;
const LOAD: u8 = 3;
const SHAPE: u8 = 4;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn usage(e: Error) -> Failure {
    fail(USAGE, e.to_string())
}

fn load(e: Error) -> Failure {
    fail(LOAD, e.to_string())
}

fn shape_or_usage(e: Error) -> Failure {
    match e {
        Error::Shape(_) => fail(SHAPE, e.to_string()),
        other => usage(other),
    }
}

type Rule<'a> = (&'static str, &'a Option<String>, fn(&HalfInt) -> bool);

/// Rejects grid values no admissible point can use.
fn validate(grid: &GridArgs) -> Result<GridSpec, Failure> {
    let checks: [Rule; 4] = [
        ("r", &grid.r, |x| !x.is_negative_integer()),
        ("s", &grid.s, |x| !x.is_negative_integer() && !x.is_zero()),
        ("u", &grid.u, HalfInt::is_nonneg_integer),
        ("v", &grid.v, HalfInt::is_nonneg_integer),
    ];
    for (name, text, ok) in checks {
        let Some(text) = text else { continue };
        for x in corpus::parse_grid(text).map_err(usage)? {
            if !ok(&x) {
                return Err(fail(USAGE, format!("inadmissible parameter {name} = {x}")));
            }
        }
    }
    if let Some(n) = &grid.n {
        corpus::parse_n_range(n).map_err(usage)?;
    }
    Ok(GridSpec {
        n: grid.n.clone(),
        r: grid.r.clone(),
        s: grid.s.clone(),
        u: grid.u.clone(),
        v: grid.v.clone(),
    })
}

fn entry_for(path: &Path, spec: &GridSpec) -> Result<CorpusEntry, Failure> {
    let identity = load_identity_file(path).map_err(load)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let known = if dir.join(corpus::MANIFEST).is_file() {
        corpus::entry_for_file(dir, path).map_err(load)?
    } else {
        None
    };
    match known {
        Some(e) => e.regrid(spec).map_err(usage),
        None => {
            CorpusEntry::new(path.to_path_buf(), identity, Expected::Equal, spec).map_err(usage)
        }
    }
}

pub fn verify(paths: &[PathBuf], grid: &GridArgs, format: Format) -> Exit {
    let spec = validate(grid)?;
    let entries = paths
        .iter()
        .map(|p| entry_for(p, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    let mut all_met = true;
    for e in &entries {
        let r = corpus::run_entry(e);
        all_met &= r.met;
        match format {
            Format::Json => println!("{}", entry_json(&r)),
            Format::Text => {
                println!("{} ({})", r.name, r.status.as_str());
                for p in &r.report.points {
                    println!("  {}", point_line(p));
                }
                println!("{}: {} [{}]", r.name, r.detail, met_word(r.met));
            }
        }
    }
    Ok(if all_met { 0 } else { MISMATCH })
}

fn met_word(met: bool) -> &'static str {
    if met {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Scalar(c) => c.to_string(),
        Value::Poly(p) => match p.degree() {
            Some(d) => format!("polynomial of degree {d}"),
            None => "0".into(),
        },
    }
}

fn point_line(p: &PointReport) -> String {
    match &p.outcome {
        Outcome::Equal(v) => format!("{}: equal  {}", p.point, value_text(v)),
        Outcome::Unequal {
            lhs,
            rhs,
            first_diff,
        } => match (lhs, rhs) {
            (Value::Scalar(l), Value::Scalar(r)) => {
                format!("{}: unequal  lhs = {l}  rhs = {r}", p.point)
            }
            _ => format!(
                "{}: unequal  first differing power t^{}",
                p.point,
                first_diff.unwrap_or(0)
            ),
        },
        Outcome::Undefined(why) => format!("{}: undefined  {why}", p.point),
    }
}

fn expected_json(e: &Expected) -> Json {
    match e {
        Expected::Equal => json!("equal"),
        Expected::Recorded => json!("recorded"),
        Expected::Unequal { point, lhs, rhs } => {
            let mut at = serde_json::Map::new();
            at.insert("n".into(), json!(point.n.to_string()));
            for (v, x) in &point.params {
                at.insert(v.name().into(), json!(x.to_string()));
            }
            json!({"unequal": {"at": at, "lhs": lhs.to_string(), "rhs": rhs.to_string()}})
        }
    }
}

fn entry_json(r: &EntryResult) -> Json {
    json!({
        "name": r.name,
        "status": r.status.as_str(),
        "expected": expected_json(&r.expected),
        "met": r.met,
        "detail": r.detail,
        "report": r.report.to_json(),
    })
}

pub fn corpus_run(
    dir: Option<PathBuf>,
    name: Option<String>,
    status: Option<String>,
    format: Format,
) -> Exit {
    let dir = dir.unwrap_or_else(corpus::default_dir);
    let status = status
        .map(|s| s.parse::<Status>())
        .transpose()
        .map_err(usage)?;
    let results = corpus::run_corpus(&dir, &Filter { name, status }).map_err(load)?;
    let met = results.iter().filter(|r| r.met).count();
    for r in &results {
        match format {
            Format::Json => println!("{}", entry_json(r)),
            Format::Text => println!(
                "{:<8} {:<44} {:<15} {:<9} {}",
                met_word(r.met),
                r.name,
                r.status.as_str(),
                r.verdict().as_str(),
                r.detail
            ),
        }
    }
    if format == Format::Text {
        println!(
            "{} entries: {met} met, {} mismatched",
            results.len(),
            results.len() - met
        );
    }
    Ok(if met == results.len() { 0 } else { MISMATCH })
}

pub fn corpus_coverage(dir: Option<PathBuf>) -> Exit {
    let dir = dir.unwrap_or_else(corpus::default_dir);
    let report = corpus::check_coverage(&dir).map_err(load)?;
    for (display, entry) in &report.missing {
        println!("missing: {display} -> {entry}");
    }
    for name in &report.unreferenced {
        println!("unreferenced entry: {name}");
    }
    println!(
        "{} displays, {} out of scope, {} missing: {}",
        report.rows,
        report.out_of_scope,
        report.missing.len(),
        if report.passes() { "pass" } else { "FAIL" }
    );
    Ok(if report.passes() { 0 } else { MISMATCH })
}

/// One derivative step, kept for the float cross-check.
struct Step {
    before: ClosedIdentity,
    after: ClosedIdentity,
    var: Var,
    traces: Vec<GammaTrace>,
}

pub fn transform(
    path: &Path,
    ops: &[Op],
    check: bool,
    negate_t: bool,
    precision: u32,
    grid_args: &GridArgs,
    format: Format,
) -> Exit {
    let spec = validate(grid_args)?;
    let mut id = load_identity_file(path).map_err(load)?;
    if negate_t {
        id = substitute_neg_t(&id).map_err(shape_or_usage)?;
    }
    let constraints = id.params.clone();
    let mut current: Option<Vec<ClosedIdentity>> = None;
    let mut steps = Vec::new();
    for op in ops {
        current = Some(match (op, current.take()) {
            (Op::Beta, None) => vec![beta_transform(&id).map_err(shape_or_usage)?],
            (Op::CentralV, None) => {
                let (a, b) = central_transform_v(&id).map_err(shape_or_usage)?;
                vec![a, b]
            }
            (Op::CentralUv, None) => vec![central_transform_uv(&id).map_err(shape_or_usage)?],
            (Op::Dds | Op::Ddr, prev) => {
                let var = if *op == Op::Dds { Var::S } else { Var::R };
                let prev = match prev {
                    Some(p) => p,
                    None => vec![ClosedIdentity::from_identity(&id).map_err(|_| {
                        fail(
                            SHAPE,
                            "differentiation needs a closed identity; apply beta first",
                        )
                    })?],
                };
                let mut next = Vec::new();
                for cid in prev {
                    let (after, traces) =
                        differentiate_traced(&cid, var).map_err(shape_or_usage)?;
                    next.push(after.clone());
                    steps.push(Step {
                        before: cid,
                        after,
                        var,
                        traces,
                    });
                }
                next
            }
            (op, Some(_)) => {
                return Err(fail(
                    SHAPE,
                    format!("{op:?} applies to a t-bearing identity and must come first"),
                ))
            }
        });
    }
    let results = current.unwrap_or_default();
    let mut ok = true;
    for cid in &results {
        let mut doc = json!({
            "name": cid.name,
            "provenance": cid.provenance,
            "lhs": polysum::beta::render_side(&cid.lhs),
            "rhs": polysum::beta::render_side(&cid.rhs),
        });
        if format == Format::Text {
            println!("{}", cid.name);
            for line in &cid.provenance {
                println!("  # {line}");
            }
            println!("  {}", cid.render());
        }
        for step in steps.iter().filter(|s| s.after.name == cid.name) {
            let traces: Vec<Json> = step
                .traces
                .iter()
                .map(|t| {
                    json!({"factor": t.factor,
                           "coefficients": t.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>()})
                })
                .collect();
            if format == Format::Text {
                for t in &step.traces {
                    let cs: Vec<String> = t.coefficients.iter().map(|c| c.to_string()).collect();
                    println!("  # gamma trace of {}: [{}]", t.factor, cs.join(", "));
                }
            }
            doc["gamma_traces"] = Json::Array(traces);
        }
        if check {
            let (line, json_check, passed) = check_closed(cid, &constraints, &spec)?;
            ok &= passed;
            doc["check"] = json_check;
            if format == Format::Text {
                println!("  check: {line}");
            }
            for step in steps.iter().filter(|s| s.after.name == cid.name) {
                let (line, json_float, passed) = float_check(step, precision);
                ok &= passed;
                doc["derivative_check"] = json_float;
                if format == Format::Text {
                    println!("  derivative check: {line}");
                }
            }
        }
        if format == Format::Json {
            println!("{doc}");
        }
    }
    Ok(if ok { 0 } else { MISMATCH })
}

fn param_values(v: Var, spec: &GridSpec) -> Result<Vec<HalfInt>, Failure> {
    let text = match v {
        Var::R => &spec.r,
        Var::S => &spec.s,
        Var::U => &spec.u,
        _ => &spec.v,
    };
    match text {
        Some(t) => corpus::parse_grid(t).map_err(usage),
        None if matches!(v, Var::U | Var::V) => Ok((0..=3).map(HalfInt::from_int).collect()),
        None => Ok(default_params()),
    }
}

fn check_closed(
    cid: &ClosedIdentity,
    constraints: &[Constraint],
    spec: &GridSpec,
) -> Result<(String, Json, bool), Failure> {
    let ns = match &spec.n {
        Some(t) => corpus::parse_n_range(t).map_err(usage)?,
        None => (0..=12).collect(),
    };
    let params = cid
        .parameters()
        .into_iter()
        .map(|v| Ok((v, param_values(v, spec)?)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let points = grid(ns, &params, |p| {
        let b = p.bindings();
        Constraint::Admissible.holds(&b) && constraints.iter().all(|c| c.holds(&b))
    });
    let report = verify_closed(cid, &points);
    let total = report.points.len();
    let passed = total > 0 && report.count_equal() == total;
    let line = match report.first_unequal() {
        Some(p) => format!("unequal, first at {}", point_line(p)),
        None if passed => format!("all equal at {total} points"),
        None => format!("{} of {total} points undefined", report.count_undefined()),
    };
    Ok((line, report.to_json(), passed))
}

fn float_check(step: &Step, digits: u32) -> (String, Json, bool) {
    let mut point = polysum::report::Point::new(3);
    for v in step.before.parameters() {
        let x = match v {
            Var::R => HalfInt::from_twice(5),
            Var::S => HalfInt::from_twice(3),
            _ => HalfInt::from_int(1),
        };
        point = point.with(v, x);
    }
    let h = Rational::new(1.into(), 1_000_000.into());
    match polysum::beta::float_derivative_check(
        &step.before,
        &step.after,
        step.var,
        &point,
        digits,
        &h,
    ) {
        Ok(sides) => {
            let passed = sides.iter().all(|c| c.pass);
            let describe = |c: &DerivativeCheck| {
                format!(
                    "deviation {:.3e} (tolerance {:.1e})",
                    c.deviation, c.tolerance
                )
            };
            let line = format!(
                "at {point}: lhs {}, rhs {}: {}",
                describe(&sides[0]),
                describe(&sides[1]),
                if passed { "pass" } else { "FAIL" }
            );
            let j = json!({
                "point": point.to_string(),
                "deviations": [sides[0].deviation, sides[1].deviation],
                "pass": passed,
            });
            (line, j, passed)
        }
        Err(e) => (
            format!("at {point}: {e}"),
            json!({"error": e.to_string()}),
            false,
        ),
    }
}

pub fn eval(
    expr: &str,
    n: Option<i64>,
    k: Option<i64>,
    params: [Option<String>; 4],
    precision: Option<u32>,
    format: Format,
) -> Exit {
    let e = dsl::parse(expr).map_err(usage)?;
    let mut b = Bindings::new();
    if let Some(n) = n {
        b.set(Var::N, HalfInt::from_int(n));
    }
    if let Some(k) = k {
        b.set(Var::K, HalfInt::from_int(k));
    }
    for (v, text) in [Var::R, Var::S, Var::U, Var::V].into_iter().zip(params) {
        if let Some(t) = text {
            let x: HalfInt = t
                .parse()
                .map_err(|_| fail(USAGE, format!("`{t}` is not a half-integer")))?;
            b.set(v, x);
        }
    }
    let value = dsl::eval_scalar(&e, &b).map_err(usage)?;
    let decimal = precision.map(|d| value.to_float(d).to_string_radix(10, Some(d as usize)));
    match format {
        Format::Json => println!(
            "{}",
            json!({"expr": expr, "value": value.to_string(), "decimal": decimal})
        ),
        Format::Text => {
            println!("{value}");
            if let Some(d) = decimal {
                println!("~ {d}");
            }
        }
    }
    Ok(0)
}
