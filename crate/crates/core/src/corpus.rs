//! The identity library: a directory of identity documents plus a manifest
//! recording each entry's grid and expected verdict.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::beta::{default_params, grid, verify_closed, ClosedIdentity};
use crate::dsl::Var;
use crate::error::{Error, Result};
use crate::exact::{HalfInt, SymConst};
use crate::model::{load_identity_file, Form, Identity, Status};
use crate::poly::verify_poly_range;
use crate::report::{Outcome, Point, Value, Verdict, VerificationReport};

pub const CORPUS_ENV: &str = "POLYSUM_CORPUS";
pub const MANIFEST: &str = "manifest.json";
pub const CHECKLIST: &str = "coverage.txt";

/// `$POLYSUM_CORPUS`, or the `corpus/` directory at the workspace root.
pub fn default_dir() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Equal,
    /// The first failing grid point and both exact side values there.
    Unequal {
        point: Point,
        lhs: SymConst,
        rhs: SymConst,
    },
    /// Verdict is reported but not asserted.
    Recorded,
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub file: PathBuf,
    pub identity: Identity,
    pub expected: Expected,
    pub ns: Vec<i64>,
    pub grid: Vec<(Var, Vec<HalfInt>)>,
    pub spec: GridSpec,
}

impl CorpusEntry {
    pub fn name(&self) -> &str {
        &self.identity.name
    }

    /// Grid points satisfying the identity's constraints.
    pub fn points(&self) -> Vec<Point> {
        grid(self.ns.iter().copied(), &self.grid, |p| {
            self.identity.constraints_hold(&p.bindings())
        })
    }

    pub fn verify(&self) -> Result<VerificationReport> {
        let points = self.points();
        match self.identity.form() {
            Form::Polynomial => Ok(verify_poly_range(
                &self.identity,
                points.iter().map(|p| p.n),
            )),
            Form::Closed => Ok(verify_closed(
                &ClosedIdentity::from_identity(&self.identity)?,
                &points,
            )),
        }
    }

    /// Whether `report` is what this entry expects, with a short explanation.
    pub fn judge(&self, report: &VerificationReport) -> (bool, String) {
        match &self.expected {
            Expected::Recorded => (true, format!("recorded: {}", report.verdict().as_str())),
            Expected::Equal => {
                let all = report.points.len();
                if all > 0 && report.count_equal() == all {
                    (true, format!("equal at all {all} points"))
                } else if let Some(p) = report.first_unequal() {
                    (false, format!("unexpected inequality at {}", p.point))
                } else {
                    (
                        false,
                        format!("{} of {all} points undefined", report.count_undefined()),
                    )
                }
            }
            Expected::Unequal { point, lhs, rhs } => {
                let Some(first) = report.first_unequal() else {
                    return (false, format!("expected inequality at {point}, found none"));
                };
                let ok = first.point == *point
                    && side_values(&first.outcome) == Some((lhs.clone(), rhs.clone()));
                if ok {
                    (true, format!("unequal at {point}: {lhs} vs {rhs}"))
                } else {
                    (
                        false,
                        format!("expected first inequality at {point}, got {}", first.point),
                    )
                }
            }
        }
    }
}

fn side_values(o: &Outcome) -> Option<(SymConst, SymConst)> {
    match o {
        Outcome::Unequal {
            lhs: Value::Scalar(l),
            rhs: Value::Scalar(r),
            ..
        } => Some((l.clone(), r.clone())),
        _ => None,
    }
}

/// Parses `a..b`, `a..b:step` (step `1` or `1/2`) or a comma list of
/// half-integers such as `1/2,1,3/2`.
pub fn parse_grid(text: &str) -> Result<Vec<HalfInt>> {
    let bad = || Error::Format(format!("bad grid `{text}`"));
    let text = text.trim();
    if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step.trim().parse::<HalfInt>().map_err(|_| bad())?),
            None => (rest, HalfInt::from_int(1)),
        };
        let lo: HalfInt = lo.trim().parse().map_err(|_| bad())?;
        let hi: HalfInt = hi.trim().parse().map_err(|_| bad())?;
        if step != HalfInt::from_int(1) && step != HalfInt::from_twice(1) {
            return Err(bad());
        }
        let mut out = Vec::new();
        let mut x = lo;
        while x <= hi {
            out.push(x.clone());
            x = &x + &step;
        }
        return Ok(out);
    }
    text.split(',')
        .map(|p| p.trim().parse::<HalfInt>().map_err(|_| bad()))
        .collect()
}

/// Like [`parse_grid`] but every value must be an integer.
pub fn parse_n_range(text: &str) -> Result<Vec<i64>> {
    parse_grid(text)?
        .iter()
        .map(|x| {
            x.to_i64()
                .ok_or_else(|| Error::Format(format!("`{x}` in `{text}` is not an integer")))
        })
        .collect()
}

#[derive(Deserialize)]
struct ManifestDoc {
    entries: Vec<EntryDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    file: String,
    expect: ExpectDoc,
    #[serde(default)]
    n: Option<String>,
    #[serde(default)]
    r: Option<String>,
    #[serde(default)]
    s: Option<String>,
    #[serde(default)]
    u: Option<String>,
    #[serde(default)]
    v: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ExpectDoc {
    Equal,
    Recorded,
    Unequal(WitnessDoc),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessDoc {
    at: BTreeMap<String, String>,
    lhs: String,
    rhs: String,
}

fn witness(doc: &WitnessDoc) -> Result<Expected> {
    let bad = |what: &str| Error::Format(format!("bad witness {what}"));
    let n = doc
        .at
        .get("n")
        .ok_or_else(|| bad("point: missing n"))?
        .parse::<i64>()
        .map_err(|_| bad("n"))?;
    let mut point = Point::new(n);
    for (name, value) in &doc.at {
        if name == "n" {
            continue;
        }
        let v = Var::from_name(name).ok_or_else(|| bad(name))?;
        point = point.with(v, value.parse().map_err(|_| bad(name))?);
    }
    Ok(Expected::Unequal {
        point,
        lhs: doc.lhs.parse()?,
        rhs: doc.rhs.parse()?,
    })
}

fn default_values(v: Var) -> Vec<HalfInt> {
    match v {
        Var::U | Var::V => (0..=3).map(HalfInt::from_int).collect(),
        _ => default_params(),
    }
}

/// Grid text for `n` and the parameters, as written in a manifest row or on
/// the command line. `None` means the default.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub n: Option<String>,
    pub r: Option<String>,
    pub s: Option<String>,
    pub u: Option<String>,
    pub v: Option<String>,
}

impl GridSpec {
    fn get(&self, v: Var) -> Option<&String> {
        match v {
            Var::R => self.r.as_ref(),
            Var::S => self.s.as_ref(),
            Var::U => self.u.as_ref(),
            Var::V => self.v.as_ref(),
            _ => None,
        }
    }

    /// `other`'s fields where set, else ours.
    pub fn overridden_by(&self, other: &GridSpec) -> GridSpec {
        let pick = |a: &Option<String>, b: &Option<String>| b.clone().or_else(|| a.clone());
        GridSpec {
            n: pick(&self.n, &other.n),
            r: pick(&self.r, &other.r),
            s: pick(&self.s, &other.s),
            u: pick(&self.u, &other.u),
            v: pick(&self.v, &other.v),
        }
    }
}

impl CorpusEntry {
    /// Builds an entry, filling unset grids with the defaults: `n = 0..24`
    /// for polynomial identities, `0..16` for closed ones, `{1/2, …, 3}` for
    /// `r`, `s` and `0..3` for `u`, `v`.
    pub fn new(
        file: PathBuf,
        identity: Identity,
        expected: Expected,
        spec: &GridSpec,
    ) -> Result<Self> {
        let ns = match &spec.n {
            Some(text) => parse_n_range(text)?,
            None if identity.form() == Form::Polynomial => (0..=24).collect(),
            None => (0..=16).collect(),
        };
        let mut grid = Vec::new();
        for v in identity.parameters() {
            let values = match spec.get(v) {
                Some(t) => parse_grid(t)?,
                None => default_values(v),
            };
            grid.push((v, values));
        }
        if matches!(expected, Expected::Recorded) && identity.status != Status::Check {
            return Err(Error::Format(format!(
                "`{}`: only check-status entries may be recorded",
                identity.name
            )));
        }
        Ok(CorpusEntry {
            file,
            identity,
            expected,
            ns,
            grid,
            spec: spec.clone(),
        })
    }

    /// The same entry on a grid with some axes replaced.
    pub fn regrid(&self, spec: &GridSpec) -> Result<Self> {
        CorpusEntry::new(
            self.file.clone(),
            self.identity.clone(),
            self.expected.clone(),
            &self.spec.overridden_by(spec),
        )
    }
}

fn entry(dir: &Path, doc: &EntryDoc) -> Result<CorpusEntry> {
    let file = dir.join(&doc.file);
    let identity = load_identity_file(&file)?;
    let expected = match &doc.expect {
        ExpectDoc::Equal => Expected::Equal,
        ExpectDoc::Recorded => Expected::Recorded,
        ExpectDoc::Unequal(w) => witness(w)?,
    };
    let spec = GridSpec {
        n: doc.n.clone(),
        r: doc.r.clone(),
        s: doc.s.clone(),
        u: doc.u.clone(),
        v: doc.v.clone(),
    };
    CorpusEntry::new(file, identity, expected, &spec)
}

/// Loads every manifest entry from `dir`.
pub fn load_manifest(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let path = dir.join(MANIFEST);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let doc: ManifestDoc = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    doc.entries.iter().map(|e| entry(dir, e)).collect()
}

/// The manifest entry whose document is `file`, if any.
pub fn entry_for_file(dir: &Path, file: &Path) -> Result<Option<CorpusEntry>> {
    let Ok(target) = file.canonicalize() else {
        return Ok(None);
    };
    Ok(load_manifest(dir)?
        .into_iter()
        .find(|e| e.file.canonicalize().is_ok_and(|p| p == target)))
}

#[derive(Clone, Debug, Default)]
pub struct Filter {
    /// Substring of the entry name.
    pub name: Option<String>,
    pub status: Option<Status>,
}

impl Filter {
    pub fn accepts(&self, id: &Identity) -> bool {
        self.name
            .as_ref()
            .is_none_or(|n| id.name.contains(n.as_str()))
            && self.status.is_none_or(|s| id.status == s)
    }
}

#[derive(Clone, Debug)]
pub struct EntryResult {
    pub name: String,
    pub status: Status,
    pub expected: Expected,
    pub report: VerificationReport,
    pub met: bool,
    pub detail: String,
}

impl EntryResult {
    pub fn verdict(&self) -> Verdict {
        self.report.verdict()
    }
}

pub fn run_entry(e: &CorpusEntry) -> EntryResult {
    let (report, met, detail) = match e.verify() {
        Ok(report) => {
            let (met, detail) = e.judge(&report);
            (report, met, detail)
        }
        Err(err) => (
            VerificationReport::new(e.name(), Vec::new()),
            false,
            err.to_string(),
        ),
    };
    EntryResult {
        name: e.name().to_string(),
        status: e.identity.status,
        expected: e.expected.clone(),
        report,
        met,
        detail,
    }
}

/// Verifies every selected entry, in manifest order.
pub fn run_corpus(dir: &Path, filter: &Filter) -> Result<Vec<EntryResult>> {
    let entries: Vec<CorpusEntry> = load_manifest(dir)?
        .into_iter()
        .filter(|e| filter.accepts(&e.identity))
        .collect();
    Ok(entries.par_iter().map(run_entry).collect())
}

/// One row of the coverage checklist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChecklistRow {
    pub display: String,
    pub description: String,
    pub covered_by: Coverage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coverage {
    Entries(Vec<String>),
    OutOfScope(String),
}

#[derive(Clone, Debug, Default)]
pub struct CoverageReport {
    pub rows: usize,
    pub out_of_scope: usize,
    /// `(display, entry)` pairs naming entries absent from the manifest.
    pub missing: Vec<(String, String)>,
    /// Manifest entries no checklist row refers to.
    pub unreferenced: Vec<String>,
}

impl CoverageReport {
    pub fn passes(&self) -> bool {
        self.rows > 0 && self.missing.is_empty()
    }
}

/// Reads `display | description | entry, entry` or
/// `display | description | out-of-scope: reason` rows.
pub fn parse_checklist(text: &str) -> Result<Vec<ChecklistRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.splitn(3, '|').map(str::trim).collect();
        let [display, description, target] = parts[..] else {
            return Err(Error::Format(format!(
                "checklist line {}: expected 3 fields",
                i + 1
            )));
        };
        let covered_by = match target.strip_prefix("out-of-scope:") {
            Some(reason) if !reason.trim().is_empty() => Coverage::OutOfScope(reason.trim().into()),
            Some(_) => {
                return Err(Error::Format(format!(
                    "checklist line {}: empty reason",
                    i + 1
                )))
            }
            None => Coverage::Entries(
                target
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            ),
        };
        rows.push(ChecklistRow {
            display: display.into(),
            description: description.into(),
            covered_by,
        });
    }
    Ok(rows)
}

/// Checks that every checklist row names existing entries or is out of scope.
pub fn check_coverage(dir: &Path) -> Result<CoverageReport> {
    let path = dir.join(CHECKLIST);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rows = parse_checklist(&text)?;
    let names: Vec<String> = load_manifest(dir)?
        .iter()
        .map(|e| e.name().to_string())
        .collect();
    let mut report = CoverageReport {
        rows: rows.len(),
        ..Default::default()
    };
    let mut referenced = std::collections::BTreeSet::new();
    for row in &rows {
        match &row.covered_by {
            Coverage::OutOfScope(_) => report.out_of_scope += 1,
            Coverage::Entries(list) if list.is_empty() => report
                .missing
                .push((row.display.clone(), String::from("(nothing)"))),
            Coverage::Entries(list) => {
                for name in list {
                    if names.contains(name) {
                        referenced.insert(name.clone());
                    } else {
                        report.missing.push((row.display.clone(), name.clone()));
                    }
                }
            }
        }
    }
    report.unreferenced = names
        .into_iter()
        .filter(|n| !referenced.contains(n))
        .collect();
    Ok(report)
}
