//! Command surface shared by the `formality` binary and the tests.
//!
//! Every command returns a [`Report`]: human-readable lines plus a JSON
//! value with stable keys. The JSON form carries a top-level `schema` field.

pub mod document;
pub mod expr;
pub mod suite;

use serde_json::{json, Value};

use crate::dgl::{self, Dgl};
use crate::error::{Error, Result};
use crate::free_lie::LieExpr;
use crate::graded::{Degree, LinComb};
use crate::linf::{structure_of_dgl, LInfStructure};
use crate::quillen_ss::{collapses_through, show_vector, Collapse, FilteredChains};
use crate::scalar::{fmt_q, parse_q, Q};
use crate::sullivan::{brackets_of, dualize, graded_det, intrinsic_coformality, intrinsic_coformality_em, Coformality};
use crate::whitehead::{
    self, build_model, classify, formality_obstruction, homology_class, homology_lie, representatives, BracketSet,
    Cardinality, Conditions, LieTable, Verdict, ZeroMembership,
};

use document::{Document, Presentation};
use expr::{parse_lie_list, parse_linear, Names, Origin};

pub const SCHEMA: &str = "formality-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A check ran and failed.
    Failed,
    /// The computation could not decide.
    Undecided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub lines: Vec<String>,
    pub data: Value,
}

impl Report {
    fn new(command: &str, status: Status, lines: Vec<String>, data: Value) -> Self {
        Report {
            command: command.into(),
            status,
            lines,
            data,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status.as_str(),
            "summary": self.lines,
            "data": self.data,
        })
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

fn names_of(doc: &Document) -> Vec<(String, Degree)> {
    match &doc.presentation {
        Presentation::Dgl(l) => {
            let g = l.generators();
            g.names().iter().cloned().zip(g.degrees().iter().copied()).collect()
        }
        Presentation::Linf(s) => s.names().iter().cloned().zip(s.degrees().iter().copied()).collect(),
        Presentation::Cdga(a) => a.names().iter().cloned().zip(a.degrees().iter().copied()).collect(),
    }
}

fn refuse(command: &str, doc: &Document) -> Error {
    Error::Refused(format!(
        "`{command}` does not apply to {} documents",
        doc.kind().as_str()
    ))
}

pub fn check(doc: &Document) -> Report {
    let mut lines = Vec::new();
    let mut zero = Vec::new();
    let (passed, detail) = match &doc.presentation {
        Presentation::Dgl(l) => {
            let g = l.generators();
            for i in 0..g.len() as u32 {
                let e = l.differential_expr(i);
                if !e.is_zero() && l.differential_of(i).is_zero() {
                    zero.push(g.name(i).to_string());
                    lines.push(format!("d {} = {e} expands to 0", g.name(i)));
                }
            }
            let r = l.check_d_squared();
            let detail = match &r.first_failure {
                None => "d^2 = 0 on every generator".to_string(),
                Some(g) => format!("d^2 is nonzero on `{g}`"),
            };
            (r.passed, detail)
        }
        Presentation::Linf(s) => {
            let n = 2 * s.arity_bound().max(1);
            let r = s.check_generalized_jacobi(n);
            let detail = if r.passed() {
                format!("generalized Jacobi identities hold for n <= {n}")
            } else {
                format!("generalized Jacobi identity fails: {r:?}")
            };
            (r.passed(), detail)
        }
        Presentation::Cdga(a) => match a.square_zero_violation() {
            None => (true, "d^2 = 0 on every generator".to_string()),
            Some(i) => (false, format!("d^2 is nonzero on `{}`", a.names()[i])),
        },
    };
    lines.insert(0, format!("{}: {}", if passed { "PASS" } else { "FAIL" }, detail));
    Report::new(
        "check",
        if passed { Status::Ok } else { Status::Failed },
        lines,
        json!({ "kind": doc.kind().as_str(), "passed": passed, "detail": detail, "zero_differentials": zero }),
    )
}

pub fn homology(doc: &Document, degree: Degree) -> Result<Report> {
    match &doc.presentation {
        Presentation::Dgl(l) => {
            let h = dgl::homology(l, degree)?;
            let reps: Vec<String> = h.representatives.iter().map(|r| r.to_string()).collect();
            let mut lines = vec![format!("H_{degree} has dimension {}", h.dimension)];
            lines.extend(reps.iter().map(|r| format!("  class of {r}")));
            Ok(Report::new(
                "homology",
                Status::Ok,
                lines,
                json!({
                    "degree": degree,
                    "dimension": h.dimension,
                    "cycles": h.cycle_dim,
                    "boundaries": h.boundary_dim,
                    "representatives": reps,
                }),
            ))
        }
        Presentation::Linf(s) => {
            if s.arity_bound() > 2 {
                return Err(Error::Refused(
                    "homology is computed for ℓ₁ of structures with ℓ_k = 0, k > 2".into(),
                ));
            }
            let engine = Dgl::new(LieTable::new(s.clone())?);
            let h = engine.homology(degree)?;
            let reps: Vec<String> = h
                .representatives
                .iter()
                .map(|r| whitehead::show_combination(r.iter().map(|(i, c)| (c.clone(), s.name(*i).to_string()))))
                .collect();
            Ok(Report::new(
                "homology",
                Status::Ok,
                vec![format!("H_{degree} has dimension {}", h.dimension())],
                json!({ "degree": degree, "dimension": h.dimension(), "representatives": reps }),
            ))
        }
        Presentation::Cdga(_) => Err(refuse("homology", doc)),
    }
}

pub fn whitehead_model(dims: &[Degree], truncation: Option<Degree>) -> Result<Report> {
    let total: Degree = dims.iter().sum();
    let m = build_model(dims, truncation.unwrap_or(total - 2))?;
    let d2 = m.presentation().check_d_squared();
    let doc = Document::new(Presentation::Dgl(m.presentation().clone()));
    let mut lines = vec![
        format!("model of the {}-fold bracket on spheres {:?}", dims.len(), dims),
        format!("d^2 = 0: {}", d2.passed),
        format!("attaching cycle (degree {}): {}", m.attaching_degree(), m.attaching()),
    ];
    lines.push(String::new());
    lines.extend(doc.to_text().lines().map(String::from));
    Ok(Report::new(
        "whitehead-model",
        if d2.passed { Status::Ok } else { Status::Failed },
        lines,
        json!({
            "dims": dims,
            "d_squared_zero": d2.passed,
            "attaching_degree": m.attaching_degree(),
            "attaching": m.attaching().to_string(),
            "document": doc.to_text(),
        }),
    ))
}

fn class_json(set: &BracketSet) -> Value {
    match set {
        BracketSet::Empty { generator, .. } => json!({ "empty": true, "obstructed_at": generator }),
        BracketSet::Class { class, log } => json!({
            "empty": false,
            "class": class.to_string(),
            "constant": class.is_constant(),
            "stages": log.iter().map(|r| json!({
                "generator": r.generator,
                "parameters": r.parameters,
                "conditions": r.conditions,
                "solved": r.solved,
            })).collect::<Vec<_>>(),
        }),
    }
}

fn classification_json(set: &BracketSet) -> Value {
    let c = classify(set);
    let zero = match &c.zero {
        ZeroMembership::Yes(_) => "yes",
        ZeroMembership::No => "no",
        ZeroMembership::Unknown => "unknown",
    };
    let single = match &c.cardinality {
        Cardinality::Singleton(v) => Some(v.iter().map(fmt_q).collect::<Vec<_>>()),
        _ => None,
    };
    json!({ "cardinality": c.cardinality.kind(), "contains_zero": zero, "value": single })
}

fn describe_set(label: &str, set: &BracketSet) -> Vec<String> {
    let c = classify(set);
    let zero = match &c.zero {
        ZeroMembership::Yes(_) => "contains 0",
        ZeroMembership::No => "does not contain 0",
        ZeroMembership::Unknown => "zero membership unknown",
    };
    match set {
        BracketSet::Empty { generator, .. } => vec![format!("{label}: empty (no extension at {generator})")],
        BracketSet::Class { class, .. } => vec![
            format!("{label}: {class}"),
            format!("  {}, {zero}", c.cardinality.kind()),
        ],
    }
}

fn parse_classes(doc: &Document, classes: &str) -> Result<Vec<LieExpr>> {
    let names = names_of(doc);
    parse_lie_list(classes, &Names(&names), Origin::default())
}

/// The bracket set of `classes` in a DGL document, or in its homology with
/// `in_homology`.
pub fn bracket_set(doc: &Document, classes: &str, in_homology: bool) -> Result<Report> {
    let set = match &doc.presentation {
        Presentation::Dgl(l) => {
            let exprs = parse_classes(doc, classes)?;
            let engine = Dgl::new(l.clone());
            let reps = representatives(l, &exprs)?;
            if in_homology {
                let hl = homology_lie(&engine, l.generators().truncation() - 1)?;
                let he = Dgl::new(hl.table()?);
                let hr = reps
                    .iter()
                    .map(|(d, r)| Ok((*d, homology_class(&engine, &hl, r, *d)?)))
                    .collect::<Result<Vec<_>>>()?;
                whitehead::bracket_set(&he, &hr, Conditions::Solve)?
            } else {
                whitehead::bracket_set(&engine, &reps, Conditions::Solve)?
            }
        }
        Presentation::Linf(s) => {
            let names = names_of(doc);
            let engine = Dgl::new(LieTable::new(s.clone())?);
            let reps = expr::split_top_level(classes)
                .iter()
                .map(|c| {
                    let v = parse_linear(c, &Names(&names), Origin::default())?;
                    let Some((i, _)) = v.first() else {
                        return Err(Error::Invalid(format!("class `{}` is zero", c.trim())));
                    };
                    Ok((s.degree(*i), v))
                })
                .collect::<Result<Vec<_>>>()?;
            whitehead::bracket_set(&engine, &reps, Conditions::Solve)?
        }
        Presentation::Cdga(_) => return Err(refuse("bracket-set", doc)),
    };
    let label = if in_homology {
        "bracket set in homology"
    } else {
        "bracket set"
    };
    let lines = describe_set(label, &set);
    Ok(Report::new(
        "bracket-set",
        Status::Ok,
        lines,
        json!({ "in_homology": in_homology, "set": class_json(&set), "classification": classification_json(&set) }),
    ))
}

pub fn formality(doc: &Document, classes: &str) -> Result<Report> {
    let Presentation::Dgl(l) = &doc.presentation else {
        return Err(refuse("formality", doc));
    };
    let exprs = parse_classes(doc, classes)?;
    let r = formality_obstruction(l, &exprs)?;
    let mut lines = vec![r.verdict.to_string()];
    lines.extend(describe_set("in the DGL", &r.in_dgl));
    lines.extend(describe_set("in homology", &r.in_homology));
    let status = match r.verdict {
        Verdict::Inconclusive => Status::Undecided,
        _ => Status::Ok,
    };
    Ok(Report::new(
        "formality",
        status,
        lines,
        json!({
            "verdict": r.verdict.to_string(),
            "in_dgl": { "set": class_json(&r.in_dgl), "classification": classification_json(&r.in_dgl) },
            "in_homology": { "set": class_json(&r.in_homology), "classification": classification_json(&r.in_homology) },
        }),
    ))
}

fn structure_for_chains(doc: &Document, max_degree: Degree) -> Result<LInfStructure> {
    match &doc.presentation {
        Presentation::Linf(s) => Ok(s.clone()),
        Presentation::Dgl(l) => {
            let top = (max_degree - 1).min(l.generators().truncation());
            Ok(structure_of_dgl(l, top)?.0)
        }
        Presentation::Cdga(_) => Err(refuse("ss", doc)),
    }
}

/// Pages of the word-length spectral sequence and the collapse check from
/// `page` on, through `max_degree`.
pub fn spectral_sequence(doc: &Document, page: usize, max_degree: Degree) -> Result<Report> {
    let s = structure_for_chains(doc, max_degree)?;
    let ch = FilteredChains::of_structure(&s, max_degree + 1)?;
    let e = ch.page(page)?;
    let mut dims = Vec::new();
    for d in 1..=max_degree {
        let total = e.total_dimension(d);
        if total > 0 {
            dims.push(json!({ "degree": d, "dimension": total }));
        }
    }
    let names = s.names().to_vec();
    let (line, verdict) = match collapses_through(&ch, page, max_degree)? {
        Collapse::Collapses { .. } => (
            format!("d^k = 0 for k ≥ {page} through degree {max_degree}"),
            json!({ "collapses": true, "from_page": page, "through_degree": max_degree }),
        ),
        Collapse::Differential {
            page: k,
            p,
            degree,
            element,
            image,
        } => (
            format!(
                "d^{k} ≠ 0: {} ↦ {} (filtration {p}, degree {degree})",
                show_vector(&element, &names),
                show_vector(&image, &names)
            ),
            json!({
                "collapses": false,
                "page": k,
                "filtration": p,
                "degree": degree,
                "element": show_vector(&element, &names),
                "image": show_vector(&image, &names),
            }),
        ),
    };
    let mut lines = vec![line];
    lines.push(format!("E^{page} total dimensions:"));
    for d in 1..=max_degree {
        let t = e.total_dimension(d);
        if t > 0 {
            lines.push(format!("  degree {d}: {t}"));
        }
    }
    Ok(Report::new(
        "ss",
        Status::Ok,
        lines,
        json!({ "page": page, "max_degree": max_degree, "dimensions": dims, "verdict": verdict }),
    ))
}

/// L-infinity documents go to their dual algebra and back.
pub fn dualize_document(doc: &Document) -> Result<Report> {
    let out = match &doc.presentation {
        Presentation::Linf(s) => Document::new(Presentation::Cdga(dualize(s)?)),
        Presentation::Cdga(a) => Document::new(Presentation::Linf(brackets_of(a)?)),
        Presentation::Dgl(_) => return Err(refuse("dualize", doc)),
    };
    let text = out.to_text();
    Ok(Report::new(
        "dualize",
        Status::Ok,
        text.lines().map(String::from).collect(),
        json!({ "kind": out.kind().as_str(), "document": text }),
    ))
}

/// Parses `a,b;c,d` into rows.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Q>>> {
    text.split(';')
        .enumerate()
        .map(|(i, row)| {
            row.split(',')
                .map(|x| {
                    parse_q(x).ok_or_else(|| Error::Parse {
                        line: 1,
                        column: 1,
                        message: format!("row {}: `{}` is not an integer or p/q", i + 1, x.trim()),
                    })
                })
                .collect()
        })
        .collect()
}

pub fn graded_determinant(matrix: &[Vec<Q>], degrees: &[Degree]) -> Result<Report> {
    let v = graded_det(matrix, degrees)?;
    Ok(Report::new(
        "graded-det",
        Status::Ok,
        vec![format!("graded determinant = {}", fmt_q(&v))],
        json!({ "degrees": degrees, "value": fmt_q(&v) }),
    ))
}

pub fn intrinsic_coformal(dims: &[i64], eilenberg_mac_lane: bool) -> Result<Report> {
    let c = if eilenberg_mac_lane {
        intrinsic_coformality_em(dims)?
    } else {
        intrinsic_coformality(dims)?
    };
    let line = c.describe(dims);
    let witness = match &c {
        Coformality::Yes => Value::Null,
        Coformality::No { index, subset } => {
            json!({ "index": index + 1, "subset": subset.iter().map(|j| j + 1).collect::<Vec<_>>() })
        }
    };
    Ok(Report::new(
        "intrinsic-coformal",
        Status::Ok,
        vec![line],
        json!({ "dims": dims, "coformal": c == Coformality::Yes, "witness": witness }),
    ))
}

pub fn reference_examples() -> Report {
    let outcomes = suite::run_all();
    let passed = outcomes.iter().all(|o| o.passed);
    let lines = outcomes.iter().map(|o| o.line()).collect();
    let data: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail }))
        .collect();
    Report::new(
        "examples",
        if passed { Status::Ok } else { Status::Failed },
        lines,
        json!({ "criteria": data }),
    )
}

pub(crate) fn unit(i: usize) -> LinComb<usize, Q> {
    LinComb::term(i, crate::scalar::q(1))
}
