//! Presentation documents.
//!
//! A document is a list of line statements; `#` starts a comment.
//!
//! ```text
//! kind = dgl
//! truncation = 12
//! generators = x:2, y:3
//! d y = [x,x]
//! option label = example
//! ```
//!
//! `kind` is one of `dgl`, `linf`, `cdga`. DGL and CDGA documents give
//! differentials with `d NAME = EXPR`; L-infinity documents give brackets
//! with `bracket A,B,... = COMBINATION`. `generators` may be repeated; the
//! lists are concatenated. For `linf`, `truncation` is the degree through
//! which the bracket tables are known to be complete.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dgl::DglPresentation;
use crate::error::{Error, Result};
use crate::free_lie::{GeneratorSet, LieExpr};
use crate::graded::{Degree, LinComb};
use crate::linf::LInfStructure;
use crate::scalar::Q;
use crate::sullivan::{show_element, Element, SullivanAlgebra};
use crate::whitehead::show_combination;

use super::expr::{lie_degree, parse_lie, parse_linear, parse_poly, Names, Origin};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Dgl,
    Linf,
    Cdga,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Dgl => "dgl",
            Kind::Linf => "linf",
            Kind::Cdga => "cdga",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Presentation {
    Dgl(DglPresentation),
    Linf(LInfStructure),
    Cdga(SullivanAlgebra),
}

#[derive(Clone, Debug)]
pub struct Document {
    pub presentation: Presentation,
    pub options: BTreeMap<String, String>,
}

fn at(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

struct Statement<'a> {
    line: usize,
    keyword: &'a str,
    head: &'a str,
    value: &'a str,
    value_column: usize,
}

fn split_statement(line_no: usize, raw: &str) -> Result<Option<Statement<'_>>> {
    let text = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    if text.trim().is_empty() {
        return Ok(None);
    }
    let Some(eq) = text.find('=') else {
        let col = text.len() - text.trim_start().len() + 1;
        return Err(at(line_no, col, "expected `key = value`"));
    };
    let lhs = text[..eq].trim();
    let (keyword, head) = match lhs.split_once(char::is_whitespace) {
        Some((k, h)) => (k, h.trim()),
        None => (lhs, ""),
    };
    let after = &text[eq + 1..];
    let lead = after.len() - after.trim_start().len();
    Ok(Some(Statement {
        line: line_no,
        keyword,
        head,
        value: after.trim(),
        value_column: text[..eq + 1 + lead].chars().count() + 1,
    }))
}

fn parse_generators(s: &Statement, out: &mut Vec<(String, Degree)>) -> Result<()> {
    if s.value.is_empty() {
        return Ok(());
    }
    let mut col = s.value_column;
    for item in s.value.split(',') {
        let lead = item.len() - item.trim_start().len();
        let entry = item.trim();
        let Some((name, degree)) = entry.split_once(':') else {
            return Err(at(
                s.line,
                col + lead,
                format!("expected `name:degree`, found `{entry}`"),
            ));
        };
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            return Err(at(s.line, col + lead, format!("bad generator name `{name}`")));
        }
        let degree: Degree = degree
            .trim()
            .parse()
            .map_err(|_| at(s.line, col + lead, format!("bad degree for `{name}`")))?;
        if out.iter().any(|(n, _)| n == name) {
            return Err(at(s.line, col + lead, format!("duplicate generator `{name}`")));
        }
        out.push((name.to_string(), degree));
        col += item.chars().count() + 1;
    }
    Ok(())
}

impl Document {
    pub fn new(presentation: Presentation) -> Self {
        Document {
            presentation,
            options: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self.presentation {
            Presentation::Dgl(_) => Kind::Dgl,
            Presentation::Linf(_) => Kind::Linf,
            Presentation::Cdga(_) => Kind::Cdga,
        }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let mut kind = None;
        let mut truncation = None;
        let mut generators = Vec::new();
        let mut body = Vec::new();
        let mut options = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let Some(s) = split_statement(i + 1, raw)? else {
                continue;
            };
            match s.keyword {
                "kind" => {
                    kind = Some(match s.value {
                        "dgl" => Kind::Dgl,
                        "linf" => Kind::Linf,
                        "cdga" => Kind::Cdga,
                        other => return Err(at(s.line, s.value_column, format!("unknown kind `{other}`"))),
                    })
                }
                "truncation" => {
                    truncation = Some(
                        s.value
                            .parse::<Degree>()
                            .map_err(|_| at(s.line, s.value_column, "truncation must be an integer"))?,
                    )
                }
                "generators" => parse_generators(&s, &mut generators)?,
                "d" | "bracket" => body.push(s),
                "option" => {
                    if s.head.is_empty() {
                        return Err(at(s.line, 1, "option needs a name"));
                    }
                    options.insert(s.head.to_string(), s.value.to_string());
                }
                other => return Err(at(s.line, 1, format!("unknown statement `{other}`"))),
            }
        }
        let Some(kind) = kind else {
            return Err(at(1, 1, "missing `kind = dgl|linf|cdga`"));
        };
        let names = Names(&generators);
        let presentation = match kind {
            Kind::Dgl => Presentation::Dgl(build_dgl(&names, truncation, &body)?),
            Kind::Linf => Presentation::Linf(build_linf(&names, truncation, &body)?),
            Kind::Cdga => Presentation::Cdga(build_cdga(&names, &body)?),
        };
        Ok(Document { presentation, options })
    }

    /// Canonical text: fixed statement order, one generator line, zero
    /// differentials omitted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "kind = {}", self.kind().as_str()).unwrap();
        match &self.presentation {
            Presentation::Dgl(l) => {
                let g = l.generators();
                writeln!(out, "truncation = {}", g.truncation()).unwrap();
                write_generators(&mut out, g.names().iter().cloned().zip(g.degrees().iter().copied()));
                for i in 0..g.len() as u32 {
                    let e = l.differential_expr(i);
                    if !e.is_zero() {
                        writeln!(out, "d {} = {e}", g.name(i)).unwrap();
                    }
                }
            }
            Presentation::Linf(s) => {
                if let Some(t) = s.complete_through() {
                    writeln!(out, "truncation = {t}").unwrap();
                }
                write_generators(&mut out, s.names().iter().cloned().zip(s.degrees().iter().copied()));
                for table in s.tables().values() {
                    for (args, v) in table {
                        if v.is_zero() {
                            continue;
                        }
                        let args: Vec<&str> = args.iter().map(|&a| s.name(a)).collect();
                        let value = show_combination(v.iter().map(|(o, c)| (c.clone(), s.name(*o).to_string())));
                        writeln!(out, "bracket {} = {value}", args.join(",")).unwrap();
                    }
                }
            }
            Presentation::Cdga(a) => {
                write_generators(&mut out, a.names().iter().cloned().zip(a.degrees().iter().copied()));
                for i in 0..a.len() {
                    let d = a.differential(i);
                    if !d.is_zero() {
                        writeln!(out, "d {} = {}", a.names()[i], show_element(d, a.names())).unwrap();
                    }
                }
            }
        }
        for (k, v) in &self.options {
            writeln!(out, "option {k} = {v}").unwrap();
        }
        out
    }
}

fn write_generators(out: &mut String, gens: impl Iterator<Item = (String, Degree)>) {
    let list: Vec<String> = gens.map(|(n, d)| format!("{n}:{d}")).collect();
    writeln!(out, "generators = {}", list.join(", ")).unwrap();
}

fn target_index(names: &Names, s: &Statement) -> Result<usize> {
    let col = s.keyword.len() + 2;
    if s.head.is_empty() {
        return Err(at(s.line, col, "expected a generator name"));
    }
    names
        .0
        .iter()
        .position(|(n, _)| n == s.head)
        .ok_or_else(|| at(s.line, col, format!("unknown generator `{}`", s.head)))
}

fn origin(s: &Statement) -> Origin {
    Origin {
        line: s.line,
        column: s.value_column,
    }
}

fn check_statement_kind(s: &Statement, want: &str) -> Result<()> {
    if s.keyword != want {
        return Err(at(
            s.line,
            1,
            format!("`{}` statements are not allowed in this kind of document", s.keyword),
        ));
    }
    Ok(())
}

fn build_dgl(names: &Names, truncation: Option<Degree>, body: &[Statement]) -> Result<DglPresentation> {
    let top = names.0.iter().map(|(_, d)| *d).max().unwrap_or(0);
    let truncation = truncation.unwrap_or(top);
    let mut seen = vec![false; names.0.len()];
    let mut diffs: Vec<(String, LieExpr)> = Vec::new();
    for s in body {
        check_statement_kind(s, "d")?;
        let g = target_index(names, s)?;
        if std::mem::replace(&mut seen[g], true) {
            return Err(at(s.line, 1, format!("second differential for `{}`", s.head)));
        }
        let e = parse_lie(s.value, names, origin(s))?;
        let want = names.0[g].1 - 1;
        match lie_degree(&e, names) {
            Ok(Some(d)) if d != want => {
                return Err(at(
                    s.line,
                    s.value_column,
                    Error::BadDegree {
                        generator: s.head.to_string(),
                        found: d,
                        expected: format!("its differential must have degree {want}"),
                    }
                    .to_string(),
                ))
            }
            Err(e) => return Err(at(s.line, s.value_column, e.to_string())),
            _ => {}
        }
        diffs.push((s.head.to_string(), e));
    }
    let gens = GeneratorSet::new(names.0.to_vec(), truncation).map_err(|e| at(1, 1, e.to_string()))?;
    DglPresentation::new(gens, diffs).map_err(|e| at(1, 1, e.to_string()))
}

fn build_linf(names: &Names, truncation: Option<Degree>, body: &[Statement]) -> Result<LInfStructure> {
    let mut l = LInfStructure::new(names.0.to_vec())
        .map_err(|e| at(1, 1, e.to_string()))?
        .with_complete_through(truncation);
    for s in body {
        check_statement_kind(s, "bracket")?;
        let col = s.keyword.len() + 2;
        let mut args = Vec::new();
        for a in s.head.split(',') {
            let a = a.trim();
            let i = names
                .0
                .iter()
                .position(|(n, _)| n == a)
                .ok_or_else(|| at(s.line, col, format!("unknown generator `{a}`")))?;
            args.push(i);
        }
        let v = parse_linear(s.value, names, origin(s))?;
        if !l.bracket(&args).is_zero() {
            return Err(at(s.line, 1, "bracket given twice"));
        }
        l.set_bracket(&args, v)
            .map_err(|e| at(s.line, s.value_column, e.to_string()))?;
    }
    Ok(l)
}

fn build_cdga(names: &Names, body: &[Statement]) -> Result<SullivanAlgebra> {
    let degrees: Vec<Degree> = names.0.iter().map(|(_, d)| *d).collect();
    let mut diffs: Vec<Element<Q>> = vec![LinComb::zero(); names.0.len()];
    let mut seen = vec![false; names.0.len()];
    for s in body {
        check_statement_kind(s, "d")?;
        let g = target_index(names, s)?;
        if std::mem::replace(&mut seen[g], true) {
            return Err(at(s.line, 1, format!("second differential for `{}`", s.head)));
        }
        let e = parse_poly(s.value, names, origin(s))?;
        let mut found = None;
        for (w, _) in e.iter() {
            let d: Degree = w.iter().map(|&i| degrees[i]).sum();
            if found.is_some_and(|f| f != d) {
                return Err(at(
                    s.line,
                    s.value_column,
                    format!("inhomogeneous differential for `{}`", s.head),
                ));
            }
            found = Some(d);
        }
        let want = degrees[g] + 1;
        if let Some(d) = found.filter(|&d| d != want) {
            return Err(at(
                s.line,
                s.value_column,
                Error::BadDegree {
                    generator: s.head.to_string(),
                    found: d,
                    expected: format!("its differential must have degree {want}"),
                }
                .to_string(),
            ));
        }
        diffs[g] = e;
    }
    SullivanAlgebra::new(names.0.to_vec(), diffs).map_err(|e| at(1, 1, e.to_string()))
}
