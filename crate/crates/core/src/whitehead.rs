//! Higher Whitehead brackets of homology classes in a DGL.
//!
//! The universal model is the free Lie algebra on generators `u_I` for the
//! proper nonempty index words `I ⊂ {1,…,k}`, with
//! `∂u_I = Σ ε [u_A, u_B]` over the splittings `I = A ⊔ B` with `A` holding
//! the first index. A bracket set is computed stage by stage: classes are
//! sent to representatives, each longer generator to a general solution of
//! the extension problem, and the attaching cycle `w` (the same sum over the
//! full word) to a class with polynomial coefficients in the free choices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dgl::{apply_d, bracket, Dgl, DglPresentation, DglTarget};
use crate::error::{Error, Result};
use crate::free_lie::{GeneratorSet, LieExpr, LieTree, Tensor};
use crate::graded::{koszul_sign, shuffles, sign_pow, Degree, LinComb};
use crate::linf::LInfStructure;
use crate::polysolve::{apply_solution, eliminate, search_zero, specialize, Elimination};
use crate::scalar::{q, Coeff, ParamNames, Poly, Q};

/// One summand `sign · [u_left, u_right]` of the model differential.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub sign: i8,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Summands of `∂u_word` for a sorted word of 0-based indices.
pub fn differential_terms(dims: &[Degree], word: &[usize]) -> Result<Vec<Term>> {
    let s = word.len();
    let degrees: Vec<Degree> = word.iter().map(|&i| dims[i]).collect();
    let mut out = Vec::new();
    for p in 1..s {
        for sigma in shuffles(p, s - p, true) {
            let left: Vec<usize> = sigma[..p].iter().map(|&j| word[j]).collect();
            let right: Vec<usize> = sigma[p..].iter().map(|&j| word[j]).collect();
            let ea: i64 = left.iter().map(|&i| dims[i] as i64).sum();
            let eb: i64 = right.iter().map(|&i| dims[i] as i64).sum();
            let sign = koszul_sign(&sigma, &degrees)? * sign_pow(ea * (eb + 1));
            out.push(Term { sign, left, right });
        }
    }
    Ok(out)
}

/// Proper nonempty sorted words of `0..k`, by length then lexicographically.
pub fn proper_words(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for s in 1..k {
        for c in itertools::Itertools::combinations(0..k, s) {
            out.push(c);
        }
    }
    out
}

/// Display label of an index word, 1-based: `12`, or `1_10` once indices
/// need two digits.
pub fn word_label(k: usize, word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(|i| (i + 1).to_string()).collect();
    if k >= 10 {
        parts.join("_")
    } else {
        parts.concat()
    }
}

fn check_dims(dims: &[Degree]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::Invalid("a Whitehead bracket needs at least two classes".into()));
    }
    for (i, &n) in dims.iter().enumerate() {
        if n < 2 {
            return Err(Error::BadDegree {
                generator: format!("x{}", i + 1),
                found: n - 1,
                expected: "classes of positive degree".into(),
            });
        }
    }
    Ok(())
}

/// The universal model for a `k`-fold bracket of classes of degrees
/// `n_i − 1`.
#[derive(Clone, Debug)]
pub struct WhiteheadModel {
    dims: Vec<Degree>,
    words: Vec<Vec<usize>>,
    terms: BTreeMap<Vec<usize>, Vec<Term>>,
    presentation: DglPresentation,
    attaching: LieExpr,
}

impl WhiteheadModel {
    pub fn dims(&self) -> &[Degree] {
        &self.dims
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// Sum of the `n_i`.
    pub fn total(&self) -> Degree {
        self.dims.iter().sum()
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn generator_name(&self, word: &[usize]) -> String {
        format!("u{}", word_label(self.k(), word))
    }

    pub fn word_degree(&self, word: &[usize]) -> Degree {
        word.iter().map(|&i| self.dims[i]).sum::<Degree>() - 1
    }

    pub fn terms(&self, word: &[usize]) -> &[Term] {
        &self.terms[word]
    }

    pub fn presentation(&self) -> &DglPresentation {
        &self.presentation
    }

    /// The attaching cycle `w`, of degree `N − 2`.
    pub fn attaching(&self) -> &LieExpr {
        &self.attaching
    }

    pub fn attaching_degree(&self) -> Degree {
        self.total() - 2
    }

    pub fn attaching_terms(&self) -> &[Term] {
        let full: Vec<usize> = (0..self.k()).collect();
        &self.terms[&full]
    }
}

fn terms_to_expr(terms: &[Term], name: impl Fn(&[usize]) -> String) -> LieExpr {
    let mut e = LieExpr::zero();
    for t in terms {
        e = e.plus(
            q(t.sign as i64),
            LieTree::bracket(LieTree::leaf(name(&t.left)), LieTree::leaf(name(&t.right))),
        );
    }
    e
}

fn all_terms(dims: &[Degree]) -> Result<BTreeMap<Vec<usize>, Vec<Term>>> {
    let k = dims.len();
    let mut terms = BTreeMap::new();
    let mut words = proper_words(k);
    words.push((0..k).collect());
    for w in words.into_iter().filter(|w| w.len() >= 2) {
        let t = differential_terms(dims, &w)?;
        terms.insert(w, t);
    }
    Ok(terms)
}

/// Builds the model and certifies `∂² = 0` and `∂w = 0`.
pub fn build_model(dims: &[Degree], truncation: Degree) -> Result<WhiteheadModel> {
    check_dims(dims)?;
    let k = dims.len();
    let total: Degree = dims.iter().sum();
    if truncation < total - 2 {
        return Err(Error::TruncationTooLow {
            needed: total - 2,
            truncation,
        });
    }
    let words = proper_words(k);
    let terms = all_terms(dims)?;
    let name = |w: &[usize]| format!("u{}", word_label(k, w));
    let gens = GeneratorSet::new(
        words
            .iter()
            .map(|w| (name(w), w.iter().map(|&i| dims[i]).sum::<Degree>() - 1))
            .collect(),
        truncation,
    )?;
    let diffs = words
        .iter()
        .filter(|w| w.len() >= 2)
        .map(|w| (name(w), terms_to_expr(&terms[w], name)))
        .collect();
    let presentation = DglPresentation::new(gens, diffs)?;
    let check = presentation.check_d_squared();
    if !check.passed {
        return Err(Error::Invalid(format!(
            "model differential does not square to zero on {}",
            check.first_failure.unwrap_or_default()
        )));
    }
    let full: Vec<usize> = (0..k).collect();
    let attaching = terms_to_expr(&terms[&full], name);
    if !presentation.apply_differential(&attaching)?.is_zero() {
        return Err(Error::Invalid("attaching element is not a cycle".into()));
    }
    Ok(WhiteheadModel {
        dims: dims.to_vec(),
        words,
        terms,
        presentation,
        attaching,
    })
}

/// A homology class whose coordinates are polynomials in parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamClass {
    pub degree: Degree,
    /// Coordinates in the homology basis.
    pub coords: Vec<Poly>,
    /// Representatives of the homology basis, as text.
    pub basis: Vec<String>,
    pub params: ParamNames,
}

impl ParamClass {
    pub fn is_constant(&self) -> bool {
        self.coords.iter().all(Poly::is_constant)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Coeff::is_zero)
    }

    pub fn evaluate(&self, values: &BTreeMap<u32, Q>) -> Vec<Q> {
        self.coords
            .iter()
            .map(|c| {
                c.eval(&|v| Some(values.get(&v).cloned().unwrap_or_else(|| q(0))))
                    .unwrap_or_else(|| q(0))
            })
            .collect()
    }

    /// Parameters that occur in some coordinate.
    pub fn live_params(&self) -> BTreeSet<u32> {
        self.coords.iter().flat_map(|c| c.vars()).collect()
    }
}

impl fmt::Display for ParamClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, b) in self.coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            let s = self.params.show(c);
            let b = if b.contains(' ') { format!("({b})") } else { b.clone() };
            if c.num_terms() == 1 && !s.contains(' ') {
                if s == "1" {
                    parts.push(b);
                } else {
                    parts.push(format!("{s}*{b}"));
                }
            } else {
                parts.push(format!("({s})*{b}"));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, p) in parts.iter().enumerate() {
            match (i, p.strip_prefix('-')) {
                (0, _) => write!(f, "{p}")?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {p}")?,
            }
        }
        Ok(())
    }
}

/// What happened at one extension stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub generator: String,
    /// Fresh parameters introduced for the cycles of the source degree.
    pub parameters: usize,
    /// Consistency conditions, as text, before solving.
    pub conditions: Vec<String>,
    /// Parameters fixed by the conditions, as `name = value`.
    pub solved: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BracketSet {
    /// No extension exists; `generator` is the first stage that cannot be
    /// solved for any choice made so far.
    Empty {
        generator: String,
        log: Vec<StageRecord>,
    },
    Class {
        class: ParamClass,
        log: Vec<StageRecord>,
    },
}

impl BracketSet {
    pub fn class(&self) -> Option<&ParamClass> {
        match self {
            BracketSet::Class { class, .. } => Some(class),
            BracketSet::Empty { .. } => None,
        }
    }

    pub fn log(&self) -> &[StageRecord] {
        match self {
            BracketSet::Class { log, .. } | BracketSet::Empty { log, .. } => log,
        }
    }
}

/// How consistency conditions between stages are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conditions {
    /// Solve them; the result describes genuine extensions.
    Solve,
    /// Record them but keep every parameter free. Diagnostic only: the
    /// resulting values need not come from extensions.
    Ignore,
}

fn param_label(k: usize, word: &[usize], j: usize, count: usize) -> String {
    if count == 1 {
        format!("l{}", word_label(k, word))
    } else {
        format!("l{}_{}", word_label(k, word), j)
    }
}

/// Computes the bracket set of classes given by representative cycles of
/// degrees `n_i − 1`.
pub fn bracket_set<T: DglTarget>(
    engine: &Dgl<T>,
    classes: &[(Degree, LinComb<T::Key, Q>)],
    mode: Conditions,
) -> Result<BracketSet> {
    extension_family(engine, classes, mode).map(|f| f.set)
}

/// The general extension found while computing a bracket set: images of the
/// model generators, keyed by index word, and the image of `w`.
#[derive(Clone, Debug)]
pub struct ExtensionFamily<K: Ord> {
    pub set: BracketSet,
    pub images: BTreeMap<Vec<usize>, LinComb<K, Poly>>,
    pub attaching_image: Option<LinComb<K, Poly>>,
}

pub fn extension_family<T: DglTarget>(
    engine: &Dgl<T>,
    classes: &[(Degree, LinComb<T::Key, Q>)],
    mode: Conditions,
) -> Result<ExtensionFamily<T::Key>> {
    let target = engine.target();
    let dims: Vec<Degree> = classes.iter().map(|(d, _)| d + 1).collect();
    check_dims(&dims)?;
    let k = dims.len();
    let total: Degree = dims.iter().sum();
    if total - 1 > target.truncation() {
        return Err(Error::TruncationTooLow {
            needed: total - 1,
            truncation: target.truncation(),
        });
    }
    let terms = all_terms(&dims)?;
    let mut phi: BTreeMap<Vec<usize>, LinComb<T::Key, Poly>> = BTreeMap::new();
    for (i, (d, rep)) in classes.iter().enumerate() {
        for (key, _) in rep.iter() {
            if target.key_degree(key) != *d {
                return Err(Error::Inhomogeneous {
                    first: *d,
                    second: target.key_degree(key),
                });
            }
        }
        if !apply_d(target, rep).is_zero() {
            return Err(Error::NotACycle);
        }
        phi.insert(vec![i], rep.lift());
    }
    let mut params = ParamNames::default();
    let mut log = Vec::new();
    let mut solved_all: Vec<(u32, Poly)> = Vec::new();
    for word in proper_words(k).into_iter().filter(|w| w.len() >= 2) {
        let generator = format!("u{}", word_label(k, &word));
        let degree = word.iter().map(|&i| dims[i]).sum::<Degree>() - 1;
        let image = sum_of_brackets(target, &phi, &terms[&word]);
        if mode == Conditions::Solve && !apply_d(target, &image).is_zero() {
            return Err(Error::Invalid(format!(
                "image of the differential of {generator} is not a cycle"
            )));
        }
        let above = engine.piece(degree)?;
        let red = above.image_echelon.reduce(&image);
        let particular = crate::linalg::expand(&red.combo, &above.basis);
        let conditions: Vec<Poly> = red.remainder.iter().map(|(_, p)| p.clone()).collect();
        let mut record = StageRecord {
            generator: generator.clone(),
            parameters: above.cycles.len(),
            conditions: conditions.iter().map(|c| params.show(c)).collect(),
            solved: Vec::new(),
        };
        let mut solved = Vec::new();
        if mode == Conditions::Solve {
            match eliminate(&conditions, &BTreeSet::new()) {
                Elimination::Inconsistent(_) => {
                    log.push(record);
                    return Ok(ExtensionFamily {
                        set: BracketSet::Empty { generator, log },
                        images: phi,
                        attaching_image: None,
                    });
                }
                Elimination::Reduced { solved: s, residual } => {
                    if !residual.is_empty() {
                        return Err(Error::Undecided(format!(
                            "extension over {generator} needs {} non-linear conditions: {}",
                            residual.len(),
                            residual.iter().map(|p| params.show(p)).collect::<Vec<_>>().join(", ")
                        )));
                    }
                    solved = s;
                }
            }
        }
        let mut value = particular;
        let count = above.cycles.len();
        for (j, z) in above.cycles.iter().enumerate() {
            let p = params.fresh(param_label(k, &word, j, count));
            for (key, c) in z.iter() {
                value.add_term_ref(key, &Poly::var(p).scaled(c));
            }
        }
        phi.insert(word.clone(), value);
        if !solved.is_empty() {
            for v in phi.values_mut() {
                *v = v.map_coeffs(|c| apply_solution(c, &solved));
            }
            for (v, e) in &solved {
                record.solved.push(format!("{} = {}", params.name(*v), params.show(e)));
            }
            solved_all.extend(solved);
        }
        log.push(record);
    }
    let full: Vec<usize> = (0..k).collect();
    let value = sum_of_brackets(target, &phi, &terms[&full]);
    let h = engine.homology(total - 2)?;
    let coords = h.class_of(&value)?;
    let basis = h.representatives.iter().map(|r| target.show(r)).collect();
    Ok(ExtensionFamily {
        set: BracketSet::Class {
            class: ParamClass {
                degree: total - 2,
                coords,
                basis,
                params,
            },
            log,
        },
        images: phi,
        attaching_image: Some(value),
    })
}

fn sum_of_brackets<T: DglTarget>(
    target: &T,
    phi: &BTreeMap<Vec<usize>, LinComb<T::Key, Poly>>,
    terms: &[Term],
) -> LinComb<T::Key, Poly> {
    let mut out = LinComb::zero();
    for t in terms {
        let b = bracket(target, &phi[&t.left], &phi[&t.right]);
        out.add_scaled(&b, &q(t.sign as i64));
    }
    out
}

/// A graded Lie algebra given by a table of binary brackets (and optionally
/// a unary differential), viewed as a DGL target.
#[derive(Clone, Debug)]
pub struct LieTable {
    structure: LInfStructure,
    truncation: Degree,
}

impl LieTable {
    pub fn new(structure: LInfStructure) -> Result<Self> {
        if structure.arity_bound() > 2 {
            return Err(Error::Refused(
                "brackets of arity three or more do not define a DGL".into(),
            ));
        }
        let truncation = structure
            .complete_through()
            .unwrap_or_else(|| structure.degrees().iter().copied().max().unwrap_or(0));
        Ok(LieTable { structure, truncation })
    }

    pub fn structure(&self) -> &LInfStructure {
        &self.structure
    }
}

impl DglTarget for LieTable {
    type Key = usize;

    fn truncation(&self) -> Degree {
        self.truncation
    }

    fn key_degree(&self, k: &usize) -> Degree {
        self.structure.degree(*k)
    }

    fn piece_basis(&self, degree: Degree) -> Result<Vec<LinComb<usize, Q>>> {
        if degree > self.truncation {
            return Err(Error::DegreeOverflow {
                degree,
                truncation: self.truncation,
            });
        }
        Ok((0..self.structure.dim())
            .filter(|&i| self.structure.degree(i) == degree)
            .map(|i| LinComb::term(i, q(1)))
            .collect())
    }

    fn d_key(&self, k: &usize) -> LinComb<usize, Q> {
        self.structure.bracket(&[*k])
    }

    fn bracket_keys(&self, a: &usize, b: &usize) -> LinComb<usize, Q> {
        self.structure.bracket(&[*a, *b])
    }

    fn show(&self, v: &LinComb<usize, Q>) -> String {
        show_combination(v.iter().map(|(i, c)| (c.clone(), self.structure.name(*i).to_string())))
    }
}

/// Renders `Σ c·label` as `a - 2*b`.
pub fn show_combination(terms: impl Iterator<Item = (Q, String)>) -> String {
    let mut out = String::new();
    for (i, (c, label)) in terms.filter(|(c, _)| !Coeff::is_zero(c)).enumerate() {
        let neg = c < q(0);
        let mag = if neg { -c } else { c };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != q(1) {
            out.push_str(&format!("{}*", crate::scalar::fmt_q(&mag)));
        }
        out.push_str(&label);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// The homology of a DGL as a graded Lie algebra with zero differential,
/// through a given degree.
#[derive(Clone, Debug)]
pub struct HomologyLie<K: Ord> {
    pub structure: LInfStructure,
    pub representatives: Vec<LinComb<K, Q>>,
    offsets: BTreeMap<Degree, usize>,
}

impl<K: Ord + Clone> HomologyLie<K> {
    /// Index range of the basis of `H_degree`.
    pub fn range(&self, degree: Degree) -> std::ops::Range<usize> {
        let start = self.offsets.get(&degree).copied().unwrap_or(0);
        let end = self
            .offsets
            .range(degree + 1..)
            .next()
            .map(|(_, &o)| o)
            .unwrap_or(self.representatives.len());
        if self.offsets.contains_key(&degree) {
            start..end
        } else {
            0..0
        }
    }

    pub fn table(&self) -> Result<LieTable> {
        LieTable::new(self.structure.clone())
    }
}

/// Homology classes and their brackets through `max_degree`. Basis vectors
/// are named by their representatives.
pub fn homology_lie<T: DglTarget>(engine: &Dgl<T>, max_degree: Degree) -> Result<HomologyLie<T::Key>> {
    let target = engine.target();
    let mut basis = Vec::new();
    let mut reps = Vec::new();
    let mut offsets = BTreeMap::new();
    let mut data = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for d in 1..=max_degree {
        let h = engine.homology(d)?;
        offsets.insert(d, reps.len());
        for (i, r) in h.representatives.iter().enumerate() {
            let mut label = target.show(r);
            if !seen.insert(label.clone()) {
                label = format!("h{d}_{i}");
                seen.insert(label.clone());
            }
            basis.push((label, d));
            reps.push(r.clone());
        }
        data.insert(d, h);
    }
    let mut structure = LInfStructure::new(basis)?.with_complete_through(Some(max_degree));
    let degrees = structure.degrees().to_vec();
    for i in 0..reps.len() {
        for j in i..reps.len() {
            let d = degrees[i] + degrees[j];
            if d > max_degree {
                continue;
            }
            let b = bracket(target, &reps[i], &reps[j]);
            if b.is_zero() {
                continue;
            }
            let coords = data[&d].class_of(&b)?;
            let off = offsets[&d];
            let v: LinComb<usize, Q> = coords.into_iter().enumerate().map(|(t, c)| (off + t, c)).collect();
            structure.set_bracket(&[i, j], v)?;
        }
    }
    Ok(HomologyLie {
        structure,
        representatives: reps,
        offsets,
    })
}

/// Coordinates of a cycle's class in a [`HomologyLie`] basis.
pub fn homology_class<T: DglTarget>(
    engine: &Dgl<T>,
    hl: &HomologyLie<T::Key>,
    cycle: &LinComb<T::Key, Q>,
    degree: Degree,
) -> Result<LinComb<usize, Q>> {
    let coords = engine.homology(degree)?.class_of(cycle)?;
    let off = hl.range(degree).start;
    Ok(coords.into_iter().enumerate().map(|(t, c)| (off + t, c)).collect())
}

/// Size of a bracket set.
#[derive(Clone, Debug, PartialEq)]
pub enum Cardinality {
    Empty,
    Singleton(Vec<Q>),
    /// Several parameter choices with pairwise distinct values.
    Infinite {
        witnesses: Vec<(BTreeMap<u32, Q>, Vec<Q>)>,
    },
}

impl Cardinality {
    pub fn kind(&self) -> &'static str {
        match self {
            Cardinality::Empty => "empty",
            Cardinality::Singleton(_) => "singleton",
            Cardinality::Infinite { .. } => "infinite",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroMembership {
    Yes(BTreeMap<u32, Q>),
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub cardinality: Cardinality,
    pub zero: ZeroMembership,
}

const LINE: u32 = u32::MAX;

/// Restricts the class to the line `t ↦ t·r` in parameter space.
fn restrict_to_line(class: &ParamClass, vars: &BTreeSet<u32>, r: &dyn Fn(u32) -> i64) -> Vec<Poly> {
    class
        .coords
        .iter()
        .map(|c| {
            let mut p = c.clone();
            for &v in vars {
                let value = Poly::var(LINE).scaled(&q(r(v)));
                p = p.substitute(v, &value).unwrap_or_default();
            }
            p
        })
        .collect()
}

fn infinite_witnesses(class: &ParamClass) -> Vec<(BTreeMap<u32, Q>, Vec<Q>)> {
    let vars = class.live_params();
    let directions: [&dyn Fn(u32) -> i64; 4] =
        [&|_| 1, &|v| v as i64 + 1, &|v| (v as i64 + 1) * (v as i64 + 1), &|v| {
            if v % 2 == 0 {
                1
            } else {
                -2
            }
        }];
    for r in directions {
        let line = restrict_to_line(class, &vars, r);
        let top = line.iter().map(|p| p.total_degree()).max().unwrap_or(0);
        if line.iter().all(Poly::is_constant) {
            continue;
        }
        let mut found: Vec<(BTreeMap<u32, Q>, Vec<Q>)> = Vec::new();
        for t in 0..=(3 * top as i64 + 3) {
            let values: Vec<Q> = line
                .iter()
                .map(|p| p.eval(&|_| Some(q(t))).unwrap_or_else(|| q(0)))
                .collect();
            if found.iter().any(|(_, v)| *v == values) {
                continue;
            }
            let point = vars.iter().map(|&v| (v, q(t * r(v)))).collect();
            found.push((point, values));
            if found.len() == 3 {
                return found;
            }
        }
    }
    Vec::new()
}

fn zero_membership(class: &ParamClass) -> ZeroMembership {
    let zeros: BTreeMap<u32, Q> = class.live_params().into_iter().map(|v| (v, q(0))).collect();
    if class.evaluate(&zeros).iter().all(Coeff::is_zero) {
        return ZeroMembership::Yes(zeros);
    }
    let eqs: Vec<Poly> = class.coords.iter().filter(|c| !c.is_zero()).cloned().collect();
    match eliminate(&eqs, &BTreeSet::new()) {
        Elimination::Inconsistent(_) => ZeroMembership::No,
        Elimination::Reduced { solved, residual } => {
            let mut values = if residual.is_empty() {
                BTreeMap::new()
            } else {
                match search_zero(&residual, &BTreeSet::new(), 20, 200_000) {
                    Some(v) => v,
                    None => return ZeroMembership::Unknown,
                }
            };
            let partial: Vec<(u32, Poly)> = solved.iter().map(|(v, e)| (*v, e.partial_eval(&values))).collect();
            for (v, x) in specialize(&partial, &q(0)) {
                values.entry(v).or_insert(x);
            }
            for v in class.live_params() {
                values.entry(v).or_insert_with(|| q(0));
            }
            if class.evaluate(&values).iter().all(Coeff::is_zero) {
                ZeroMembership::Yes(values)
            } else {
                ZeroMembership::Unknown
            }
        }
    }
}

pub fn classify(set: &BracketSet) -> Classification {
    match set {
        BracketSet::Empty { .. } => Classification {
            cardinality: Cardinality::Empty,
            zero: ZeroMembership::No,
        },
        BracketSet::Class { class, .. } => {
            let cardinality = if class.is_constant() {
                Cardinality::Singleton(class.evaluate(&BTreeMap::new()))
            } else {
                Cardinality::Infinite {
                    witnesses: infinite_witnesses(class),
                }
            };
            Classification {
                cardinality,
                zero: zero_membership(class),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Zero is not in the bracket set of the DGL.
    NotFormalZero,
    /// The bracket sets of the DGL and of its homology differ in size.
    NotFormalCardinality,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NotFormalZero => write!(f, "NOT_FORMAL(1)"),
            Verdict::NotFormalCardinality => write!(f, "NOT_FORMAL(2)"),
            Verdict::Inconclusive => write!(f, "INCONCLUSIVE"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FormalityReport {
    pub verdict: Verdict,
    pub in_dgl: BracketSet,
    pub in_homology: BracketSet,
    pub dgl_class: Classification,
    pub homology_class: Classification,
}

/// Compares the bracket set of `classes` in `l` with the one of their
/// classes in the homology of `l`.
pub fn formality_obstruction(l: &DglPresentation, classes: &[LieExpr]) -> Result<FormalityReport> {
    if classes.len() < 3 {
        return Err(Error::Refused(
            "the criteria compare brackets of at least three classes".into(),
        ));
    }
    let engine = Dgl::new(l.clone());
    let reps = representatives(l, classes)?;
    let in_dgl = bracket_set(&engine, &reps, Conditions::Solve)?;
    if matches!(in_dgl, BracketSet::Empty { .. }) {
        return Err(Error::Invalid(
            "the bracket set is empty, so neither criterion applies".into(),
        ));
    }
    let hl = homology_lie(&engine, l.generators().truncation() - 1)?;
    let h_engine = Dgl::new(hl.table()?);
    let h_reps = reps
        .iter()
        .map(|(d, r)| Ok((*d, homology_class(&engine, &hl, r, *d)?)))
        .collect::<Result<Vec<_>>>()?;
    let in_homology = bracket_set(&h_engine, &h_reps, Conditions::Solve)?;
    let dgl_class = classify(&in_dgl);
    let homology_class = classify(&in_homology);
    let verdict = if dgl_class.zero == ZeroMembership::No {
        Verdict::NotFormalZero
    } else if dgl_class.cardinality.kind() != homology_class.cardinality.kind() {
        Verdict::NotFormalCardinality
    } else {
        Verdict::Inconclusive
    };
    Ok(FormalityReport {
        verdict,
        in_dgl,
        in_homology,
        dgl_class,
        homology_class,
    })
}

/// Expands class representatives and checks homogeneity.
pub fn representatives(l: &DglPresentation, classes: &[LieExpr]) -> Result<Vec<(Degree, Tensor)>> {
    classes
        .iter()
        .map(|e| {
            let t = l.lie().expand_to_tensor(e)?;
            let Some((w, _)) = t.first() else {
                return Err(Error::Invalid(format!("representative {e} is zero")));
            };
            Ok((l.generators().word_degree(w), t))
        })
        .collect()
}

/// The 19-generator model of four 3-spheres, a 6-sphere and three 9-cells
/// attached along `[z, v_j]`, `j = 2, 3, 4`.
pub fn nine_cell_model(truncation: Degree) -> Result<DglPresentation> {
    let dims = [3, 3, 3, 3];
    let terms = all_terms(&dims)?;
    let name = |w: &[usize]| format!("v{}", word_label(4, w));
    let mut gens: Vec<(String, Degree)> = Vec::new();
    let mut words = proper_words(4);
    words.push(vec![0, 1, 2, 3]);
    for w in &words {
        gens.push((name(w), 3 * w.len() as Degree - 1));
    }
    gens.push(("z".into(), 5));
    for g in ["a", "b", "c"] {
        gens.push((g.into(), 8));
    }
    let mut diffs: Vec<(String, LieExpr)> = words
        .iter()
        .filter(|w| w.len() >= 2)
        .map(|w| (name(w), terms_to_expr(&terms[w], name)))
        .collect();
    for (g, v) in [("a", "v2"), ("b", "v3"), ("c", "v4")] {
        diffs.push((
            g.into(),
            LieExpr::tree(LieTree::bracket(LieTree::leaf("z"), LieTree::leaf(v))),
        ));
    }
    DglPresentation::new(GeneratorSet::new(gens, truncation)?, diffs)
}

/// Quillen model of the complex projective plane: `∂b = [a,a]`, `|a| = 1`.
pub fn projective_plane_model(truncation: Degree) -> Result<DglPresentation> {
    let gens = GeneratorSet::new(vec![("a".into(), 1), ("b".into(), 3)], truncation)?;
    DglPresentation::new(
        gens,
        vec![(
            "b".into(),
            LieExpr::tree(LieTree::bracket(LieTree::leaf("a"), LieTree::leaf("a"))),
        )],
    )
}
