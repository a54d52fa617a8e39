//! Free graded-commutative algebras with differentials, their duality with
//! finite L∞ structures, the graded determinant and the pairing-based
//! readings of higher brackets, plus the intrinsic coformality test for
//! products of odd spheres.
//!
//! Elements of `ΛV` are sparse combinations of sorted generator words; a
//! word `[i, i, j]` stands for `v_i v_i v_j`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::graded::{koszul_sign, sign_pow, Degree, LinComb};
use crate::linalg::{Echelon, Inserted};
use crate::linf::{multisets, sort_with_sign, word_product, LInfStructure, SymWord};
use crate::polysolve::{eliminate, search_zero, specialize, Elimination};
use crate::scalar::{q, Coeff, ParamNames, Poly, Ring, Q};

pub type Element<C> = LinComb<SymWord, C>;

fn sign_q(s: i8) -> Q {
    q(s as i64)
}

pub fn generator<C: Ring>(i: usize) -> Element<C> {
    LinComb::term(vec![i], C::one())
}

/// Product in the free graded-commutative algebra on generators of the
/// given degrees.
pub fn multiply<C: Ring>(a: &Element<C>, b: &Element<C>, degrees: &[Degree]) -> Element<C> {
    let mut out = Element::zero();
    for (wa, ca) in a.iter() {
        for (wb, cb) in b.iter() {
            if let Some((w, s)) = word_product(wa, wb, degrees) {
                out.add_term(w, ca.mul_ref(cb).scaled(&sign_q(s)));
            }
        }
    }
    out
}

/// Extends generator images to an algebra map.
pub fn apply_morphism<C: Ring>(images: &[Element<C>], x: &Element<C>, degrees: &[Degree]) -> Element<C> {
    let mut out = Element::zero();
    for (w, c) in x.iter() {
        let mut term: Element<C> = LinComb::term(Vec::new(), c.clone());
        for &g in w {
            term = multiply(&term, &images[g], degrees);
        }
        out.add_assign(&term);
    }
    out
}

/// Extends generator images to a derivation of odd degree.
pub fn apply_derivation<C: Ring>(images: &[Element<C>], x: &Element<C>, degrees: &[Degree]) -> Element<C> {
    let mut out = Element::zero();
    for (w, c) in x.iter() {
        let mut passed: Degree = 0;
        for t in 0..w.len() {
            let before: Element<C> = LinComb::term(w[..t].to_vec(), c.scaled(&sign_q(sign_pow(passed as i64))));
            let after: Element<C> = LinComb::term(w[t + 1..].to_vec(), C::one());
            let term = multiply(&multiply(&before, &images[w[t]], degrees), &after, degrees);
            out.add_assign(&term);
            passed += degrees[w[t]];
        }
    }
    out
}

pub fn element_degree<C: Coeff>(x: &Element<C>, degrees: &[Degree]) -> Option<Degree> {
    x.first().map(|(w, _)| w.iter().map(|&g| degrees[g]).sum())
}

pub fn word_length_part<C: Coeff>(x: &Element<C>, k: usize) -> Element<C> {
    x.iter()
        .filter(|(w, _)| w.len() == k)
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect()
}

pub fn show_monomial(w: &[usize], names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .chunk_by(|&&g| g)
        .into_iter()
        .map(|(g, run)| {
            let n = run.count();
            if n == 1 {
                names[g].clone()
            } else {
                format!("{}^{n}", names[g])
            }
        })
        .join("*")
}

pub fn show_element(x: &Element<Q>, names: &[String]) -> String {
    crate::whitehead::show_combination(x.iter().map(|(w, c)| (c.clone(), show_monomial(w, names))))
}

/// Renders symbolic coefficients as `(b^2*e^-1)*y^2 + ...`.
pub fn show_symbolic(x: &Element<Poly>, names: &[String], params: &ParamNames) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.iter()
        .map(|(w, c)| format!("({})*{}", params.show(c), show_monomial(w, names)))
        .join(" + ")
}

/// `(ΛV, d)` on an ordered list of generators.
#[derive(Clone, Debug, PartialEq)]
pub struct SullivanAlgebra {
    names: Vec<String>,
    degrees: Vec<Degree>,
    differential: Vec<Element<Q>>,
}

impl SullivanAlgebra {
    /// Generators in their declared order, with `d` given per generator.
    pub fn new(generators: Vec<(String, Degree)>, differential: Vec<Element<Q>>) -> Result<Self> {
        if differential.len() != generators.len() {
            return Err(Error::LengthMismatch {
                expected: generators.len(),
                found: differential.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for (n, d) in &generators {
            if !seen.insert(n.clone()) {
                return Err(Error::DuplicateGenerator(n.clone()));
            }
            if *d <= 0 {
                return Err(Error::BadDegree {
                    generator: n.clone(),
                    expected: "generators need positive degree".into(),
                    found: *d,
                });
            }
        }
        let (names, degrees): (Vec<String>, Vec<Degree>) = generators.into_iter().unzip();
        for (i, dv) in differential.iter().enumerate() {
            for (w, _) in dv.iter() {
                if w.iter().any(|&g| g >= names.len()) {
                    return Err(Error::Invalid(format!("d({}) mentions an unknown generator", names[i])));
                }
                let deg: Degree = w.iter().map(|&g| degrees[g]).sum();
                if deg != degrees[i] + 1 {
                    return Err(Error::BadDegree {
                        generator: names[i].clone(),
                        expected: format!("its differential must have degree {}", degrees[i] + 1),
                        found: deg,
                    });
                }
                if sort_with_sign(w, &degrees, false).is_none() {
                    return Err(Error::Invalid(format!(
                        "d({}) contains a square of an odd generator",
                        names[i]
                    )));
                }
            }
        }
        Ok(SullivanAlgebra {
            names,
            degrees,
            differential,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn differential(&self, i: usize) -> &Element<Q> {
        &self.differential[i]
    }

    /// The word-length-`k` part `d_k v_i`.
    pub fn part(&self, i: usize, k: usize) -> Element<Q> {
        word_length_part(&self.differential[i], k)
    }

    pub fn d(&self, x: &Element<Q>) -> Element<Q> {
        apply_derivation(&self.differential, x, &self.degrees)
    }

    /// `d²` is a derivation, so it vanishes once it vanishes on generators.
    /// Returns the first generator where it does not.
    pub fn square_zero_violation(&self) -> Option<usize> {
        (0..self.len()).find(|&i| !self.d(&self.differential[i]).is_zero())
    }

    /// Whether `d v_i` only involves generators declared before `v_i`.
    pub fn is_triangular(&self) -> bool {
        self.differential
            .iter()
            .enumerate()
            .all(|(i, dv)| dv.iter().all(|(w, _)| w.iter().all(|&g| g < i)))
    }

    /// Whether `d` has no linear part.
    pub fn is_minimal(&self) -> bool {
        self.differential.iter().all(|dv| dv.iter().all(|(w, _)| w.len() >= 2))
    }

    /// Whether `d` is purely quadratic.
    pub fn is_quadratic(&self) -> bool {
        self.differential.iter().all(|dv| dv.iter().all(|(w, _)| w.len() == 2))
    }

    pub fn show_differential(&self, i: usize) -> String {
        show_element(&self.differential[i], &self.names)
    }
}

/// `⟨v_{m_1}⋯v_{m_k} ; sy_1 ∧ … ∧ sy_k⟩` for dual bases, with the argument
/// reversal: the word is read as `sx_k ∧ … ∧ sx_1`.
pub fn pair_monomial(monomial: &[usize], word: &[usize], degrees: &[Degree]) -> Q {
    let k = monomial.len();
    if word.len() != k {
        return q(0);
    }
    let mut total = 0i64;
    let mdeg: Vec<Degree> = monomial.iter().map(|&g| degrees[g]).collect();
    for perm in (0..k).permutations(k) {
        // factor σ(i) pairs with sx_i = sy_{k+1-i}
        if (0..k).all(|i| monomial[perm[i]] == word[k - 1 - i]) {
            total += koszul_sign(&perm, &mdeg).expect("permutation") as i64;
        }
    }
    q(total)
}

/// Pairs an element of `ΛV` with a word of `Λ sL`.
pub fn pair(x: &Element<Q>, word: &[usize], degrees: &[Degree]) -> Q {
    let mut sorted = word.to_vec();
    sorted.sort();
    x.get(&sorted)
        .map(|c| c * pair_monomial(&sorted, word, degrees))
        .unwrap_or_else(|| q(0))
}

/// Sign relating `d_k` and `ℓ_k` through the pairing:
/// `(−1)^{|v| + Σ_{j<k} (k−j)|x_j|}`.
pub fn pairing_sign(v_degree: Degree, arg_degrees: &[Degree]) -> i8 {
    let k = arg_degrees.len();
    let e: i64 = v_degree as i64
        + arg_degrees[..k.saturating_sub(1)]
            .iter()
            .enumerate()
            .map(|(j, &d)| (k - 1 - j) as i64 * d as i64)
            .sum::<i64>();
    sign_pow(e)
}

/// The algebra dual to Quillen chains: generators dual to `sx_i`, in the
/// basis order of `l`.
pub fn dualize(l: &LInfStructure) -> Result<SullivanAlgebra> {
    if l.degrees().iter().any(|&d| d < 0) {
        return Err(Error::NegativeDegree);
    }
    let vdeg = l.suspended_degrees();
    let n = l.dim();
    let mut differential = vec![Element::zero(); n];
    for (&k, table) in l.tables() {
        for (args, value) in table {
            let mut sorted = args.clone();
            sorted.sort();
            let Some((_, s)) = sort_with_sign(args, l.degrees(), true) else {
                continue;
            };
            if sort_with_sign(&sorted, &vdeg, false).is_none() {
                continue;
            }
            let value = value.scaled(&sign_q(s));
            let arg_deg: Vec<Degree> = sorted.iter().map(|&a| l.degree(a)).collect();
            let norm = pair_monomial(&sorted, &sorted, &vdeg);
            for (i, c) in value.iter() {
                let eps = pairing_sign(vdeg[*i], &arg_deg);
                let lambda = c * sign_q(eps) / norm.clone();
                differential[*i].add_term(sorted.clone(), lambda);
            }
            debug_assert_eq!(k, sorted.len());
        }
    }
    let gens = l.names().iter().cloned().zip(vdeg.iter().copied()).collect();
    SullivanAlgebra::new(gens, differential)
}

/// Reads the brackets back off a differential through the pairing.
pub fn brackets_of(s: &SullivanAlgebra) -> Result<LInfStructure> {
    let ldeg: Vec<Degree> = s.degrees().iter().map(|d| d - 1).collect();
    let mut l = LInfStructure::new(s.names().iter().cloned().zip(ldeg.iter().copied()).collect())?;
    let mut tables: BTreeMap<SymWord, LinComb<usize, Q>> = BTreeMap::new();
    for i in 0..s.len() {
        for (w, _) in s.differential(i).iter() {
            let arg_deg: Vec<Degree> = w.iter().map(|&a| ldeg[a]).collect();
            let eps = pairing_sign(s.degrees()[i], &arg_deg);
            let value = pair(s.differential(i), w, s.degrees()) * sign_q(eps);
            tables.entry(w.clone()).or_default().add_term(i, value);
        }
    }
    for (w, v) in tables {
        l.set_bracket(&w, v)?;
    }
    Ok(l)
}

/// Parity of `Σ_{i<r} Σ_{j<σ⁻¹(i), σ(j)>i} n_i n_{σ(j)}` (0-based).
pub fn permutation_sign(perm: &[usize], degrees: &[Degree]) -> i8 {
    let r = perm.len();
    let mut inv = vec![0; r];
    for (j, &p) in perm.iter().enumerate() {
        inv[p] = j;
    }
    let mut e = 0i64;
    for i in 0..r.saturating_sub(1) {
        for j in 0..inv[i] {
            if perm[j] > i {
                e += degrees[i] as i64 * degrees[perm[j]] as i64;
            }
        }
    }
    sign_pow(e)
}

/// The graded determinant `Σ_σ ε_σ a_{1σ(1)} ⋯ a_{rσ(r)}`, the entry
/// `a_{ij}` carrying a symbol of degree `degrees[j]`.
pub fn graded_det(a: &[Vec<Q>], degrees: &[Degree]) -> Result<Q> {
    let r = a.len();
    if degrees.len() != r {
        return Err(Error::LengthMismatch {
            expected: r,
            found: degrees.len(),
        });
    }
    if let Some(row) = a.iter().find(|row| row.len() != r) {
        return Err(Error::LengthMismatch {
            expected: r,
            found: row.len(),
        });
    }
    let mut total = q(0);
    for perm in (0..r).permutations(r) {
        let mut term = sign_q(permutation_sign(&perm, degrees));
        for (i, &p) in perm.iter().enumerate() {
            if Coeff::is_zero(&a[i][p]) {
                term = q(0);
                break;
            }
            term *= &a[i][p];
        }
        total += term;
    }
    Ok(total)
}

/// Homogeneous degree of an element of `sL` (0 for the zero vector).
fn suspended_degree(x: &LinComb<usize, Q>, sdeg: &[Degree]) -> Result<Degree> {
    let mut found: Option<Degree> = None;
    for (i, _) in x.iter() {
        match found {
            None => found = Some(sdeg[*i]),
            Some(d) if d != sdeg[*i] => {
                return Err(Error::Inhomogeneous {
                    first: d,
                    second: sdeg[*i],
                })
            }
            _ => {}
        }
    }
    Ok(found.unwrap_or(0))
}

/// `ρ(Φ)` for classes `x_1, …, x_r` of `L` (coordinates in the basis dual to
/// the generators). Components of word length above `r` are ignored.
pub fn rho(phi: &Element<Q>, degrees: &[Degree], classes: &[LinComb<usize, Q>]) -> Result<Q> {
    let r = classes.len();
    if let Some((w, _)) = phi.iter().find(|(w, _)| w.len() < r) {
        return Err(Error::Refused(format!(
            "ρ is only defined on words of length ≥ {r}; found a component of length {}",
            w.len()
        )));
    }
    let n: Vec<Degree> = classes
        .iter()
        .map(|x| suspended_degree(x, degrees))
        .collect::<Result<_>>()?;
    let mut total = q(0);
    for (w, lambda) in phi.iter().filter(|(w, _)| w.len() == r) {
        let a: Vec<Vec<Q>> = w
            .iter()
            .map(|&i| classes.iter().map(|x| x.coeff(&i)).collect())
            .collect();
        total += lambda * graded_det(&a, &n)?;
    }
    Ok(total)
}

/// Both readings of the pairing of `v` with a member of `[x_1, …, x_r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingReport {
    /// Generator names in the order used to expand `dv`.
    pub basis: Vec<String>,
    /// `⟨v ; sx⟩` for the supplied member `x`.
    pub member: Q,
    /// `ε ⟨v ; sℓ_r(x_1, …, x_r)⟩`.
    pub bracket_form: Q,
    /// `(−1)^α ρ(dv)` with `α = Σ_{i<j} n_i n_j`.
    pub determinant_form: Q,
    pub epsilon: i8,
    pub alpha_sign: i8,
    /// `⟨d_r v ; sx_1 ∧ … ∧ sx_r⟩`, which the pairing relates to both forms.
    pub pairing_of_part: Q,
    pub rho: Q,
}

impl PairingReport {
    pub fn bracket_form_holds(&self) -> bool {
        self.member == self.bracket_form
    }

    pub fn determinant_form_holds(&self) -> bool {
        self.member == self.determinant_form
    }

    pub fn forms_agree(&self) -> bool {
        self.bracket_form == self.determinant_form
    }
}

/// Compares `⟨v ; sx⟩` with `ε⟨v ; sℓ_r(x_1,…,x_r)⟩` and with `(−1)^α ρ(dv)`.
/// `s` must be the dual of `l`. Refused unless `dv` lies in `Λ^{≥r}V`; the
/// equality without that hypothesis needs an adapted retract and is not
/// checked here.
pub fn pairing_check(
    l: &LInfStructure,
    s: &SullivanAlgebra,
    v: usize,
    classes: &[LinComb<usize, Q>],
    member: &LinComb<usize, Q>,
) -> Result<PairingReport> {
    let r = classes.len();
    if r == 0 {
        return Err(Error::Invalid("at least one class is needed".into()));
    }
    let dv = s.differential(v);
    if let Some((w, _)) = dv.iter().find(|(w, _)| w.len() < r) {
        return Err(Error::Refused(format!(
            "d{} has a component {} of word length {} < {r}; without dv in Λ^(≥{r})V the \
             equality needs a homotopy retract adapted to the member",
            s.names()[v],
            show_monomial(w, s.names()),
            w.len()
        )));
    }
    let sdeg = s.degrees();
    let n: Vec<Degree> = classes
        .iter()
        .map(|x| suspended_degree(x, sdeg))
        .collect::<Result<_>>()?;
    let total: Degree = n.iter().sum();
    if sdeg[v] != total - 1 {
        return Err(Error::BadDegree {
            generator: s.names()[v].clone(),
            expected: format!("the classes require degree {}", total - 1),
            found: sdeg[v],
        });
    }
    let member_deg = suspended_degree(member, sdeg)?;
    if !member.is_zero() && member_deg != sdeg[v] {
        return Err(Error::BadDegree {
            generator: "member".into(),
            expected: format!("the member must have degree {}", sdeg[v]),
            found: member_deg,
        });
    }
    let arg_deg: Vec<Degree> = n.iter().map(|d| d - 1).collect();
    let epsilon = pairing_sign(sdeg[v], &arg_deg);
    let refs: Vec<&LinComb<usize, Q>> = classes.iter().collect();
    let bracket_form = l.eval(&refs).coeff(&v) * sign_q(epsilon);
    let alpha: i64 = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .map(|(i, j)| n[i] as i64 * n[j] as i64)
        .sum();
    let alpha_sign = sign_pow(alpha);
    let rho_value = rho(dv, sdeg, classes)?;
    let part = s.part(v, r);
    let pairing_of_part = multilinear_pairing(&part, classes, sdeg);
    Ok(PairingReport {
        basis: s.names().to_vec(),
        member: member.coeff(&v),
        bracket_form,
        determinant_form: rho_value.clone() * sign_q(alpha_sign),
        epsilon,
        alpha_sign,
        pairing_of_part,
        rho: rho_value,
    })
}

/// `⟨Φ ; sx_1 ∧ … ∧ sx_r⟩` extended multilinearly in the classes.
pub fn multilinear_pairing(phi: &Element<Q>, classes: &[LinComb<usize, Q>], degrees: &[Degree]) -> Q {
    let mut total = q(0);
    let mut idx = Vec::new();
    fn go(
        phi: &Element<Q>,
        classes: &[LinComb<usize, Q>],
        degrees: &[Degree],
        idx: &mut Vec<usize>,
        coeff: Q,
        total: &mut Q,
    ) {
        if idx.len() == classes.len() {
            *total += coeff * pair(phi, idx, degrees);
            return;
        }
        for (i, c) in classes[idx.len()].iter() {
            idx.push(*i);
            go(phi, classes, degrees, idx, coeff.clone() * c, total);
            idx.pop();
        }
    }
    go(phi, classes, degrees, &mut idx, q(1), &mut total);
    total
}

/// Lower central series of an L∞ structure: `Γ^k` is spanned by iterated
/// brackets (at least one bracket) with at least `k` arguments from `L`.
#[derive(Clone, Debug)]
pub struct CentralSeries {
    /// Bases of `Γ^1, Γ^2, …` as computed.
    pub terms: Vec<Vec<LinComb<usize, Q>>>,
    /// The series reached zero; otherwise it stopped on a run of equal
    /// terms.
    pub stable: bool,
}

fn span_basis(vectors: impl IntoIterator<Item = LinComb<usize, Q>>) -> Vec<LinComb<usize, Q>> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for v in vectors {
        if v.is_zero() {
            continue;
        }
        if ech.insert(v.clone(), out.len()) == Inserted::Pivot {
            out.push(v);
        }
    }
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn lower_central_series(l: &LInfStructure, max_steps: usize) -> CentralSeries {
    let all: Vec<LinComb<usize, Q>> = (0..l.dim()).map(|i| LinComb::term(i, q(1))).collect();
    let arity = l.arity_bound();
    let mut terms: Vec<Vec<LinComb<usize, Q>>> = Vec::new();
    // weight m ≥ 1 elements: L itself for m = 1, Γ^m after that
    let weight = |terms: &Vec<Vec<LinComb<usize, Q>>>, m: usize| -> Vec<LinComb<usize, Q>> {
        if m <= 1 {
            all.clone()
        } else {
            terms[m - 1].clone()
        }
    };
    let mut stable = false;
    for k in 1..=max_steps {
        let mut gens = Vec::new();
        for j in 2..=arity {
            for parts in compositions(k.max(j), j) {
                let spaces: Vec<Vec<LinComb<usize, Q>>> = parts.iter().map(|&m| weight(&terms, m)).collect();
                for choice in spaces.iter().map(|s| s.iter()).multi_cartesian_product() {
                    gens.push(l.eval(&choice));
                }
            }
        }
        let mut basis = span_basis(gens);
        if k == 1 {
            basis = span_basis(basis.into_iter().chain(all.iter().map(|x| l.eval(&[x]))));
        }
        // close under ℓ₁
        loop {
            let before = basis.len();
            let images: Vec<_> = basis.iter().map(|x| l.eval(&[x])).collect();
            basis = span_basis(basis.into_iter().chain(images));
            if basis.len() == before {
                break;
            }
        }
        terms.push(basis);
        if terms.last().unwrap().is_empty() {
            stable = true;
            break;
        }
        // a run of equal terms longer than the arity is taken as stable
        let run = arity.max(2) + 1;
        if terms.len() > run
            && terms[terms.len() - 1 - run..]
                .iter()
                .all(|t| t.len() == terms.last().unwrap().len())
        {
            break;
        }
    }
    CentralSeries { terms, stable }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SullivanVerdict {
    /// An ordered basis along which every bracket lands strictly later.
    Yes { basis: Vec<LinComb<usize, Q>> },
    /// The series does not die in this degree.
    No { degree: Degree },
}

pub fn is_sullivan(l: &LInfStructure) -> SullivanVerdict {
    let steps = 4 * (l.dim() + 1) * l.arity_bound().max(2);
    let series = lower_central_series(l, steps);
    if let Some(last) = series.terms.last() {
        if let Some(x) = last.first() {
            let (i, _) = x.first().expect("nonzero");
            return SullivanVerdict::No { degree: l.degree(*i) };
        }
    }
    // adapted basis: deeper terms of the series last, higher degrees first
    // within a layer
    let mut chosen: Vec<(usize, LinComb<usize, Q>)> = Vec::new();
    let mut ech = Echelon::new();
    let layers = series.terms.len();
    for m in (0..=layers).rev() {
        let space: Vec<LinComb<usize, Q>> = if m == 0 {
            (0..l.dim()).map(|i| LinComb::term(i, q(1))).collect()
        } else {
            series.terms[m - 1].clone()
        };
        for v in space {
            if ech.insert(v.clone(), chosen.len()) == Inserted::Pivot {
                chosen.push((m, v));
            }
        }
    }
    let degree_of = |v: &LinComb<usize, Q>| l.degree(*v.first().expect("nonzero").0);
    chosen.sort_by(|(ma, a), (mb, b)| ma.cmp(mb).then(degree_of(b).cmp(&degree_of(a))));
    SullivanVerdict::Yes {
        basis: chosen.into_iter().map(|(_, v)| v).collect(),
    }
}

/// Checks that every bracket of basis elements lies in the span of the
/// elements after the largest argument.
pub fn check_ordered_basis(l: &LInfStructure, basis: &[LinComb<usize, Q>]) -> Result<bool> {
    let mut ech = Echelon::new();
    for (t, v) in basis.iter().enumerate() {
        if ech.insert(v.clone(), t) != Inserted::Pivot {
            return Err(Error::Invalid("ordered basis is not independent".into()));
        }
    }
    if ech.rank() != l.dim() {
        return Err(Error::Invalid("ordered basis does not span".into()));
    }
    for k in 1..=l.arity_bound() {
        for args in multisets(basis.len(), k) {
            let refs: Vec<&LinComb<usize, Q>> = args.iter().map(|&a| &basis[a]).collect();
            let value = l.eval(&refs);
            let top = *args.iter().max().expect("nonempty");
            let red = ech.reduce(&value);
            if red.combo.iter().any(|(t, c)| *t <= top && !Coeff::is_zero(c)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A graded algebra endomorphism with symbolic coefficients, triangular in
/// the generator order.
#[derive(Clone, Debug)]
pub struct AutomorphismFamily {
    pub params: ParamNames,
    pub nonzero: BTreeSet<u32>,
    pub images: Vec<Element<Poly>>,
}

impl AutomorphismFamily {
    pub fn identity(n: usize) -> Self {
        AutomorphismFamily {
            params: ParamNames::default(),
            nonzero: BTreeSet::new(),
            images: (0..n).map(generator).collect(),
        }
    }

    /// Checks triangularity with invertible diagonal and returns the
    /// diagonal entries.
    fn diagonal(&self, degrees: &[Degree]) -> Result<Vec<Poly>> {
        let mut diag = Vec::new();
        for (i, img) in self.images.iter().enumerate() {
            if let Some(d) = element_degree(img, degrees) {
                if d != degrees[i] {
                    return Err(Error::NotInvertible(format!(
                        "image of generator {i} has degree {d}, expected {}",
                        degrees[i]
                    )));
                }
            }
            let mut lead = None;
            for (w, c) in img.iter() {
                if w == &vec![i] {
                    lead = Some(c.clone());
                } else if w.iter().any(|&g| g >= i) {
                    return Err(Error::NotInvertible(format!(
                        "image of generator {i} involves a later generator"
                    )));
                }
            }
            let lead =
                lead.ok_or_else(|| Error::NotInvertible(format!("image of generator {i} has no diagonal term")))?;
            let unit = lead.num_terms() == 1
                && lead
                    .terms()
                    .all(|(m, c)| !Coeff::is_zero(c) && m.exponents().iter().all(|(v, _)| self.nonzero.contains(v)));
            if !unit {
                return Err(Error::NotInvertible(format!(
                    "diagonal coefficient {} of generator {i} is not a unit",
                    self.params.show(&lead)
                )));
            }
            diag.push(lead);
        }
        Ok(diag)
    }

    /// The inverse family, generator by generator.
    pub fn inverse(&self, degrees: &[Degree]) -> Result<Vec<Element<Poly>>> {
        let diag = self.diagonal(degrees)?;
        let mut inv: Vec<Element<Poly>> = Vec::new();
        for (i, img) in self.images.iter().enumerate() {
            let (m, c) = diag[i].terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
            let unit_inv = Poly::monomial(m.inverse(), c.recip());
            let mut rest = img.clone();
            rest.remove(&vec![i]);
            // earlier generators are already inverted; pad the rest
            let mut partial = inv.clone();
            partial.push(Element::zero());
            let mapped = apply_morphism(&partial, &rest, degrees);
            let mut out = generator::<Poly>(i);
            out.sub_assign(&mapped);
            inv.push(out.times(&unit_inv));
        }
        Ok(inv)
    }
}

/// `d' = F ∘ d ∘ F⁻¹` on each generator.
#[derive(Clone, Debug)]
pub struct ConjugatedDifferential {
    pub images: Vec<Element<Poly>>,
    pub params: ParamNames,
    pub nonzero: BTreeSet<u32>,
}

pub fn conjugated_differential(s: &SullivanAlgebra, f: &AutomorphismFamily) -> Result<ConjugatedDifferential> {
    if f.images.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            found: f.images.len(),
        });
    }
    let degrees = s.degrees();
    let inv = f.inverse(degrees)?;
    let d: Vec<Element<Poly>> = (0..s.len()).map(|i| s.differential(i).lift()).collect();
    let images = inv
        .iter()
        .map(|x| {
            let dx = apply_derivation(&d, x, degrees);
            apply_morphism(&f.images, &dx, degrees)
        })
        .collect();
    Ok(ConjugatedDifferential {
        images,
        params: f.params.clone(),
        nonzero: f.nonzero.clone(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum QuadraticSolvability {
    /// Parameter values making `d'` purely quadratic.
    Solution(BTreeMap<u32, Q>),
    /// No rational values with the declared parameters nonzero; carries the
    /// coefficient whose vanishing became contradictory.
    NoSolution {
        equation: Poly,
    },
    Undecided {
        residual: Vec<Poly>,
    },
}

impl ConjugatedDifferential {
    /// Coefficients of the non-quadratic monomials of `d'`.
    pub fn non_quadratic_coefficients(&self) -> Vec<(usize, SymWord, Poly)> {
        let mut out = Vec::new();
        for (i, img) in self.images.iter().enumerate() {
            for (w, c) in img.iter() {
                if w.len() != 2 {
                    out.push((i, w.clone(), c.clone()));
                }
            }
        }
        out
    }

    /// Decides whether the family contains a member with purely quadratic
    /// differential.
    pub fn solve_quadratic(&self) -> QuadraticSolvability {
        let eqs: Vec<Poly> = self
            .non_quadratic_coefficients()
            .into_iter()
            .map(|(_, _, c)| c)
            .collect();
        if eqs.is_empty() {
            return QuadraticSolvability::Solution(BTreeMap::new());
        }
        match eliminate(&eqs, &self.nonzero) {
            Elimination::Inconsistent(equation) => QuadraticSolvability::NoSolution { equation },
            Elimination::Reduced { solved, residual } => {
                if residual.is_empty() {
                    for free in [q(1), q(2), q(-1), q(3)] {
                        let mut values = specialize(&solved, &free);
                        for v in &self.nonzero {
                            values.entry(*v).or_insert_with(|| free.clone());
                        }
                        let ok = self.nonzero.iter().all(|v| !Coeff::is_zero(&values[v]))
                            && eqs.iter().all(|e| {
                                e.eval(&|v| Some(values.get(&v).cloned().unwrap_or_else(|| free.clone())))
                                    .is_some_and(|x| Coeff::is_zero(&x))
                            });
                        if ok {
                            return QuadraticSolvability::Solution(values);
                        }
                    }
                }
                match search_zero(&eqs, &self.nonzero, 6, 100_000) {
                    Some(values) => QuadraticSolvability::Solution(values),
                    None => QuadraticSolvability::Undecided { residual },
                }
            }
        }
    }

    pub fn show(&self, i: usize, names: &[String]) -> String {
        show_symbolic(&self.images[i], names, &self.params)
    }
}

/// Outcome of the sphere-product test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coformality {
    Yes,
    /// `n_i = Σ_{j∈subset} n_j − 1` (0-based indices).
    No {
        index: usize,
        subset: Vec<usize>,
    },
}

impl Coformality {
    pub fn describe(&self, dims: &[i64]) -> String {
        match self {
            Coformality::Yes => "YES".into(),
            Coformality::No { index, subset } => format!(
                "NO, witness n{} = {}−1",
                index + 1,
                subset.iter().map(|&j| dims[j].to_string()).join("+")
            ),
        }
    }
}

/// Intrinsic coformality of `S^{n_1} × ⋯ × S^{n_k}`, all `n_i` odd and ≥ 3.
pub fn intrinsic_coformality(dims: &[i64]) -> Result<Coformality> {
    if let Some(&n) = dims.iter().find(|&&n| n < 3 || n % 2 == 0) {
        return Err(Error::Refused(format!(
            "sphere dimensions must be odd and at least 3, got {n}"
        )));
    }
    let k = dims.len();
    if k <= 4 {
        return Ok(Coformality::Yes);
    }
    for i in 0..k {
        let others: Vec<usize> = (0..k).filter(|&j| j != i).collect();
        for r in (4..=others.len()).step_by(2) {
            for subset in others.iter().copied().combinations(r) {
                let total: i64 = subset.iter().map(|&j| dims[j]).sum();
                if dims[i] == total - 1 {
                    return Ok(Coformality::No { index: i, subset });
                }
            }
        }
    }
    Ok(Coformality::Yes)
}

/// Products of even Eilenberg–Mac Lane spaces are always intrinsically
/// coformal.
pub fn intrinsic_coformality_em(dims: &[i64]) -> Result<Coformality> {
    if let Some(&n) = dims.iter().find(|&&n| n < 2 || n % 2 != 0) {
        return Err(Error::Refused(format!(
            "Eilenberg-Mac Lane degrees must be even and at least 2, got {n}"
        )));
    }
    Ok(Coformality::Yes)
}

/// The exotic structure realizing a negative answer: the only nonzero
/// bracket is `ℓ_r(x_{j_1}, …, x_{j_r}) = x_i` on `L = π_*(Ω P) ⊗ Q`.
pub fn exotic_structure(dims: &[i64], witness: &Coformality) -> Result<Option<LInfStructure>> {
    let Coformality::No { index, subset } = witness else {
        return Ok(None);
    };
    let basis = dims
        .iter()
        .enumerate()
        .map(|(i, &n)| (format!("x{}", i + 1), (n - 1) as Degree))
        .collect();
    let mut l = LInfStructure::new(basis)?;
    l.set_bracket(subset, LinComb::term(*index, q(1)))?;
    Ok(Some(l))
}

#[cfg(test)]
mod tests;
