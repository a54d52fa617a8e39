//! L-infinity structures as bracket tables, and the equivalent codifferential
//! on the free graded-commutative coalgebra on the suspension.
//!
//! Conventions. Tables are stored on nondecreasing index tuples. Brackets
//! are graded skew-symmetric in the unsuspended degrees; coalgebra words are
//! graded symmetric in the suspended degrees `|sx| = |x| + 1`. The
//! coalgebra components are
//! `h_k(sx_1∧…∧sx_k) = −(−1)^{Σ_a (k−a)|x_a|} s ℓ_k(x_1,…,x_k)`,
//! which for a DGL gives `h_1(sx) = −s∂x` and `h_2(sx∧sy) = −(−1)^{|x|} s[x,y]`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{is_odd, koszul_sign, shuffles, signature, Degree, LinComb};
use crate::scalar::{q, Q};

/// Values of a multilinear operation on nondecreasing index tuples.
pub type Table = BTreeMap<Vec<usize>, LinComb<usize, Q>>;

/// A word in the free graded-commutative coalgebra: basis indices in
/// nondecreasing order.
pub type SymWord = Vec<usize>;

/// Sorts `args` and returns the sign relating the original order to the
/// sorted one, or `None` when the value is forced to vanish.
///
/// `skew`: graded skew-symmetry in `degrees` (swap factor `−(−1)^{|a||b|}`,
/// repeated even arguments vanish). Otherwise graded symmetry (swap factor
/// `(−1)^{|a||b|}`, repeated odd arguments vanish).
pub fn sort_with_sign(args: &[usize], degrees: &[Degree], skew: bool) -> Option<(Vec<usize>, i8)> {
    let mut sign = 1i8;
    for i in 0..args.len() {
        for j in i + 1..args.len() {
            let (a, b) = (args[i], args[j]);
            if a == b {
                if is_odd(degrees[a]) != skew {
                    return None;
                }
            } else if a > b {
                let both_odd = is_odd(degrees[a]) && is_odd(degrees[b]);
                let f: i8 = if both_odd { -1 } else { 1 };
                sign *= if skew { -f } else { f };
            }
        }
    }
    let mut sorted = args.to_vec();
    sorted.sort_unstable();
    Some((sorted, sign))
}

/// All nondecreasing tuples of length `n` over `0..dim`.
pub fn multisets(dim: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(dim: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            go(dim, n, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(dim, n, 0, &mut Vec::new(), &mut out);
    out
}

fn sign_q(s: i8) -> Q {
    q(s as i64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LInfStructure {
    names: Vec<String>,
    degrees: Vec<Degree>,
    brackets: BTreeMap<usize, Table>,
    /// Outputs above this degree were discarded when the structure was built.
    complete_through: Option<Degree>,
}

impl LInfStructure {
    pub fn new(basis: Vec<(String, Degree)>) -> Result<Self> {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (n, d) in basis {
            if names.contains(&n) {
                return Err(Error::DuplicateGenerator(n));
            }
            names.push(n);
            degrees.push(d);
        }
        Ok(LInfStructure {
            names,
            degrees,
            brackets: BTreeMap::new(),
            complete_through: None,
        })
    }

    pub fn with_complete_through(mut self, d: Option<Degree>) -> Self {
        self.complete_through = d;
        self
    }

    pub fn complete_through(&self) -> Option<Degree> {
        self.complete_through
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownGenerator(name.into()))
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> Degree {
        self.degrees[i]
    }

    pub fn suspended_degrees(&self) -> Vec<Degree> {
        self.degrees.iter().map(|d| d + 1).collect()
    }

    pub fn tables(&self) -> &BTreeMap<usize, Table> {
        &self.brackets
    }

    pub fn table(&self, k: usize) -> Option<&Table> {
        self.brackets.get(&k)
    }

    /// Highest arity with a nonzero entry.
    pub fn arity_bound(&self) -> usize {
        self.brackets
            .iter()
            .filter(|(_, t)| t.values().any(|v| !v.is_zero()))
            .map(|(k, _)| *k)
            .max()
            .unwrap_or(0)
    }

    pub fn is_minimal(&self) -> bool {
        self.brackets.get(&1).is_none_or(|t| t.values().all(|v| v.is_zero()))
    }

    pub fn is_reduced(&self) -> bool {
        self.degrees.iter().all(|&d| d > 0)
    }

    /// Sets `ℓ_k(args) = value`, normalizing the argument order.
    pub fn set_bracket(&mut self, args: &[usize], value: LinComb<usize, Q>) -> Result<()> {
        let k = args.len();
        if k == 0 {
            return Err(Error::Invalid("brackets need at least one argument".into()));
        }
        for &a in args {
            if a >= self.dim() {
                return Err(Error::Invalid(format!("basis index {a} out of range")));
            }
        }
        let want: Degree = args.iter().map(|&a| self.degrees[a]).sum::<Degree>() + k as Degree - 2;
        for (o, _) in value.iter() {
            if *o >= self.dim() {
                return Err(Error::Invalid(format!("basis index {o} out of range")));
            }
            if self.degrees[*o] != want {
                return Err(Error::BadDegree {
                    generator: self.names[*o].clone(),
                    found: self.degrees[*o],
                    expected: format!("a {k}-ary bracket here has degree {want}"),
                });
            }
        }
        match sort_with_sign(args, &self.degrees, true) {
            None => {
                if value.is_zero() {
                    Ok(())
                } else {
                    Err(Error::Invalid(
                        "a bracket with a repeated even argument must vanish".into(),
                    ))
                }
            }
            Some((sorted, s)) => {
                let table = self.brackets.entry(k).or_default();
                if value.is_zero() {
                    table.remove(&sorted);
                    if table.is_empty() {
                        self.brackets.remove(&k);
                    }
                } else {
                    table.insert(sorted, value.scaled(&sign_q(s)));
                }
                Ok(())
            }
        }
    }

    /// `ℓ_k` on basis arguments in any order.
    pub fn bracket(&self, args: &[usize]) -> LinComb<usize, Q> {
        let Some(table) = self.brackets.get(&args.len()) else {
            return LinComb::zero();
        };
        match sort_with_sign(args, &self.degrees, true) {
            None => LinComb::zero(),
            Some((sorted, s)) => match table.get(&sorted) {
                None => LinComb::zero(),
                Some(v) => v.scaled(&sign_q(s)),
            },
        }
    }

    /// Multilinear extension of `ℓ_k` to combinations.
    pub fn eval<C: crate::scalar::Ring>(&self, args: &[&LinComb<usize, C>]) -> LinComb<usize, C> {
        let mut out = LinComb::zero();
        fn go<C: crate::scalar::Ring>(
            s: &LInfStructure,
            args: &[&LinComb<usize, C>],
            idx: &mut Vec<usize>,
            coeff: C,
            out: &mut LinComb<usize, C>,
        ) {
            if idx.len() == args.len() {
                for (o, x) in s.bracket(idx).iter() {
                    out.add_term_ref(o, &coeff.scaled(x));
                }
                return;
            }
            for (i, c) in args[idx.len()].iter() {
                idx.push(*i);
                go(s, args, idx, coeff.mul_ref(c), out);
                idx.pop();
            }
        }
        go(self, args, &mut Vec::new(), C::one(), &mut out);
        out
    }

    /// Degree of the output of `ℓ_k` on these arguments.
    pub fn output_degree(&self, args: &[usize]) -> Degree {
        args.iter().map(|&a| self.degrees[a]).sum::<Degree>() + args.len() as Degree - 2
    }

    fn within_range(&self, out_degree: Degree) -> bool {
        match self.complete_through {
            None => true,
            Some(d) => out_degree < d,
        }
    }

    /// Left side of the `n`-ary generalized Jacobi identity on basis arguments.
    pub fn jacobiator(&self, xs: &[usize]) -> LinComb<usize, Q> {
        let n = xs.len();
        let degs: Vec<Degree> = xs.iter().map(|&x| self.degrees[x]).collect();
        let mut out = LinComb::zero();
        for i in 1..=n {
            let j = n + 1 - i;
            if !self.brackets.contains_key(&i) || !self.brackets.contains_key(&j) {
                continue;
            }
            for sigma in shuffles(i, n - i, false) {
                let inner_args: Vec<usize> = sigma[..i].iter().map(|&p| xs[p]).collect();
                let inner = self.bracket(&inner_args);
                if inner.is_zero() {
                    continue;
                }
                let eps = koszul_sign(&sigma, &degs).expect("valid shuffle");
                let mut s = eps * signature(&sigma);
                if is_odd((i * (j - 1)) as Degree) {
                    s = -s;
                }
                let rest: Vec<usize> = sigma[i..].iter().map(|&p| xs[p]).collect();
                for (y, c) in inner.iter() {
                    let mut args = vec![*y];
                    args.extend_from_slice(&rest);
                    out.add_scaled(&self.bracket(&args), &(c * sign_q(s)));
                }
            }
        }
        out
    }

    /// Checks the generalized Jacobi identities for all arities up to `up_to_n`
    /// on all basis tuples, within the complete degree range.
    pub fn check_generalized_jacobi(&self, up_to_n: usize) -> JacobiReport {
        for n in 1..=up_to_n {
            for xs in multisets(self.dim(), n) {
                if sort_with_sign(&xs, &self.degrees, true).is_none() {
                    continue;
                }
                let out_deg = self.output_degree(&xs) - 1;
                if !self.within_range(out_deg) {
                    continue;
                }
                let v = self.jacobiator(&xs);
                if !v.is_zero() {
                    return JacobiReport {
                        verified_up_to: n - 1,
                        requested: up_to_n,
                        violation: Some(JacobiViolation {
                            n,
                            arguments: xs.iter().map(|&x| self.names[x].clone()).collect(),
                            value: v,
                        }),
                    };
                }
            }
        }
        JacobiReport {
            verified_up_to: up_to_n,
            requested: up_to_n,
            violation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiViolation {
    pub n: usize,
    pub arguments: Vec<String>,
    pub value: LinComb<usize, Q>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JacobiReport {
    pub verified_up_to: usize,
    pub requested: usize,
    pub violation: Option<JacobiViolation>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Sign `(−1)^{Σ_a (k−a)|x_a|}` relating suspended and unsuspended
/// multilinear maps.
pub fn suspension_sign(degrees: &[Degree], args: &[usize]) -> i8 {
    let k = args.len();
    let e: i64 = args
        .iter()
        .enumerate()
        .map(|(a, &x)| ((k - 1 - a) as i64) * degrees[x] as i64)
        .sum();
    crate::graded::sign_pow(e)
}

/// A coderivation on the free graded-commutative coalgebra on `sL`, given by
/// its components `h_k : Λ^k sL → sL`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coderivation {
    /// Degrees of the unsuspended basis.
    degrees: Vec<Degree>,
    tables: BTreeMap<usize, Table>,
}

impl Coderivation {
    pub fn zero(degrees: Vec<Degree>) -> Self {
        Coderivation {
            degrees,
            tables: BTreeMap::new(),
        }
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn suspended_degrees(&self) -> Vec<Degree> {
        self.degrees.iter().map(|d| d + 1).collect()
    }

    pub fn tables(&self) -> &BTreeMap<usize, Table> {
        &self.tables
    }

    pub fn is_zero(&self) -> bool {
        self.tables.values().all(|t| t.values().all(|v| v.is_zero()))
    }

    /// `h_k` on suspended basis arguments in any order.
    pub fn component(&self, args: &[usize]) -> LinComb<usize, Q> {
        let Some(table) = self.tables.get(&args.len()) else {
            return LinComb::zero();
        };
        match sort_with_sign(args, &self.suspended_degrees(), false) {
            None => LinComb::zero(),
            Some((sorted, s)) => match table.get(&sorted) {
                None => LinComb::zero(),
                Some(v) => v.scaled(&sign_q(s)),
            },
        }
    }

    pub fn set_component(&mut self, args: &[usize], value: LinComb<usize, Q>) {
        let sdeg = self.suspended_degrees();
        if let Some((sorted, s)) = sort_with_sign(args, &sdeg, false) {
            let t = self.tables.entry(args.len()).or_default();
            if value.is_zero() {
                t.remove(&sorted);
            } else {
                t.insert(sorted, value.scaled(&sign_q(s)));
            }
        }
    }

    /// `δ_k` applied to a word, by summing over position subsets.
    pub fn apply_k(&self, k: usize, w: &[usize]) -> LinComb<SymWord, Q> {
        let mut out = LinComb::zero();
        let Some(table) = self.tables.get(&k) else {
            return out;
        };
        if table.is_empty() || k > w.len() {
            return out;
        }
        let sdeg = self.suspended_degrees();
        let wdeg: Vec<Degree> = w.iter().map(|&x| sdeg[x]).collect();
        for chosen in itertools::Itertools::combinations(0..w.len(), k) {
            let sel: Vec<usize> = chosen.iter().map(|&p| w[p]).collect();
            let Some(val) = table.get(&sel) else { continue };
            let mut perm = chosen.clone();
            perm.extend((0..w.len()).filter(|p| !chosen.contains(p)));
            let eps = koszul_sign(&perm, &wdeg).expect("valid permutation");
            let rest: Vec<usize> = perm[k..].iter().map(|&p| w[p]).collect();
            for (j, c) in val.iter() {
                if let Some((word, s)) = insert_sorted(*j, &rest, &sdeg) {
                    out.add_term(word, c * sign_q(eps * s));
                }
            }
        }
        out
    }

    /// The codifferential `δ = Σ_k δ_k` on a word.
    pub fn apply(&self, w: &[usize]) -> LinComb<SymWord, Q> {
        let mut out = LinComb::zero();
        for &k in self.tables.keys() {
            out.add_assign(&self.apply_k(k, w));
        }
        out
    }

    pub fn apply_vec(&self, v: &LinComb<SymWord, Q>) -> LinComb<SymWord, Q> {
        v.map_linear(|w| self.apply(w))
    }

    /// Checks `δ² = 0` on every word of length at most `max_len` and suspended
    /// total degree at most `max_degree`.
    pub fn check_square_zero(&self, max_len: usize, max_degree: Degree) -> Option<SymWord> {
        let sdeg = self.suspended_degrees();
        for w in words_up_to(&sdeg, max_len, max_degree) {
            if !self.apply_vec(&self.apply(&w)).is_zero() {
                return Some(w);
            }
        }
        None
    }
}

/// Inserts `j` into a sorted word, with the sign of moving it there from the
/// front; `None` when the result vanishes.
pub fn insert_sorted(j: usize, rest: &[usize], sdeg: &[Degree]) -> Option<(SymWord, i8)> {
    let pos = rest.partition_point(|&r| r < j);
    if rest.get(pos) == Some(&j) && is_odd(sdeg[j]) {
        return None;
    }
    let passed: Degree = rest[..pos].iter().map(|&r| sdeg[r]).sum();
    let s = if is_odd(sdeg[j]) && is_odd(passed) { -1 } else { 1 };
    let mut word = Vec::with_capacity(rest.len() + 1);
    word.extend_from_slice(&rest[..pos]);
    word.push(j);
    word.extend_from_slice(&rest[pos..]);
    Some((word, s))
}

/// Product of two words in the graded-commutative algebra, with sign.
pub fn word_product(a: &[usize], b: &[usize], sdeg: &[Degree]) -> Option<(SymWord, i8)> {
    let mut cat: Vec<usize> = a.to_vec();
    cat.extend_from_slice(b);
    sort_with_sign(&cat, sdeg, false)
}

/// Nonempty words (nondecreasing, odd letters not repeated) with at most
/// `max_len` letters and total degree at most `max_degree`, for letters of
/// positive degree.
pub fn words_up_to(sdeg: &[Degree], max_len: usize, max_degree: Degree) -> Vec<SymWord> {
    let mut out = Vec::new();
    fn go(sdeg: &[Degree], max_len: usize, rem: Degree, start: usize, cur: &mut Vec<usize>, out: &mut Vec<SymWord>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for i in start..sdeg.len() {
            if sdeg[i] > rem || sdeg[i] <= 0 {
                continue;
            }
            if cur.last() == Some(&i) && is_odd(sdeg[i]) {
                continue;
            }
            cur.push(i);
            go(sdeg, max_len, rem - sdeg[i], i, cur, out);
            cur.pop();
        }
    }
    go(sdeg, max_len, max_degree, 0, &mut Vec::new(), &mut out);
    out
}

pub fn word_degree(w: &[usize], sdeg: &[Degree]) -> Degree {
    w.iter().map(|&x| sdeg[x]).sum()
}

pub fn brackets_to_coderivation(l: &LInfStructure) -> Coderivation {
    let mut c = Coderivation::zero(l.degrees.clone());
    for (&k, table) in &l.brackets {
        let t = c.tables.entry(k).or_default();
        for (args, v) in table {
            let s = -suspension_sign(&l.degrees, args);
            if !v.is_zero() {
                t.insert(args.clone(), v.scaled(&sign_q(s)));
            }
        }
    }
    c
}

pub fn coderivation_to_brackets(c: &Coderivation, names: Vec<String>) -> Result<LInfStructure> {
    let mut l = LInfStructure::new(names.into_iter().zip(c.degrees.iter().copied()).collect())?;
    for (&k, table) in &c.tables {
        let t = l.brackets.entry(k).or_default();
        for (args, v) in table {
            let s = -suspension_sign(&c.degrees, args);
            if !v.is_zero() {
                t.insert(args.clone(), v.scaled(&sign_q(s)));
            }
        }
    }
    Ok(l)
}

/// Skew-symmetric maps `f_n : L^{⊗n} → L'` of degree `n − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LInfMorphismTables {
    pub source: LInfStructure,
    pub target: LInfStructure,
    maps: BTreeMap<usize, Table>,
}

impl LInfMorphismTables {
    pub fn new(source: LInfStructure, target: LInfStructure) -> Self {
        LInfMorphismTables {
            source,
            target,
            maps: BTreeMap::new(),
        }
    }

    pub fn identity(l: &LInfStructure) -> Self {
        let mut m = Self::new(l.clone(), l.clone());
        for i in 0..l.dim() {
            m.set(&[i], LinComb::term(i, q(1))).expect("identity is well formed");
        }
        m
    }

    pub fn set(&mut self, args: &[usize], value: LinComb<usize, Q>) -> Result<()> {
        let n = args.len();
        let want = args.iter().map(|&a| self.source.degree(a)).sum::<Degree>() + n as Degree - 1;
        for (o, _) in value.iter() {
            if self.target.degree(*o) != want {
                return Err(Error::BadDegree {
                    generator: self.target.name(*o).to_string(),
                    found: self.target.degree(*o),
                    expected: format!("f_{n} here has degree {want}"),
                });
            }
        }
        match sort_with_sign(args, self.source.degrees(), true) {
            None if value.is_zero() => Ok(()),
            None => Err(Error::Invalid("a map with a repeated even argument must vanish".into())),
            Some((sorted, s)) => {
                let t = self.maps.entry(n).or_default();
                if value.is_zero() {
                    t.remove(&sorted);
                } else {
                    t.insert(sorted, value.scaled(&sign_q(s)));
                }
                Ok(())
            }
        }
    }

    pub fn map(&self, args: &[usize]) -> LinComb<usize, Q> {
        let Some(t) = self.maps.get(&args.len()) else {
            return LinComb::zero();
        };
        match sort_with_sign(args, self.source.degrees(), true) {
            None => LinComb::zero(),
            Some((sorted, s)) => t.get(&sorted).map_or_else(LinComb::zero, |v| v.scaled(&sign_q(s))),
        }
    }

    pub fn max_arity(&self) -> usize {
        self.maps.keys().copied().max().unwrap_or(0)
    }

    /// Left side of the morphism equation on basis arguments.
    pub fn lhs(&self, xs: &[usize]) -> LinComb<usize, Q> {
        let n = xs.len();
        let degs: Vec<Degree> = xs.iter().map(|&x| self.source.degree(x)).collect();
        let mut out = LinComb::zero();
        for i in 1..=n {
            let j = n + 1 - i;
            for sigma in shuffles(i, n - i, false) {
                let inner_args: Vec<usize> = sigma[..i].iter().map(|&p| xs[p]).collect();
                let inner = self.source.bracket(&inner_args);
                if inner.is_zero() {
                    continue;
                }
                let mut s = koszul_sign(&sigma, &degs).expect("shuffle") * signature(&sigma);
                if is_odd((i * (j - 1)) as Degree) {
                    s = -s;
                }
                let rest: Vec<usize> = sigma[i..].iter().map(|&p| xs[p]).collect();
                for (y, c) in inner.iter() {
                    let mut args = vec![*y];
                    args.extend_from_slice(&rest);
                    out.add_scaled(&self.map(&args), &(c * sign_q(s)));
                }
            }
        }
        out
    }

    /// Right side of the morphism equation: a sum over set partitions of the
    /// arguments into blocks ordered by their first element, with the
    /// Koszul sign and signature of the unshuffle, the sign `ε_k`, and the
    /// Koszul sign of passing each `f_{i_l}` over the earlier arguments.
    pub fn rhs(&self, xs: &[usize]) -> LinComb<usize, Q> {
        let n = xs.len();
        let degs: Vec<Degree> = xs.iter().map(|&x| self.source.degree(x)).collect();
        let mut out = LinComb::zero();
        for blocks in set_partitions(n) {
            let k = blocks.len();
            let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
            let mut s = koszul_sign(&perm, &degs).expect("partition") * signature(&perm);
            let sizes: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
            let eps_k: i64 = (0..k.saturating_sub(1))
                .map(|l| ((k - 1 - l) * (sizes[l] - 1)) as i64)
                .sum();
            s *= crate::graded::sign_pow(eps_k);
            let mut passed: Degree = 0;
            let mut pass_sign: i64 = 0;
            for b in &blocks {
                pass_sign += ((b.len() - 1) as i64) * passed as i64;
                passed += b.iter().map(|&p| degs[p]).sum::<Degree>();
            }
            s *= crate::graded::sign_pow(pass_sign);
            let values: Vec<LinComb<usize, Q>> = blocks
                .iter()
                .map(|b| self.map(&b.iter().map(|&p| xs[p]).collect::<Vec<_>>()))
                .collect();
            if values.iter().any(|v| v.is_zero()) {
                continue;
            }
            let refs: Vec<&LinComb<usize, Q>> = values.iter().collect();
            out.add_scaled(&self.target.eval(&refs), &sign_q(s));
        }
        out
    }

    /// Checks the tabular morphism equation for all arities up to `up_to_n`.
    pub fn check_tabular(&self, up_to_n: usize) -> Option<(usize, Vec<usize>)> {
        for n in 1..=up_to_n {
            for xs in multisets(self.source.dim(), n) {
                if sort_with_sign(&xs, self.source.degrees(), true).is_none() {
                    continue;
                }
                if self.lhs(&xs) != self.rhs(&xs) {
                    return Some((n, xs));
                }
            }
        }
        None
    }

    /// Coalgebra components `F_k(sx_1∧…∧sx_k) = (−1)^{Σ(k−a)|x_a|} s f_k(x_1,…,x_k)`.
    pub fn coalgebra_component(&self, w: &[usize]) -> LinComb<usize, Q> {
        let s = suspension_sign(self.source.degrees(), w);
        self.map(w).scaled(&sign_q(s))
    }

    /// The coalgebra map on a word: a sum over set partitions into blocks,
    /// each block sent through its component, outputs multiplied in block
    /// order.
    pub fn coalgebra_map(&self, w: &[usize]) -> LinComb<SymWord, Q> {
        let sdeg = self.source.suspended_degrees();
        let tdeg = self.target.suspended_degrees();
        let wdeg: Vec<Degree> = w.iter().map(|&x| sdeg[x]).collect();
        let mut out = LinComb::zero();
        for blocks in set_partitions(w.len()) {
            let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
            let eps = koszul_sign(&perm, &wdeg).expect("partition");
            let mut acc: LinComb<SymWord, Q> = LinComb::term(Vec::new(), sign_q(eps));
            for b in &blocks {
                let args: Vec<usize> = b.iter().map(|&p| w[p]).collect();
                let v = self.coalgebra_component(&args);
                let mut next = LinComb::zero();
                for (word, c) in acc.iter() {
                    for (j, x) in v.iter() {
                        if let Some((nw, s)) = word_product(word, &[*j], &tdeg) {
                            next.add_term(nw, c * x * sign_q(s));
                        }
                    }
                }
                acc = next;
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }

    /// Checks `F∘δ = δ'∘F` after projecting to the cogenerators, on all
    /// source words of length at most `up_to_n`.
    pub fn check_coalgebra(&self, up_to_n: usize) -> Option<(usize, Vec<usize>)> {
        let delta = brackets_to_coderivation(&self.source);
        let delta_t = brackets_to_coderivation(&self.target);
        for n in 1..=up_to_n {
            for w in multisets(self.source.dim(), n) {
                let sdeg = self.source.suspended_degrees();
                if sort_with_sign(&w, &sdeg, false).is_none() {
                    continue;
                }
                let mut left: LinComb<usize, Q> = LinComb::zero();
                for (u, c) in delta.apply(&w).iter() {
                    left.add_scaled(&self.coalgebra_component(u), c);
                }
                let mut right: LinComb<usize, Q> = LinComb::zero();
                for (u, c) in self.coalgebra_map(&w).iter() {
                    right.add_scaled(&delta_t.component(u), c);
                }
                if left != right {
                    return Some((n, w));
                }
            }
        }
        None
    }
}

/// Set partitions of `0..n`, each block increasing, blocks ordered by their
/// first element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn go(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            go(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        go(i + 1, n, cur, out);
        cur.pop();
    }
    go(0, n, &mut Vec::new(), &mut out);
    out
}

/// The L-infinity structure of a free DGL truncated at `max_degree`, on the
/// standard basis of each degree piece, together with the basis tensors.
pub fn structure_of_dgl(
    l: &crate::dgl::DglPresentation,
    max_degree: Degree,
) -> Result<(LInfStructure, Vec<crate::free_lie::Tensor>)> {
    use crate::dgl::{apply_d, DglTarget};
    use crate::linalg::Echelon;
    if max_degree > l.generators().truncation() {
        return Err(Error::TruncationTooLow {
            needed: max_degree,
            truncation: l.generators().truncation(),
        });
    }
    let mut basis = Vec::new();
    let mut tensors = Vec::new();
    let mut by_degree: BTreeMap<Degree, (usize, Echelon<crate::free_lie::Word>)> = BTreeMap::new();
    for d in 1..=max_degree {
        let piece = l.piece_basis(d)?;
        let offset = tensors.len();
        let mut ech = Echelon::new();
        for (i, t) in piece.iter().enumerate() {
            ech.insert(t.clone(), offset + i);
            basis.push((l.show(t), d));
            tensors.push(t.clone());
        }
        by_degree.insert(d, (offset, ech));
    }
    let coords = |v: &crate::free_lie::Tensor| -> LinComb<usize, Q> {
        let Some((w, _)) = v.first() else {
            return LinComb::zero();
        };
        let d = l.generators().word_degree(w);
        let (_, ech) = &by_degree[&d];
        let red = ech.reduce(v);
        debug_assert!(red.remainder.is_zero());
        red.combo
    };
    let mut s = LInfStructure::new(basis)?.with_complete_through(Some(max_degree));
    let degrees = s.degrees.clone();
    for (i, t) in tensors.iter().enumerate() {
        let dt = apply_d(l, t);
        if !dt.is_zero() {
            s.set_bracket(&[i], coords(&dt))?;
        }
    }
    for i in 0..tensors.len() {
        for j in i..tensors.len() {
            if degrees[i] + degrees[j] > max_degree {
                continue;
            }
            let b = l.lie().bracket(&tensors[i], &tensors[j]);
            if !b.is_zero() {
                s.set_bracket(&[i, j], coords(&b))?;
            }
        }
    }
    Ok((s, tensors))
}

/// Quillen chains of a free DGL, truncated: the structure on `L_{≤D}` and its
/// codifferential. Words of suspended degree at most `D + 2` see every
/// bracket they need.
#[derive(Clone, Debug)]
pub struct QuillenChains {
    pub structure: LInfStructure,
    pub codifferential: Coderivation,
    pub truncation: Degree,
}

pub fn quillen_chains(l: &crate::dgl::DglPresentation, truncation: Degree) -> Result<QuillenChains> {
    let check = l.check_d_squared();
    if !check.passed {
        return Err(Error::Invalid(format!(
            "differential does not square to zero at `{}`",
            check.first_failure.unwrap_or_default()
        )));
    }
    let (structure, _) = structure_of_dgl(l, truncation)?;
    let codifferential = brackets_to_coderivation(&structure);
    Ok(QuillenChains {
        structure,
        codifferential,
        truncation,
    })
}

impl QuillenChains {
    /// Highest suspended degree in which the truncated chains are exact.
    pub fn exact_through(&self) -> Degree {
        self.truncation + 2
    }

    /// Verifies `δ² = 0` on all words of suspended degree at most `max_degree`.
    pub fn verify_square_zero(&self, max_degree: Degree) -> Result<Option<SymWord>> {
        if max_degree > self.exact_through() {
            return Err(Error::TruncationTooLow {
                needed: max_degree - 2,
                truncation: self.truncation,
            });
        }
        let len = max_degree.max(0) as usize;
        Ok(self.codifferential.check_square_zero(len, max_degree))
    }
}

impl LInfMorphismTables {
    /// Given `f_1 = id` and higher maps on a source structure, builds the
    /// target structure that makes the family an L-infinity morphism, by
    /// transporting the codifferential along the coalgebra automorphism.
    pub fn push_forward(source: &LInfStructure, higher: &BTreeMap<Vec<usize>, LinComb<usize, Q>>) -> Result<Self> {
        let mut m = LInfMorphismTables::identity(source);
        for (args, v) in higher {
            if args.len() < 2 {
                return Err(Error::Invalid("only maps of arity at least 2 may be given".into()));
            }
            m.set(args, v.clone())?;
        }
        let sdeg = source.suspended_degrees();
        let delta = brackets_to_coderivation(source);
        let top = sdeg.iter().copied().max().unwrap_or(0);
        if sdeg.iter().any(|&d| d <= 0) {
            return Err(Error::NegativeDegree);
        }
        let mut target = Coderivation::zero(source.degrees().to_vec());
        let max_len = (top + 1).max(1) as usize;
        let mut words = words_up_to(&sdeg, max_len, top + 1);
        words.sort_by_key(|w| w.len());
        for w in words {
            let mut val: LinComb<usize, Q> = LinComb::zero();
            for (u, c) in delta.apply(&w).iter() {
                val.add_scaled(&m.coalgebra_component(u), c);
            }
            for (u, c) in m.coalgebra_map(&w).iter() {
                if u.len() < w.len() {
                    val.add_scaled(&target.component(u), &-c.clone());
                }
            }
            if !val.is_zero() {
                target.set_component(&w, val);
            }
        }
        m.target = coderivation_to_brackets(&target, source.names().to_vec())?;
        Ok(m)
    }
}

#[cfg(test)]
pub(crate) mod tests;
