//! Free graded Lie algebras embedded in the tensor algebra.
//!
//! Elements are stored as tensors: sparse combinations of words in the
//! generators. Bases of graded pieces use standard bracketings of
//! Lyndon words, together with squares `[P(w), P(w)]` of odd Lyndon words;
//! their linear independence is re-certified by rank whenever a piece is
//! built.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graded::{is_odd, Degree, LinComb};
use crate::linalg::{Echelon, Inserted};
use crate::scalar::{fmt_q, q, Coeff, Q};

/// A tensor word: generator indices, left to right.
pub type Word = Vec<u32>;

/// An element of the tensor algebra.
pub type Tensor<C = Q> = LinComb<Word, C>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    names: Vec<String>,
    degrees: Vec<Degree>,
    truncation: Degree,
    index: HashMap<String, u32>,
}

impl GeneratorSet {
    pub fn new(generators: Vec<(String, Degree)>, truncation: Degree) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (i, (name, d)) in generators.into_iter().enumerate() {
            if index.insert(name.clone(), i as u32).is_some() {
                return Err(Error::DuplicateGenerator(name));
            }
            if d > truncation {
                return Err(Error::DegreeOverflow { degree: d, truncation });
            }
            names.push(name);
            degrees.push(d);
        }
        Ok(GeneratorSet {
            names,
            degrees,
            truncation,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn truncation(&self) -> Degree {
        self.truncation
    }

    pub fn name(&self, g: u32) -> &str {
        &self.names[g as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, g: u32) -> Degree {
        self.degrees[g as usize]
    }

    pub fn degrees(&self) -> &[Degree] {
        &self.degrees
    }

    pub fn lookup(&self, name: &str) -> Result<u32> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn word_degree(&self, w: &[u32]) -> Degree {
        w.iter().map(|&g| self.degrees[g as usize]).sum()
    }

    pub fn with_truncation(&self, truncation: Degree) -> Result<Self> {
        let gens = self.names.iter().cloned().zip(self.degrees.iter().copied()).collect();
        GeneratorSet::new(gens, truncation)
    }
}

/// A bracket tree over generator names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LieTree {
    Leaf(String),
    Bracket(Box<LieTree>, Box<LieTree>),
}

impl LieTree {
    pub fn leaf(name: impl Into<String>) -> Self {
        LieTree::Leaf(name.into())
    }

    pub fn bracket(a: LieTree, b: LieTree) -> Self {
        LieTree::Bracket(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<&str> {
        match self {
            LieTree::Leaf(s) => vec![s],
            LieTree::Bracket(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }
}

impl fmt::Display for LieTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieTree::Leaf(s) => write!(f, "{s}"),
            LieTree::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// A rational combination of bracket trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieExpr {
    pub terms: Vec<(Q, LieTree)>,
}

impl LieExpr {
    pub fn zero() -> Self {
        LieExpr::default()
    }

    pub fn tree(t: LieTree) -> Self {
        LieExpr { terms: vec![(q(1), t)] }
    }

    pub fn generator(name: impl Into<String>) -> Self {
        Self::tree(LieTree::leaf(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(c, _)| Coeff::is_zero(c))
    }

    pub fn plus(mut self, c: Q, t: LieTree) -> Self {
        self.terms.push((c, t));
        self
    }

    /// Bilinear bracket of two expressions.
    pub fn bracket(&self, other: &LieExpr) -> LieExpr {
        let mut out = LieExpr::zero();
        for (a, ta) in &self.terms {
            for (b, tb) in &other.terms {
                out.terms.push((a * b, LieTree::bracket(ta.clone(), tb.clone())));
            }
        }
        out
    }
}

impl fmt::Display for LieExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<_> = self.terms.iter().filter(|(c, _)| !Coeff::is_zero(c)).collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, t)) in terms.iter().enumerate() {
            let neg = c < &q(0);
            let mag = if neg { -(*c).clone() } else { (*c).clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mag != q(1) {
                write!(f, "{}*", fmt_q(&mag))?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Graded commutator of tensors: `[a,b] = a⊗b − (−1)^{|a||b|} b⊗a`, term by term.
pub fn bracket<C: Coeff + crate::scalar::Ring>(degrees: &[Degree], a: &Tensor<C>, b: &Tensor<C>) -> Tensor<C> {
    let deg = |w: &Word| -> Degree { w.iter().map(|&g| degrees[g as usize]).sum() };
    let mut out = Tensor::zero();
    for (wa, ca) in a.iter() {
        let da = deg(wa);
        for (wb, cb) in b.iter() {
            let db = deg(wb);
            let c = ca.mul_ref(cb);
            let mut ab = wa.clone();
            ab.extend_from_slice(wb);
            out.add_term(ab, c.clone());
            let mut ba = wb.clone();
            ba.extend_from_slice(wa);
            if is_odd(da) && is_odd(db) {
                out.add_term(ba, c);
            } else {
                out.add_term(ba, c.negated());
            }
        }
    }
    out
}

/// Whether `w` is a Lyndon word: strictly smaller than each proper suffix.
pub fn is_lyndon(w: &[u32]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Split `w = uv` with `v` the longest proper Lyndon suffix.
fn standard_split(w: &[u32]) -> usize {
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .expect("a Lyndon word of length ≥ 2 has a proper Lyndon suffix")
}

/// A basis element of a graded piece: the standard bracketing of a Lyndon
/// word, or the self-bracket of one of odd degree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LieBasisElement {
    pub lyndon: Word,
    pub square: bool,
}

impl LieBasisElement {
    /// The word that leads its tensor expansion.
    pub fn leading_word(&self) -> Word {
        let mut w = self.lyndon.clone();
        if self.square {
            w.extend_from_slice(&self.lyndon);
        }
        w
    }
}

/// Free graded Lie algebra on a generator set, truncated by degree.
#[derive(Clone, Debug)]
pub struct FreeLie {
    gens: GeneratorSet,
}

impl FreeLie {
    pub fn new(gens: GeneratorSet) -> Self {
        FreeLie { gens }
    }

    pub fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    pub fn generator(&self, g: u32) -> Tensor {
        Tensor::basis(vec![g])
    }

    pub fn bracket(&self, a: &Tensor, b: &Tensor) -> Tensor {
        bracket(self.gens.degrees(), a, b)
    }

    fn tree_tensor(&self, t: &LieTree) -> Result<(Tensor, Degree)> {
        match t {
            LieTree::Leaf(name) => {
                let g = self.gens.lookup(name)?;
                Ok((self.generator(g), self.gens.degree(g)))
            }
            LieTree::Bracket(a, b) => {
                let (ta, da) = self.tree_tensor(a)?;
                let (tb, db) = self.tree_tensor(b)?;
                Ok((self.bracket(&ta, &tb), da + db))
            }
        }
    }

    /// Canonical tensor form of a Lie expression.
    pub fn expand_to_tensor(&self, e: &LieExpr) -> Result<Tensor> {
        let mut out = Tensor::zero();
        let mut degree = None;
        for (c, t) in &e.terms {
            let (v, d) = self.tree_tensor(t)?;
            if d > self.gens.truncation() {
                return Err(Error::DegreeOverflow {
                    degree: d,
                    truncation: self.gens.truncation(),
                });
            }
            match degree {
                None => degree = Some(d),
                Some(e) if e != d => return Err(Error::Inhomogeneous { first: e, second: d }),
                _ => {}
            }
            out.add_scaled(&v, c);
        }
        Ok(out)
    }

    fn check_positive(&self) -> Result<()> {
        if self.gens.degrees().iter().any(|&d| d < 1) {
            return Err(Error::Refused(
                "basis enumeration needs generators of positive degree".into(),
            ));
        }
        Ok(())
    }

    /// All words of the given length and degree, in lexicographic order.
    pub fn words(&self, length: usize, degree: Degree) -> Result<Vec<Word>> {
        self.check_positive()?;
        let degs = self.gens.degrees();
        let (lo, hi) = match (degs.iter().min(), degs.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Ok(Vec::new()),
        };
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(length);
        fn go(degs: &[Degree], lo: Degree, hi: Degree, left: usize, rem: Degree, cur: &mut Word, out: &mut Vec<Word>) {
            if left == 0 {
                if rem == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let n = left as Degree;
            if rem < lo * n || rem > hi * n {
                return;
            }
            for (g, &d) in degs.iter().enumerate() {
                cur.push(g as u32);
                go(degs, lo, hi, left - 1, rem - d, cur, out);
                cur.pop();
            }
        }
        go(degs, lo, hi, length, degree, &mut cur, &mut out);
        Ok(out)
    }

    /// Basis labels of the piece of given bracket length and degree.
    pub fn basis_elements(&self, weight: usize, degree: Degree) -> Result<Vec<LieBasisElement>> {
        let mut out: Vec<LieBasisElement> = self
            .words(weight, degree)?
            .into_iter()
            .filter(|w| is_lyndon(w))
            .map(|lyndon| LieBasisElement { lyndon, square: false })
            .collect();
        if weight % 2 == 0 && degree % 2 == 0 {
            let half = self.words(weight / 2, degree / 2)?;
            out.extend(
                half.into_iter()
                    .filter(|w| is_lyndon(w) && is_odd(degree / 2))
                    .map(|lyndon| LieBasisElement { lyndon, square: true }),
            );
        }
        Ok(out)
    }

    /// Basis labels of the whole degree piece, over all bracket lengths.
    pub fn degree_basis(&self, degree: Degree) -> Result<Vec<LieBasisElement>> {
        self.check_positive()?;
        let mut out = Vec::new();
        if degree < 1 {
            return Ok(out);
        }
        for weight in 1..=degree as usize {
            out.extend(self.basis_elements(weight, degree)?);
        }
        Ok(out)
    }

    pub fn standard_tree(&self, w: &[u32]) -> LieTree {
        if w.len() == 1 {
            return LieTree::leaf(self.gens.name(w[0]));
        }
        let i = standard_split(w);
        LieTree::bracket(self.standard_tree(&w[..i]), self.standard_tree(&w[i..]))
    }

    pub fn element_tree(&self, e: &LieBasisElement) -> LieTree {
        let t = self.standard_tree(&e.lyndon);
        if e.square {
            LieTree::bracket(t.clone(), t)
        } else {
            t
        }
    }

    pub fn standard_tensor(&self, w: &[u32]) -> Tensor {
        if w.len() == 1 {
            return self.generator(w[0]);
        }
        let i = standard_split(w);
        self.bracket(&self.standard_tensor(&w[..i]), &self.standard_tensor(&w[i..]))
    }

    pub fn element_tensor(&self, e: &LieBasisElement) -> Tensor {
        let t = self.standard_tensor(&e.lyndon);
        if e.square {
            self.bracket(&t, &t)
        } else {
            t
        }
    }

    /// Basis of a graded piece as Lie expressions, certified independent by
    /// exact rank in the tensor algebra.
    pub fn graded_piece_basis(&self, weight: usize, degree: Degree) -> Result<Vec<LieExpr>> {
        if degree > self.gens.truncation() {
            return Err(Error::DegreeOverflow {
                degree,
                truncation: self.gens.truncation(),
            });
        }
        let elems = self.basis_elements(weight, degree)?;
        let tensors: Vec<Tensor> = elems.iter().map(|e| self.element_tensor(e)).collect();
        certify_independent(&tensors)?;
        Ok(elems.iter().map(|e| LieExpr::tree(self.element_tree(e))).collect())
    }

    /// Writes a Lie tensor of the given degree in the standard basis.
    pub fn to_lie_expr(&self, t: &Tensor, degree: Degree) -> Result<LieExpr> {
        if t.is_zero() {
            return Ok(LieExpr::zero());
        }
        let elems = self.degree_basis(degree)?;
        let mut ech = Echelon::new();
        let tensors: Vec<Tensor> = elems.iter().map(|e| self.element_tensor(e)).collect();
        for (i, v) in tensors.iter().enumerate() {
            ech.insert(v.clone(), i);
        }
        let red = ech.reduce(t);
        if !red.remainder.is_zero() {
            return Err(Error::Invalid("tensor is not a Lie element".into()));
        }
        Ok(LieExpr {
            terms: red
                .combo
                .iter()
                .map(|(i, c)| (c.clone(), self.element_tree(&elems[*i])))
                .collect(),
        })
    }
}

/// Fails unless the vectors are linearly independent.
pub fn certify_independent(vs: &[Tensor]) -> Result<()> {
    let mut ech = Echelon::new();
    for (i, v) in vs.iter().enumerate() {
        if let Inserted::Dependent(_) = ech.insert(v.clone(), i) {
            return Err(Error::Invalid(format!("basis candidate {i} is linearly dependent")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank;
    use proptest::prelude::*;

    fn lie(gens: &[(&str, Degree)], trunc: Degree) -> FreeLie {
        FreeLie::new(GeneratorSet::new(gens.iter().map(|(n, d)| (n.to_string(), *d)).collect(), trunc).unwrap())
    }

    fn leaf(s: &str) -> LieTree {
        LieTree::leaf(s)
    }

    fn br(a: LieTree, b: LieTree) -> LieTree {
        LieTree::bracket(a, b)
    }

    #[test]
    fn self_brackets() {
        let odd = lie(&[("u", 1)], 10);
        let t = odd.expand_to_tensor(&LieExpr::tree(br(leaf("u"), leaf("u")))).unwrap();
        assert_eq!(t, Tensor::term(vec![0, 0], q(2)));
        let even = lie(&[("u", 2)], 10);
        assert!(even
            .expand_to_tensor(&LieExpr::tree(br(leaf("u"), leaf("u"))))
            .unwrap()
            .is_zero());
        let t3 = odd
            .expand_to_tensor(&LieExpr::tree(br(leaf("u"), br(leaf("u"), leaf("u")))))
            .unwrap();
        assert!(t3.is_zero());
    }

    #[test]
    fn expansion_errors() {
        let l = lie(&[("u", 3)], 5);
        assert_eq!(
            l.expand_to_tensor(&LieExpr::generator("w")),
            Err(Error::UnknownGenerator("w".into()))
        );
        assert!(matches!(
            l.expand_to_tensor(&LieExpr::tree(br(leaf("u"), leaf("u")))),
            Err(Error::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn small_piece_dimensions() {
        assert_eq!(lie(&[("u", 1)], 10).graded_piece_basis(2, 2).unwrap().len(), 1);
        assert_eq!(lie(&[("u", 2)], 10).graded_piece_basis(2, 4).unwrap().len(), 0);
        let two = lie(&[("u1", 1), ("u2", 1)], 10);
        let b = two.graded_piece_basis(2, 2).unwrap();
        assert_eq!(b.len(), 3);
        let shown: Vec<String> = b.iter().map(|e| e.to_string()).collect();
        assert!(shown.contains(&"[u1,u2]".to_string()));
        assert!(shown.contains(&"[u1,u1]".to_string()));
        assert!(shown.contains(&"[u2,u2]".to_string()));
    }

    /// All bracketings of all words of a given length, as tensors.
    fn all_bracketings(l: &FreeLie, len: usize, degree: Degree) -> Vec<Tensor> {
        fn trees(l: &FreeLie, w: &[u32]) -> Vec<Tensor> {
            if w.len() == 1 {
                return vec![l.generator(w[0])];
            }
            let mut out = Vec::new();
            for i in 1..w.len() {
                for a in trees(l, &w[..i]) {
                    for b in trees(l, &w[i..]) {
                        out.push(l.bracket(&a, &b));
                    }
                }
            }
            out
        }
        l.words(len, degree).unwrap().iter().flat_map(|w| trees(l, w)).collect()
    }

    #[test]
    fn dimensions_match_brute_force() {
        let cases: Vec<Vec<(&str, Degree)>> = vec![
            vec![("a", 1)],
            vec![("a", 2)],
            vec![("a", 1), ("b", 1)],
            vec![("a", 1), ("b", 2)],
            vec![("a", 2), ("b", 3)],
            vec![("a", 1), ("b", 2), ("c", 3)],
            vec![("a", 3), ("b", 3), ("c", 2)],
        ];
        for gens in cases {
            let l = lie(&gens, 20);
            for weight in 1..=4usize {
                for degree in 1..=12 {
                    let brute = rank(&all_bracketings(&l, weight, degree));
                    let ours = l.graded_piece_basis(weight, degree).unwrap().len();
                    assert_eq!(ours, brute, "{gens:?} weight {weight} degree {degree}");
                }
            }
        }
    }

    #[test]
    fn lie_expr_round_trip() {
        let l = lie(&[("a", 1), ("b", 2)], 12);
        let e = LieExpr::tree(br(leaf("b"), br(leaf("a"), leaf("b"))))
            .plus(q(3), br(leaf("a"), br(leaf("a"), br(leaf("a"), leaf("b")))));
        let t = l.expand_to_tensor(&e).unwrap();
        let back = l.to_lie_expr(&t, 5).unwrap();
        assert_eq!(l.expand_to_tensor(&back).unwrap(), t);
    }

    fn arb_tree(depth: u32) -> impl Strategy<Value = LieTree> {
        let leafs = prop_oneof![Just(leaf("a")), Just(leaf("b")), Just(leaf("c"))];
        leafs.prop_recursive(depth, 8, 2, |inner| (inner.clone(), inner).prop_map(|(x, y)| br(x, y)))
    }

    fn tree_degree(t: &LieTree) -> Degree {
        t.leaves()
            .iter()
            .map(|s| match *s {
                "a" => 1,
                "b" => 2,
                _ => 3,
            })
            .sum()
    }

    proptest! {
        #[test]
        fn antisymmetry(x in arb_tree(3), y in arb_tree(3)) {
            let l = lie(&[("a", 1), ("b", 2), ("c", 3)], 60);
            let dx = tree_degree(&x);
            let dy = tree_degree(&y);
            let xy = l.expand_to_tensor(&LieExpr::tree(br(x.clone(), y.clone()))).unwrap();
            let yx = l.expand_to_tensor(&LieExpr::tree(br(y, x))).unwrap();
            let mut sum = xy;
            let s = if is_odd(dx) && is_odd(dy) { q(-1) } else { q(1) };
            sum.add_scaled(&yx, &s);
            prop_assert!(sum.is_zero());
        }

        #[test]
        fn jacobi(x in arb_tree(1), y in arb_tree(1), z in arb_tree(1)) {
            let (dx, dy, dz) = (tree_degree(&x), tree_degree(&y), tree_degree(&z));
            prop_assume!(dx + dy + dz <= 10);
            let l = lie(&[("a", 1), ("b", 2), ("c", 3)], 10);
            // [x,[y,z]] = [[x,y],z] + (−1)^{|x||y|}[y,[x,z]]
            let lhs = l.expand_to_tensor(&LieExpr::tree(br(x.clone(), br(y.clone(), z.clone())))).unwrap();
            let mut rhs = l.expand_to_tensor(&LieExpr::tree(br(br(x.clone(), y.clone()), z.clone()))).unwrap();
            let s = if is_odd(dx) && is_odd(dy) { q(-1) } else { q(1) };
            rhs.add_scaled(&l.expand_to_tensor(&LieExpr::tree(br(y, br(x, z)))).unwrap(), &s);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
