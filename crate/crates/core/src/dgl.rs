//! Differential graded Lie algebras: free presentations with a differential
//! on generators, truncated homology, and boundary preimages with
//! polynomial right-hand sides.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::free_lie::{FreeLie, GeneratorSet, LieExpr, Tensor, Word};
use crate::graded::{is_odd, Degree, LinComb};
use crate::linalg::{expand, Echelon, Inserted};
use crate::scalar::{Coeff, Poly, Ring, Q};

/// A graded Lie algebra with differential, given on a key basis. Keys need
/// not be linearly independent (tensor words are not); the piece basis
/// names independent vectors of each degree.
pub trait DglTarget: Send + Sync {
    type Key: Ord + Clone + Debug + Send + Sync;

    fn truncation(&self) -> Degree;
    fn key_degree(&self, k: &Self::Key) -> Degree;
    /// A basis of the degree piece, as vectors over keys.
    fn piece_basis(&self, degree: Degree) -> Result<Vec<LinComb<Self::Key, Q>>>;
    fn d_key(&self, k: &Self::Key) -> LinComb<Self::Key, Q>;
    fn bracket_keys(&self, a: &Self::Key, b: &Self::Key) -> LinComb<Self::Key, Q>;
    fn show(&self, v: &LinComb<Self::Key, Q>) -> String;
}

pub fn apply_d<T: DglTarget + ?Sized, C: Coeff>(t: &T, v: &LinComb<T::Key, C>) -> LinComb<T::Key, C> {
    v.map_linear(|k| t.d_key(k))
}

pub fn bracket<T: DglTarget + ?Sized, C: Ring>(
    t: &T,
    a: &LinComb<T::Key, C>,
    b: &LinComb<T::Key, C>,
) -> LinComb<T::Key, C> {
    let mut out = LinComb::zero();
    for (ka, ca) in a.iter() {
        for (kb, cb) in b.iter() {
            let c = ca.mul_ref(cb);
            for (k, x) in t.bracket_keys(ka, kb).iter() {
                out.add_term_ref(k, &c.scaled(x));
            }
        }
    }
    out
}

/// Free DGL `(Lie(U), ∂)` with `∂` prescribed on generators.
#[derive(Clone, Debug)]
pub struct DglPresentation {
    lie: FreeLie,
    differential: Vec<Tensor>,
    exprs: Vec<LieExpr>,
}

impl DglPresentation {
    /// Generators without a listed differential are cycles.
    pub fn new(gens: GeneratorSet, differentials: Vec<(String, LieExpr)>) -> Result<Self> {
        let lie = FreeLie::new(gens);
        let n = lie.generators().len();
        let mut differential = vec![Tensor::zero(); n];
        let mut exprs = vec![LieExpr::zero(); n];
        for (name, e) in differentials {
            let g = lie.generators().lookup(&name)?;
            let t = lie.expand_to_tensor(&e)?;
            let want = lie.generators().degree(g) - 1;
            if let Some((w, _)) = t.first() {
                let d = lie.generators().word_degree(w);
                if d != want {
                    return Err(Error::BadDegree {
                        generator: name,
                        found: d,
                        expected: format!("its differential must have degree {want}"),
                    });
                }
            }
            differential[g as usize] = t;
            exprs[g as usize] = e;
        }
        Ok(DglPresentation {
            lie,
            differential,
            exprs,
        })
    }

    pub fn lie(&self) -> &FreeLie {
        &self.lie
    }

    pub fn generators(&self) -> &GeneratorSet {
        self.lie.generators()
    }

    pub fn differential_of(&self, g: u32) -> &Tensor {
        &self.differential[g as usize]
    }

    pub fn differential_expr(&self, g: u32) -> &LieExpr {
        &self.exprs[g as usize]
    }

    pub fn with_truncation(&self, truncation: Degree) -> Result<Self> {
        let gens = self.generators().with_truncation(truncation)?;
        let diffs = (0..self.generators().len() as u32)
            .map(|g| (self.generators().name(g).to_string(), self.exprs[g as usize].clone()))
            .collect();
        DglPresentation::new(gens, diffs)
    }

    /// Leibniz extension to tensors:
    /// `∂(x₁⋯x_n) = Σ_i (−1)^{|x₁|+⋯+|x_{i−1}|} x₁⋯∂x_i⋯x_n`.
    pub fn d_word(&self, w: &[u32]) -> Tensor {
        let mut out = Tensor::zero();
        let mut before = 0;
        for (i, &g) in w.iter().enumerate() {
            let dg = &self.differential[g as usize];
            if !dg.is_zero() {
                let s = if is_odd(before) {
                    crate::scalar::q(-1)
                } else {
                    crate::scalar::q(1)
                };
                for (mid, c) in dg.iter() {
                    let mut word: Word = Vec::with_capacity(w.len() + mid.len());
                    word.extend_from_slice(&w[..i]);
                    word.extend_from_slice(mid);
                    word.extend_from_slice(&w[i + 1..]);
                    out.add_term(word, c * &s);
                }
            }
            before += self.generators().degree(g);
        }
        out
    }

    pub fn apply_differential(&self, e: &LieExpr) -> Result<LieExpr> {
        let t = self.lie.expand_to_tensor(e)?;
        let dt = apply_d(self, &t);
        match dt.first() {
            None => Ok(LieExpr::zero()),
            Some((w, _)) => {
                let d = self.generators().word_degree(w);
                self.lie.to_lie_expr(&dt, d)
            }
        }
    }

    pub fn check_d_squared(&self) -> DSquaredReport {
        for g in 0..self.generators().len() as u32 {
            let dd = apply_d(self, &self.differential[g as usize]);
            if !dd.is_zero() {
                return DSquaredReport {
                    passed: false,
                    first_failure: Some(self.generators().name(g).to_string()),
                };
            }
        }
        DSquaredReport {
            passed: true,
            first_failure: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSquaredReport {
    pub passed: bool,
    pub first_failure: Option<String>,
}

impl DglTarget for DglPresentation {
    type Key = Word;

    fn truncation(&self) -> Degree {
        self.generators().truncation()
    }

    fn key_degree(&self, k: &Word) -> Degree {
        self.generators().word_degree(k)
    }

    fn piece_basis(&self, degree: Degree) -> Result<Vec<Tensor>> {
        if degree > self.truncation() {
            return Err(Error::DegreeOverflow {
                degree,
                truncation: self.truncation(),
            });
        }
        Ok(self
            .lie
            .degree_basis(degree)?
            .iter()
            .map(|e| self.lie.element_tensor(e))
            .collect())
    }

    fn d_key(&self, k: &Word) -> Tensor {
        self.d_word(k)
    }

    fn bracket_keys(&self, a: &Word, b: &Word) -> Tensor {
        self.lie.bracket(&Tensor::basis(a.clone()), &Tensor::basis(b.clone()))
    }

    fn show(&self, v: &Tensor) -> String {
        match v.first() {
            None => "0".into(),
            Some((w, _)) => {
                let d = self.generators().word_degree(w);
                match self.lie.to_lie_expr(v, d) {
                    Ok(e) => e.to_string(),
                    Err(_) => format!("{v:?}"),
                }
            }
        }
    }
}

/// Data of one degree piece `L_n`.
#[derive(Debug)]
pub struct Piece<K: Ord> {
    pub degree: Degree,
    pub basis: Vec<LinComb<K, Q>>,
    /// `∂` of each basis vector.
    pub images: Vec<LinComb<K, Q>>,
    /// Echelon of the images, tagged by basis index.
    pub image_echelon: Echelon<K>,
    /// Cycle basis, as combinations of basis indices.
    pub cycle_combos: Vec<LinComb<usize, Q>>,
    pub cycles: Vec<LinComb<K, Q>>,
}

/// Homology of a degree piece.
#[derive(Debug)]
pub struct HomologyData<K: Ord> {
    pub degree: Degree,
    pub cycle_dim: usize,
    pub boundary_dim: usize,
    pub representatives: Vec<LinComb<K, Q>>,
    /// Echelon over boundaries (tags below `boundary_tags`) and
    /// representatives (tags from `boundary_tags` on).
    echelon: Echelon<K>,
    boundary_tags: usize,
    rep_tag_index: BTreeMap<usize, usize>,
}

impl<K: Ord + Clone> HomologyData<K> {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of a cycle's class in the representative basis.
    pub fn class_of<C: Coeff>(&self, cycle: &LinComb<K, C>) -> Result<Vec<C>> {
        let red = self.echelon.reduce(cycle);
        if !red.remainder.is_zero() {
            return Err(Error::NotACycle);
        }
        let mut coords = vec![C::zero(); self.representatives.len()];
        for (t, c) in red.combo.iter() {
            if let Some(&i) = self.rep_tag_index.get(t) {
                coords[i] = c.clone();
            }
        }
        Ok(coords)
    }

    /// Number of tags used for boundary vectors in the class echelon.
    pub fn boundary_tags(&self) -> usize {
        self.boundary_tags
    }
}

/// A solution family of `∂b = c`.
#[derive(Clone, Debug)]
pub struct Preimage<K: Ord> {
    pub particular: LinComb<K, Poly>,
    /// Cycle basis of the source degree; the general solution adds any
    /// combination of these.
    pub kernel: Vec<LinComb<K, Q>>,
    /// Polynomials that must all vanish for a solution to exist.
    pub conditions: Vec<Poly>,
}

/// Caching engine around a [`DglTarget`].
pub struct Dgl<T: DglTarget> {
    target: T,
    pieces: Mutex<BTreeMap<Degree, Arc<Piece<T::Key>>>>,
    homology: Mutex<BTreeMap<Degree, Arc<HomologyData<T::Key>>>>,
}

impl<T: DglTarget> Dgl<T> {
    pub fn new(target: T) -> Self {
        Dgl {
            target,
            pieces: Mutex::new(BTreeMap::new()),
            homology: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn piece(&self, degree: Degree) -> Result<Arc<Piece<T::Key>>> {
        if let Some(p) = self.pieces.lock().expect("cache lock").get(&degree) {
            return Ok(p.clone());
        }
        let basis = self.target.piece_basis(degree)?;
        let images: Vec<_> = basis.iter().map(|b| apply_d(&self.target, b)).collect();
        let mut image_echelon = Echelon::new();
        let mut cycle_combos = Vec::new();
        for (i, v) in images.iter().enumerate() {
            if let Inserted::Dependent(c) = image_echelon.insert(v.clone(), i) {
                cycle_combos.push(c);
            }
        }
        let cycles = cycle_combos.iter().map(|c| expand(c, &basis)).collect();
        let p = Arc::new(Piece {
            degree,
            basis,
            images,
            image_echelon,
            cycle_combos,
            cycles,
        });
        self.pieces.lock().expect("cache lock").insert(degree, p.clone());
        Ok(p)
    }

    pub fn homology(&self, degree: Degree) -> Result<Arc<HomologyData<T::Key>>> {
        if degree + 1 > self.target.truncation() {
            return Err(Error::TruncationTooLow {
                needed: degree + 1,
                truncation: self.target.truncation(),
            });
        }
        if let Some(h) = self.homology.lock().expect("cache lock").get(&degree) {
            return Ok(h.clone());
        }
        let here = self.piece(degree)?;
        let above = self.piece(degree + 1)?;
        let mut echelon = Echelon::new();
        let mut boundary_dim = 0;
        for (i, v) in above.images.iter().enumerate() {
            if echelon.insert(v.clone(), i) == Inserted::Pivot {
                boundary_dim += 1;
            }
        }
        let boundary_tags = above.images.len();
        let mut representatives = Vec::new();
        let mut rep_tag_index = BTreeMap::new();
        for (j, z) in here.cycles.iter().enumerate() {
            let tag = boundary_tags + j;
            if echelon.insert(z.clone(), tag) == Inserted::Pivot {
                rep_tag_index.insert(tag, representatives.len());
                representatives.push(z.clone());
            }
        }
        let h = Arc::new(HomologyData {
            degree,
            cycle_dim: here.cycles.len(),
            boundary_dim,
            representatives,
            echelon,
            boundary_tags,
            rep_tag_index,
        });
        self.homology.lock().expect("cache lock").insert(degree, h.clone());
        Ok(h)
    }

    /// Solves `∂b = c` for a cycle `c` of the given degree.
    pub fn boundary_preimage(&self, c: &LinComb<T::Key, Poly>, degree: Degree) -> Result<Preimage<T::Key>> {
        if degree + 1 > self.target.truncation() {
            return Err(Error::TruncationTooLow {
                needed: degree + 1,
                truncation: self.target.truncation(),
            });
        }
        if !apply_d(&self.target, c).is_zero() {
            return Err(Error::NotACycle);
        }
        let above = self.piece(degree + 1)?;
        let red = above.image_echelon.reduce(c);
        let mut conditions = Vec::new();
        for (_, p) in red.remainder.iter() {
            if let Some(k) = p.as_constant() {
                if !Coeff::is_zero(&k) {
                    return Err(Error::NotABoundary);
                }
            }
            conditions.push(p.clone());
        }
        Ok(Preimage {
            particular: expand(&red.combo, &above.basis),
            kernel: above.cycles.clone(),
            conditions,
        })
    }
}

/// Homology basis of a free presentation with representatives as Lie
/// expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct HomologyBasis {
    pub degree: Degree,
    pub dimension: usize,
    pub cycle_dim: usize,
    pub boundary_dim: usize,
    pub representatives: Vec<LieExpr>,
}

pub fn homology(l: &DglPresentation, degree: Degree) -> Result<HomologyBasis> {
    let engine = Dgl::new(l.clone());
    let h = engine.homology(degree)?;
    let reps = h
        .representatives
        .iter()
        .map(|r| l.lie().to_lie_expr(r, degree))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomologyBasis {
        degree,
        dimension: h.dimension(),
        cycle_dim: h.cycle_dim,
        boundary_dim: h.boundary_dim,
        representatives: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_lie::LieTree;
    use crate::linalg::rank;
    use crate::scalar::q;
    use proptest::prelude::*;

    fn gens(g: &[(&str, Degree)], t: Degree) -> GeneratorSet {
        GeneratorSet::new(g.iter().map(|(n, d)| (n.to_string(), *d)).collect(), t).unwrap()
    }

    fn br(a: &str, b: &str) -> LieExpr {
        LieExpr::tree(LieTree::bracket(LieTree::leaf(a), LieTree::leaf(b)))
    }

    #[test]
    fn cycle_generator() {
        let l = DglPresentation::new(gens(&[("u", 3)], 8), vec![]).unwrap();
        assert!(l.apply_differential(&LieExpr::generator("u")).unwrap().is_zero());
        assert!(l.check_d_squared().passed);
        let h = homology(&l, 6).unwrap();
        assert_eq!(h.dimension, 1);
        assert_eq!(h.representatives[0].to_string(), "[u,u]");
    }

    #[test]
    fn leibniz_against_tensor_expansion() {
        // |a| even, ∂a = c
        let l = DglPresentation::new(
            gens(&[("a", 2), ("c", 1)], 8),
            vec![("a".into(), LieExpr::generator("c"))],
        )
        .unwrap();
        let d = l.apply_differential(&br("a", "a")).unwrap();
        let got = l.lie().expand_to_tensor(&d).unwrap();
        // brute force: ∂(a⊗a − a⊗a) = 0 as tensors; [a,a] = 0 for even a
        assert!(got.is_zero());
        // ∂[a,c] = [c,c]
        let d2 = l.apply_differential(&br("a", "c")).unwrap();
        assert_eq!(
            l.lie().expand_to_tensor(&d2).unwrap(),
            l.lie().expand_to_tensor(&br("c", "c")).unwrap()
        );
    }

    #[test]
    fn odd_generator_square_differential() {
        // |a| odd, ∂a = c: ∂[a,a] = [c,a] − [a,c] = 2[c,a] with |c| even
        let l = DglPresentation::new(
            gens(&[("a", 3), ("c", 2)], 8),
            vec![("a".into(), LieExpr::generator("c"))],
        )
        .unwrap();
        let d = l
            .lie()
            .expand_to_tensor(&l.apply_differential(&br("a", "a")).unwrap())
            .unwrap();
        let want = l.lie().expand_to_tensor(&br("c", "a")).unwrap().scaled(&q(2));
        assert_eq!(d, want);
    }

    #[test]
    fn corrupted_differential_is_caught() {
        let l = DglPresentation::new(
            gens(&[("c", 1), ("a", 2), ("b", 3)], 8),
            vec![
                ("a".into(), LieExpr::generator("c")),
                ("b".into(), LieExpr::generator("a")),
            ],
        )
        .unwrap();
        let r = l.check_d_squared();
        assert!(!r.passed);
        assert_eq!(r.first_failure.as_deref(), Some("b"));
    }

    #[test]
    fn homology_refuses_low_truncation() {
        let l = DglPresentation::new(gens(&[("u", 3)], 6), vec![]).unwrap();
        assert!(matches!(homology(&l, 6), Err(Error::TruncationTooLow { .. })));
    }

    #[test]
    fn empty_generator_set() {
        let l = DglPresentation::new(gens(&[], 5), vec![]).unwrap();
        assert_eq!(homology(&l, 3).unwrap().dimension, 0);
        assert!(l.check_d_squared().passed);
    }

    #[test]
    fn preimage_of_zero_is_cycle_span() {
        let l = DglPresentation::new(gens(&[("u", 1), ("v", 2)], 6), vec![]).unwrap();
        let e = Dgl::new(l);
        let p = e.boundary_preimage(&LinComb::zero(), 3).unwrap();
        assert!(p.particular.is_zero());
        assert_eq!(p.kernel.len(), e.piece(4).unwrap().basis.len());
    }

    /// A small DGL: x, y of degree 1, w of degree 3 with ∂w = [x,y].
    fn small() -> DglPresentation {
        DglPresentation::new(
            gens(&[("x", 1), ("y", 1), ("w", 3)], 7),
            vec![("w".into(), br("x", "y"))],
        )
        .unwrap()
    }

    #[test]
    fn homology_matches_rank_nullity() {
        let l = small();
        let e = Dgl::new(l.clone());
        for n in 1..=6 {
            let here = e.target().piece_basis(n).unwrap();
            let above = e.target().piece_basis(n + 1).unwrap();
            let dz: Vec<_> = here.iter().map(|b| apply_d(&l, b)).collect();
            let db: Vec<_> = above.iter().map(|b| apply_d(&l, b)).collect();
            let brute = here.len() - rank(&dz) - rank(&db);
            assert_eq!(e.homology(n).unwrap().dimension(), brute, "degree {n}");
        }
    }

    #[test]
    fn preimage_with_parameters() {
        let l = small();
        let e = Dgl::new(l.clone());
        let xy = l.lie().expand_to_tensor(&br("x", "y")).unwrap();
        let c: LinComb<Word, Poly> = xy.lift::<Poly>().times(&Poly::var(0));
        let p = e.boundary_preimage(&c, 2).unwrap();
        assert!(p.conditions.is_empty());
        assert_eq!(apply_d(&l, &p.particular), c);
        // [x,x] is not a boundary
        let xx = l.lie().expand_to_tensor(&br("x", "x")).unwrap().lift::<Poly>();
        assert_eq!(e.boundary_preimage(&xx, 2).unwrap_err(), Error::NotABoundary);
        // λ[x,x] is a boundary only when λ = 0
        let lxx = xx.times(&Poly::var(1));
        let p = e.boundary_preimage(&lxx, 2).unwrap();
        assert_eq!(p.conditions.len(), 1);
    }

    proptest! {
        #[test]
        fn d_squared_vanishes_on_random_elements(coeffs in proptest::collection::vec(-3i64..4, 1..12)) {
            let l = small();
            let e = Dgl::new(l.clone());
            let basis = e.piece(5).unwrap().basis.clone();
            let mut v = LinComb::zero();
            for (b, c) in basis.iter().zip(coeffs.iter()) {
                v.add_scaled(b, &q(*c));
            }
            prop_assert!(apply_d(&l, &apply_d(&l, &v)).is_zero());
        }
    }
}
