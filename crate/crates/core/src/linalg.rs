//! Incremental row echelon form over the rationals on sparse vectors.
//!
//! Every inserted vector carries a tag. Rows remember which combination of
//! tagged inputs they equal, so reductions report both the remainder and
//! the combination of inputs that was subtracted. Right-hand sides may
//! carry coefficients in any [`Coeff`] (for example polynomials in
//! parameters) while the rows themselves stay rational.

use std::collections::BTreeMap;
use std::ops::Bound;

use crate::graded::LinComb;
use crate::scalar::{Coeff, Q};

#[derive(Clone, Debug)]
struct Row<K: Ord> {
    vec: LinComb<K, Q>,
    lead: Q,
    combo: LinComb<usize, Q>,
}

/// Outcome of [`Echelon::insert`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inserted {
    /// The vector was independent; it now owns a pivot.
    Pivot,
    /// The vector was dependent: the returned combination of tags
    /// (including the new tag with coefficient 1) sums to zero.
    Dependent(LinComb<usize, Q>),
}

/// Result of reducing a vector against an [`Echelon`]:
/// `input = remainder + Σ combo[t] · vector(t)`.
#[derive(Clone, Debug)]
pub struct Reduction<K: Ord, C> {
    pub remainder: LinComb<K, C>,
    pub combo: LinComb<usize, C>,
}

#[derive(Clone, Debug)]
pub struct Echelon<K: Ord> {
    rows: Vec<Row<K>>,
    pivots: BTreeMap<K, usize>,
}

impl<K: Ord> Default for Echelon<K> {
    fn default() -> Self {
        Echelon {
            rows: Vec::new(),
            pivots: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.pivots.contains_key(k)
    }

    pub fn pivot_keys(&self) -> impl Iterator<Item = &K> {
        self.pivots.keys()
    }

    pub fn insert(&mut self, mut v: LinComb<K, Q>, tag: usize) -> Inserted {
        let mut combo = LinComb::term(tag, crate::scalar::q(1));
        loop {
            let (k, c) = match v.first() {
                None => return Inserted::Dependent(combo),
                Some((k, c)) => (k.clone(), c.clone()),
            };
            match self.pivots.get(&k) {
                Some(&r) => {
                    let row = &self.rows[r];
                    let f = -(c / &row.lead);
                    v.add_scaled(&row.vec, &f);
                    combo.add_scaled(&row.combo, &f);
                }
                None => {
                    self.pivots.insert(k, self.rows.len());
                    self.rows.push(Row { vec: v, lead: c, combo });
                    return Inserted::Pivot;
                }
            }
        }
    }

    /// Reduces `v` until no pivot key remains in it.
    pub fn reduce<C: Coeff>(&self, v: &LinComb<K, C>) -> Reduction<K, C> {
        let mut rem = v.clone();
        let mut combo: LinComb<usize, C> = LinComb::zero();
        let mut cursor: Option<K> = None;
        loop {
            let lower = match &cursor {
                None => Bound::Unbounded,
                Some(k) => Bound::Excluded(k.clone()),
            };
            let next = rem
                .range((lower, Bound::Unbounded))
                .find(|(k, _)| self.pivots.contains_key(*k))
                .map(|(k, c)| (k.clone(), c.clone()));
            let Some((k, c)) = next else { break };
            let row = &self.rows[self.pivots[&k]];
            let inv = crate::scalar::q(1) / &row.lead;
            let f = c.scaled(&inv);
            for (key, x) in row.vec.iter() {
                rem.add_term_ref(key, &f.scaled(&-x.clone()));
            }
            for (t, x) in row.combo.iter() {
                combo.add_term_ref(t, &f.scaled(x));
            }
            cursor = Some(k);
        }
        Reduction { remainder: rem, combo }
    }

    pub fn contains(&self, v: &LinComb<K, Q>) -> bool {
        self.reduce(v).remainder.is_zero()
    }
}

/// Kernel of the linear map sending tag `i` to `images[i]`, as combinations
/// of tags.
pub fn kernel<K: Ord + Clone>(images: &[LinComb<K, Q>]) -> Vec<LinComb<usize, Q>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, v) in images.iter().enumerate() {
        if let Inserted::Dependent(c) = e.insert(v.clone(), i) {
            out.push(c);
        }
    }
    out
}

/// Rank of a family of vectors.
pub fn rank<K: Ord + Clone>(vectors: &[LinComb<K, Q>]) -> usize {
    let mut e = Echelon::new();
    for (i, v) in vectors.iter().enumerate() {
        e.insert(v.clone(), i);
    }
    e.rank()
}

/// Expands a combination of tags into the combination of the tagged vectors.
pub fn expand<K: Ord + Clone, C: Coeff>(combo: &LinComb<usize, C>, vectors: &[LinComb<K, Q>]) -> LinComb<K, C> {
    let mut out = LinComb::zero();
    for (t, c) in combo.iter() {
        for (k, x) in vectors[*t].iter() {
            out.add_term_ref(k, &c.scaled(x));
        }
    }
    out
}

/// Determinant of a dense square rational matrix by Gaussian
/// elimination.
pub fn determinant(m: &[Vec<Q>]) -> Q {
    use crate::scalar::Ring;
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &piv;
            for c in col..n {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
        }
    }
    det
}
