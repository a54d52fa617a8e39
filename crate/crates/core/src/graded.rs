//! Graded bookkeeping: degrees, sparse linear combinations, Koszul signs,
//! shuffles and suspension.

use std::collections::btree_map::{self, BTreeMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Ring, Q};

/// Homological degree. Negative values are allowed at this layer.
pub type Degree = i32;

pub fn is_odd(d: Degree) -> bool {
    d.rem_euclid(2) == 1
}

/// `(-1)^e` as ±1.
pub fn sign_pow(e: i64) -> i8 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Sparse linear combination of basis keys. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LinComb<K: Ord, C = Q> {
    terms: BTreeMap<K, C>,
}

impl<K: Ord, C> Default for LinComb<K, C> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<K: Ord + fmt::Debug, C: fmt::Debug> fmt::Debug for LinComb<K, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<K: Ord + Clone, C: Coeff> LinComb<K, C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(k: K, c: C) -> Self {
        let mut v = Self::default();
        v.add_term(k, c);
        v
    }

    pub fn basis(k: K) -> Self
    where
        C: Ring,
    {
        Self::term(k, C::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, K, C> {
        self.terms.iter()
    }

    pub fn keys(&self) -> btree_map::Keys<'_, K, C> {
        self.terms.keys()
    }

    pub fn range<R: std::ops::RangeBounds<K>>(&self, r: R) -> btree_map::Range<'_, K, C> {
        self.terms.range(r)
    }

    pub fn get(&self, k: &K) -> Option<&C> {
        self.terms.get(k)
    }

    pub fn coeff(&self, k: &K) -> C {
        self.terms.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn first(&self) -> Option<(&K, &C)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, k: K, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_term_ref(&mut self, k: &K, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(k) {
            Some(x) => {
                x.add_assign_ref(c);
                if x.is_zero() {
                    self.terms.remove(k);
                }
            }
            None => {
                self.terms.insert(k.clone(), c.clone());
            }
        }
    }

    pub fn remove(&mut self, k: &K) -> Option<C> {
        self.terms.remove(k)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &LinComb<K, C>, s: &Q) {
        for (k, c) in &other.terms {
            self.add_term_ref(k, &c.scaled(s));
        }
    }

    pub fn add_assign(&mut self, other: &LinComb<K, C>) {
        for (k, c) in &other.terms {
            self.add_term_ref(k, c);
        }
    }

    pub fn sub_assign(&mut self, other: &LinComb<K, C>) {
        for (k, c) in &other.terms {
            self.add_term_ref(k, &c.negated());
        }
    }

    pub fn scaled(&self, s: &Q) -> Self {
        let mut out = Self::default();
        out.add_scaled(self, s);
        out
    }

    pub fn negated(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.negated())).collect(),
        }
    }

    /// Multiplies every coefficient by a ring element.
    pub fn times(&self, r: &C) -> Self
    where
        C: Ring,
    {
        let mut out = Self::default();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), c.mul_ref(r));
        }
        out
    }

    /// Applies a linear map given on basis keys.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<K2, Q>) -> LinComb<K2, C> {
        let mut out = LinComb::default();
        for (k, c) in &self.terms {
            for (k2, s) in f(k).iter() {
                out.add_term_ref(k2, &c.scaled(s));
            }
        }
        out
    }

    pub fn map_coeffs<C2: Coeff>(&self, mut f: impl FnMut(&C) -> C2) -> LinComb<K, C2> {
        let mut out = LinComb::default();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    pub fn into_iter_terms(self) -> btree_map::IntoIter<K, C> {
        self.terms.into_iter()
    }
}

impl<K: Ord + Clone> LinComb<K, Q> {
    /// Promotes rational coefficients into another coefficient ring.
    pub fn lift<C: Coeff>(&self) -> LinComb<K, C> {
        self.map_coeffs(|c| C::from_rational(c.clone()))
    }
}

impl<K: Ord + Clone, C: Coeff> FromIterator<(K, C)> for LinComb<K, C> {
    fn from_iter<T: IntoIterator<Item = (K, C)>>(iter: T) -> Self {
        let mut out = Self::default();
        for (k, c) in iter {
            out.add_term(k, c);
        }
        out
    }
}

/// Symbols whose degree is intrinsic to the key.
pub trait Graded {
    fn degree(&self) -> Degree;
}

/// Degree of a homogeneous combination; `None` for zero, error when the
/// terms disagree.
pub fn homogeneous_degree<K: Ord + Clone, C: Coeff>(
    v: &LinComb<K, C>,
    deg: impl Fn(&K) -> Degree,
) -> Result<Option<Degree>> {
    let mut found = None;
    for k in v.keys() {
        let d = deg(k);
        match found {
            None => found = Some(d),
            Some(e) if e != d => {
                return Err(Error::Inhomogeneous { first: e, second: d });
            }
            _ => {}
        }
    }
    Ok(found)
}

/// Koszul sign picked up when graded symbols `x_1 … x_n` are rearranged into
/// `x_{perm[0]} … x_{perm[n-1]}` (0-based) in a graded-commutative setting.
pub fn koszul_sign(perm: &[usize], degrees: &[Degree]) -> Result<i8> {
    if perm.len() != degrees.len() {
        return Err(Error::LengthMismatch {
            expected: degrees.len(),
            found: perm.len(),
        });
    }
    check_permutation(perm)?;
    let mut odd_swaps = 0i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && is_odd(degrees[perm[i]]) && is_odd(degrees[perm[j]]) {
                odd_swaps += 1;
            }
        }
    }
    Ok(sign_pow(odd_swaps))
}

/// Signature of a permutation.
pub fn signature(perm: &[usize]) -> i8 {
    let mut inversions = 0i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    sign_pow(inversions)
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::NotAPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Composition `(a ∘ b)[i] = b[a[i]]`: first rearrange by `b`, then by `a`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().map(|&i| b[i]).collect()
}

/// All `(i, j)`-shuffles of `0..i+j` as 0-based images `σ(0..i+j)`,
/// increasing on the first `i` and on the last `j` slots. With `fix_first`,
/// only those with `σ(0) = 0`.
pub fn shuffles(i: usize, j: usize, fix_first: bool) -> Vec<Vec<usize>> {
    let n = i + j;
    let mut out = Vec::new();
    if fix_first && i == 0 {
        return out;
    }
    for first in itertools::Itertools::combinations(0..n, i) {
        if fix_first && first.first() != Some(&0) {
            continue;
        }
        let mut perm = first.clone();
        perm.extend((0..n).filter(|x| !first.contains(x)));
        out.push(perm);
    }
    out
}

/// Unshuffles of `0..n` into consecutive blocks of the given sizes: every
/// permutation increasing inside each block.
pub fn multi_shuffles(blocks: &[usize]) -> Vec<Vec<usize>> {
    fn go(remaining: &[usize], blocks: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match blocks.split_first() {
            None => out.push(prefix.clone()),
            Some((&b, rest)) => {
                for chosen in itertools::Itertools::combinations(remaining.iter().copied(), b) {
                    let left: Vec<usize> = remaining.iter().copied().filter(|x| !chosen.contains(x)).collect();
                    let len = prefix.len();
                    prefix.extend(&chosen);
                    go(&left, rest, prefix, out);
                    prefix.truncate(len);
                }
            }
        }
    }
    let n: usize = blocks.iter().sum();
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    go(&all, blocks, &mut Vec::new(), &mut out);
    out
}

/// Shift applied to a symbol's degree: `s` raises by one, `s⁻¹` lowers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suspension {
    Up,
    Down,
}

impl Suspension {
    pub fn apply(self, d: Degree) -> Degree {
        match self {
            Suspension::Up => d + 1,
            Suspension::Down => d - 1,
        }
    }

    pub fn inverse(self) -> Suspension {
        match self {
            Suspension::Up => Suspension::Down,
            Suspension::Down => Suspension::Up,
        }
    }
}
