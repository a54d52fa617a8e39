//! The word-length filtration on `(Λ sL, δ)` and its spectral sequence.
//!
//! `F_p` is spanned by words of length at most `p`. For a page `k`,
//!
//! - `Z^k_p = F_p ∩ δ⁻¹(F_{p−k})`,
//! - `D^k_p = F_p ∩ δ(F_{p+k})`,
//! - `E^k_p = Z^k_p / (Z^{k−1}_{p−1} + D^{k−1}_p)`,
//!
//! each computed separately in every total degree. Words of total degree up
//! to `max_degree` are generated, so blocks are exact through
//! `max_degree − 1`.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{Degree, LinComb};
use crate::linalg::{kernel, Echelon, Inserted};
use crate::linf::{brackets_to_coderivation, words_up_to, Coderivation, LInfStructure, SymWord};
use crate::scalar::{Coeff, Q};

/// Keys order longer words first, so echelon pivots strip the longest
/// component of a vector before shorter ones.
pub type FKey = (Reverse<usize>, SymWord);

fn key(w: SymWord) -> FKey {
    (Reverse(w.len()), w)
}

pub type Vector = LinComb<FKey, Q>;

/// Quillen chains with the word-length filtration, through a total degree.
#[derive(Clone, Debug)]
pub struct FilteredChains {
    codifferential: Coderivation,
    max_degree: Degree,
    words: BTreeMap<Degree, Vec<SymWord>>,
    images: BTreeMap<SymWord, Vector>,
}

impl FilteredChains {
    /// `max_degree` bounds the total degree of generated words. Letters must
    /// have positive suspended degree.
    pub fn new(codifferential: Coderivation, max_degree: Degree) -> Result<Self> {
        let sdeg = codifferential.suspended_degrees();
        if sdeg.iter().any(|&d| d <= 0) {
            return Err(Error::Refused(
                "the word-length filtration is only handled for L concentrated in degrees ≥ 0".into(),
            ));
        }
        let mut words: BTreeMap<Degree, Vec<SymWord>> = BTreeMap::new();
        let mut images = BTreeMap::new();
        for w in words_up_to(&sdeg, max_degree.max(0) as usize, max_degree) {
            let d: Degree = w.iter().map(|&i| sdeg[i]).sum();
            let image: Vector = codifferential
                .apply(&w)
                .into_iter_terms()
                .map(|(u, c)| (key(u), c))
                .collect();
            images.insert(w.clone(), image);
            words.entry(d).or_default().push(w);
        }
        Ok(FilteredChains {
            codifferential,
            max_degree,
            words,
            images,
        })
    }

    /// Filtered chains of an L∞ structure. Structures built with outputs
    /// discarded above some degree `D` are exact only on words of degree at
    /// most `D + 2`, and `max_degree` must respect that.
    pub fn of_structure(l: &LInfStructure, max_degree: Degree) -> Result<Self> {
        if let Some(d) = l.complete_through() {
            if max_degree > d + 2 {
                return Err(Error::TruncationTooLow {
                    needed: max_degree - 2,
                    truncation: d,
                });
            }
        }
        FilteredChains::new(brackets_to_coderivation(l), max_degree)
    }

    pub fn codifferential(&self) -> &Coderivation {
        &self.codifferential
    }

    pub fn max_degree(&self) -> Degree {
        self.max_degree
    }

    /// Highest degree whose page blocks are exact.
    pub fn certified_through(&self) -> Degree {
        self.max_degree - 1
    }

    /// Longest word of the given degree.
    pub fn max_length(&self, degree: Degree) -> usize {
        self.words
            .get(&degree)
            .map(|ws| ws.iter().map(Vec::len).max().unwrap_or(0))
            .unwrap_or(0)
    }

    fn check_degree(&self, degree: Degree) -> Result<()> {
        if degree > self.max_degree {
            return Err(Error::DegreeOverflow {
                degree,
                truncation: self.max_degree,
            });
        }
        Ok(())
    }

    /// Words of length at most `p` in the given degree.
    pub fn filtration_subspace(&self, p: usize, degree: Degree) -> Result<Vec<SymWord>> {
        self.check_degree(degree)?;
        Ok(self
            .words
            .get(&degree)
            .map(|ws| ws.iter().filter(|w| w.len() <= p).cloned().collect())
            .unwrap_or_default())
    }

    fn words_within(&self, p: i64, degree: Degree) -> Vec<&SymWord> {
        self.words
            .get(&degree)
            .map(|ws| ws.iter().filter(|w| (w.len() as i64) <= p).collect())
            .unwrap_or_default()
    }

    pub fn delta(&self, v: &Vector) -> Vector {
        let mut out = Vector::zero();
        for ((_, w), c) in v.iter() {
            out.add_scaled(&self.images[w], c);
        }
        out
    }

    /// `Z^k_p` in one degree.
    pub fn cycles(&self, k: i64, p: i64, degree: Degree) -> Vec<Vector> {
        let source = self.words_within(p, degree);
        let cut = p - k;
        let proj: Vec<Vector> = source
            .iter()
            .map(|w| {
                self.images[*w]
                    .iter()
                    .filter(|((Reverse(len), _), _)| *len as i64 > cut)
                    .map(|(kk, c)| (kk.clone(), c.clone()))
                    .collect()
            })
            .collect();
        kernel(&proj)
            .into_iter()
            .map(|combo| {
                combo
                    .iter()
                    .map(|(i, c)| (key(source[*i].clone()), c.clone()))
                    .collect()
            })
            .collect()
    }

    /// `D^k_p` in one degree.
    pub fn boundaries(&self, k: i64, p: i64, degree: Degree) -> Vec<Vector> {
        let source = self.words_within(p + k, degree + 1);
        let proj: Vec<Vector> = source
            .iter()
            .map(|w| {
                self.images[*w]
                    .iter()
                    .filter(|((Reverse(len), _), _)| *len as i64 > p)
                    .map(|(kk, c)| (kk.clone(), c.clone()))
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut ech = Echelon::new();
        for combo in kernel(&proj) {
            let mut v = Vector::zero();
            for (i, c) in combo.iter() {
                v.add_scaled(&self.images[source[*i]], c);
            }
            if ech.insert(v.clone(), out.len()) == Inserted::Pivot {
                out.push(v);
            }
        }
        out
    }

    /// The block `E^k_p` in one degree.
    pub fn block(&self, k: usize, p: usize, degree: Degree) -> Result<Block> {
        self.check_degree(degree + 1)?;
        let (k, pi) = (k as i64, p as i64);
        let mut echelon = Echelon::new();
        let mut tag = 0;
        for v in self
            .cycles(k - 1, pi - 1, degree)
            .into_iter()
            .chain(self.boundaries(k - 1, pi, degree))
        {
            echelon.insert(v, tag);
            tag += 1;
        }
        let killed = tag;
        let mut reps = Vec::new();
        let mut rep_tags = BTreeMap::new();
        for v in self.cycles(k, pi, degree) {
            if echelon.insert(v.clone(), tag) == Inserted::Pivot {
                rep_tags.insert(tag, reps.len());
                reps.push(v);
            }
            tag += 1;
        }
        Ok(Block {
            page: k as usize,
            p,
            degree,
            representatives: reps,
            echelon,
            killed,
            rep_tags,
        })
    }

    /// Page `k` through the certified range.
    pub fn page(&self, k: usize) -> Result<Page> {
        let mut blocks = BTreeMap::new();
        for degree in 1..=self.certified_through() {
            for p in 1..=self.max_length(degree) {
                let b = self.block(k, p, degree)?;
                if !b.representatives.is_empty() {
                    blocks.insert((p, degree), b);
                }
            }
        }
        let mut differentials = BTreeMap::new();
        for (&(p, degree), b) in &blocks {
            let target = if p > k { blocks.get(&(p - k, degree - 1)) } else { None };
            let mut matrix = Vec::new();
            for r in &b.representatives {
                match target {
                    Some(t) => matrix.push(t.class_of(&self.delta(r))?),
                    None => matrix.push(Vec::new()),
                }
            }
            differentials.insert((p, degree), matrix);
        }
        Ok(Page {
            k,
            certified_through: self.certified_through(),
            blocks,
            differentials,
        })
    }
}

/// `E^k_p` in a single degree.
#[derive(Clone, Debug)]
pub struct Block {
    pub page: usize,
    pub p: usize,
    pub degree: Degree,
    pub representatives: Vec<Vector>,
    echelon: Echelon<FKey>,
    killed: usize,
    rep_tags: BTreeMap<usize, usize>,
}

impl Block {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of an element of `Z^k_p` in this quotient.
    pub fn class_of(&self, v: &Vector) -> Result<Vec<Q>> {
        let red = self.echelon.reduce(v);
        if !red.remainder.is_zero() {
            return Err(Error::Invalid(format!(
                "element does not lie in Z^{}_{} in degree {}",
                self.page, self.p, self.degree
            )));
        }
        let mut out = vec![Q::zero(); self.representatives.len()];
        for (t, c) in red.combo.iter() {
            if *t >= self.killed {
                if let Some(&i) = self.rep_tags.get(t) {
                    out[i] = c.clone();
                }
            }
        }
        Ok(out)
    }
}

/// A page: nonzero blocks keyed by `(p, degree)`, and for each block the
/// matrix of `d^k` into the block `(p − k, degree − 1)` (rows indexed by
/// representatives; empty rows when the target block is zero).
#[derive(Clone, Debug)]
pub struct Page {
    pub k: usize,
    pub certified_through: Degree,
    pub blocks: BTreeMap<(usize, Degree), Block>,
    pub differentials: BTreeMap<(usize, Degree), Vec<Vec<Q>>>,
}

impl Page {
    pub fn dimension(&self, p: usize, degree: Degree) -> usize {
        self.blocks.get(&(p, degree)).map_or(0, Block::dimension)
    }

    pub fn total_dimension(&self, degree: Degree) -> usize {
        self.blocks
            .iter()
            .filter(|((_, d), _)| *d == degree)
            .map(|(_, b)| b.dimension())
            .sum()
    }

    pub fn is_zero_differential(&self) -> bool {
        self.differentials
            .values()
            .all(|m| m.iter().all(|row| row.iter().all(Coeff::is_zero)))
    }

    /// Rank of `d^k` leaving the block `(p, degree)`.
    pub fn rank_from(&self, p: usize, degree: Degree) -> usize {
        let Some(m) = self.differentials.get(&(p, degree)) else {
            return 0;
        };
        let rows: Vec<LinComb<usize, Q>> = m.iter().map(|row| row.iter().cloned().enumerate().collect()).collect();
        crate::linalg::rank(&rows)
    }

    /// First nonzero differential, as `(p, degree, representative index)`.
    pub fn first_nonzero(&self) -> Option<(usize, Degree, usize)> {
        for (&(p, d), m) in &self.differentials {
            for (i, row) in m.iter().enumerate() {
                if row.iter().any(|c| !Coeff::is_zero(c)) {
                    return Some((p, d, i));
                }
            }
        }
        None
    }
}

/// Result of a collapse check, always stamped with its range.
#[derive(Clone, Debug, PartialEq)]
pub enum Collapse {
    /// `d^j = 0` for `from_page ≤ j ≤ last_page` through `degree`; pages
    /// past `last_page` vanish for length reasons in that range.
    Collapses {
        from_page: usize,
        last_page: usize,
        through_degree: Degree,
    },
    Differential {
        page: usize,
        p: usize,
        degree: Degree,
        element: Vector,
        image: Vector,
    },
}

/// Checks `d^j = 0` for all `j ≥ from_page` on blocks of degree at most
/// `max_degree`.
pub fn collapses_through(chains: &FilteredChains, from_page: usize, max_degree: Degree) -> Result<Collapse> {
    if max_degree > chains.certified_through() {
        return Err(Error::TruncationTooLow {
            needed: max_degree + 1,
            truncation: chains.max_degree(),
        });
    }
    let last = (1..=max_degree).map(|d| chains.max_length(d)).max().unwrap_or(0);
    for j in from_page..=last.max(from_page) {
        let page = chains.page(j)?;
        for (&(p, d), m) in &page.differentials {
            if d > max_degree {
                continue;
            }
            for (i, row) in m.iter().enumerate() {
                if row.iter().any(|c| !Coeff::is_zero(c)) {
                    let element = page.blocks[&(p, d)].representatives[i].clone();
                    let image = chains.delta(&element);
                    return Ok(Collapse::Differential {
                        page: j,
                        p,
                        degree: d,
                        element,
                        image,
                    });
                }
            }
        }
    }
    Ok(Collapse::Collapses {
        from_page,
        last_page: last.max(from_page),
        through_degree: max_degree,
    })
}

/// Homology of `(Λ sL, δ)` in one degree, for comparison with the limit
/// of the spectral sequence.
pub fn chain_homology_dimension(chains: &FilteredChains, degree: Degree) -> Result<usize> {
    chains.check_degree(degree + 1)?;
    let here = chains.max_length(degree) as i64;
    let above = chains.max_length(degree + 1) as i64;
    let cycles = chains.cycles(here + 1, here, degree).len();
    let boundaries = chains.boundaries(above, here, degree).len();
    Ok(cycles - boundaries)
}

/// Renders a chain as `2*x^2y - z`, letters named by `names`.
pub fn show_vector(v: &Vector, names: &[String]) -> String {
    crate::whitehead::show_combination(v.iter().map(|((_, w), c)| (c.clone(), show_word(w, names))))
}

pub fn show_word(w: &[usize], names: &[String]) -> String {
    let mut out = String::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        out.push_str(&names[w[i]]);
        if j - i > 1 {
            out.push_str(&format!("^{}", j - i));
        }
        i = j;
    }
    out
}

#[cfg(test)]
mod tests;
