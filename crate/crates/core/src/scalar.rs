//! Exact scalars: rationals, and Laurent polynomials over the rationals used
//! for parameterized coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficients of sparse vectors: a Q-vector space.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn scaled(&self, s: &Q) -> Self;
    fn negated(&self) -> Self;
    fn from_rational(x: Q) -> Self;
}

/// Coefficients that can also be multiplied together.
pub trait Ring: Coeff {
    fn one() -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Coeff for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn scaled(&self, s: &Q) -> Self {
        self * s
    }
    fn negated(&self) -> Self {
        -self.clone()
    }
    fn from_rational(x: Q) -> Self {
        x
    }
}

impl Ring for Q {
    fn one() -> Self {
        One::one()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

/// Product of variables with integer (possibly negative) exponents.
/// Stored sorted by variable, no zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<(u32, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: u32) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_exponents(mut exps: Vec<(u32, i32)>) -> Self {
        exps.sort_unstable();
        let mut out: Vec<(u32, i32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        out.retain(|&(_, e)| e != 0);
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, i32)] {
        &self.0
    }

    pub fn degree_in(&self, v: u32) -> i32 {
        self.0.iter().find(|&&(w, _)| w == v).map(|&(_, e)| e).unwrap_or(0)
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.iter().all(|&(_, e)| e > 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() && j < b.len() {
            if a[i].0 < b[j].0 {
                out.push(a[i]);
                i += 1;
            } else if a[i].0 > b[j].0 {
                out.push(b[j]);
                j += 1;
            } else {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, e)| (v, -e)).collect())
    }

    /// Removes variable `v`, returning its exponent.
    pub fn split_off(&self, v: u32) -> (i32, Monomial) {
        let e = self.degree_in(v);
        (e, Monomial(self.0.iter().copied().filter(|&(w, _)| w != v).collect()))
    }

    fn display(&self, names: &dyn Fn(u32) -> String) -> String {
        let mut parts = Vec::new();
        let mut denom = Vec::new();
        for &(v, e) in &self.0 {
            let n = names(v);
            let (bucket, e) = if e > 0 { (&mut parts, e) } else { (&mut denom, -e) };
            if e == 1 {
                bucket.push(n);
            } else {
                bucket.push(format!("{n}^{e}"));
            }
        }
        let num = parts.join("*");
        if denom.is_empty() {
            num
        } else {
            let num = if num.is_empty() { "1".to_string() } else { num };
            if denom.len() == 1 {
                format!("{num}/{}", denom[0])
            } else {
                format!("{num}/({})", denom.join("*"))
            }
        }
    }
}

/// Multivariate Laurent polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn constant(c: Q) -> Self {
        let mut p = Poly::default();
        if !Zero::is_zero(&c) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(v: u32) -> Self {
        Poly::monomial(Monomial::var(v), q(1))
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Poly::default();
        if !Zero::is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if Zero::is_zero(&c) {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if Zero::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(|| q(0))
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(q(0)),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|&(v, _)| v)).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    pub fn total_degree(&self) -> i32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: u32) -> i32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Affine decomposition `c0 + Σ c_v v`; `None` unless every monomial has
    /// total degree at most one with non-negative exponents.
    pub fn affine_parts(&self) -> Option<(Q, BTreeMap<u32, Q>)> {
        let mut c0 = q(0);
        let mut lin = BTreeMap::new();
        for (m, c) in &self.terms {
            match m.0.as_slice() {
                [] => c0 = c.clone(),
                [(v, 1)] => {
                    lin.insert(*v, c.clone());
                }
                _ => return None,
            }
        }
        Some((c0, lin))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(q(1));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `v := value`. Negative powers of `v` require `value` to be
    /// a single monomial term; otherwise `None`.
    pub fn substitute(&self, v: u32, value: &Poly) -> Option<Poly> {
        if !self.vars().contains(&v) {
            return Some(self.clone());
        }
        let inverse = match value.terms.len() {
            1 => {
                let (m, c) = value.terms.iter().next().unwrap();
                Some(Poly::monomial(m.inverse(), c.recip()))
            }
            _ => None,
        };
        let mut cache: BTreeMap<i32, Poly> = BTreeMap::new();
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(v);
            let power = match cache.get(&e) {
                Some(p) => p.clone(),
                None => {
                    let p = if e >= 0 {
                        value.pow(e as u32)
                    } else {
                        inverse.as_ref()?.pow((-e) as u32)
                    };
                    cache.insert(e, p.clone());
                    p
                }
            };
            out = out + power.mul_monomial(&rest, c);
        }
        Some(out)
    }

    /// Evaluates at a full assignment. Errors (None) on a missing variable or
    /// division by zero.
    pub fn eval(&self, values: &dyn Fn(u32) -> Option<Q>) -> Option<Q> {
        let mut total = q(0);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = values(v)?;
                if e < 0 && Zero::is_zero(&x) {
                    return None;
                }
                let mut p = q(1);
                for _ in 0..e.unsigned_abs() {
                    p *= &x;
                }
                if e < 0 {
                    p = p.recip();
                }
                t *= p;
            }
            total += t;
        }
        Some(total)
    }

    /// Substitutes rationals for some of the variables.
    pub fn partial_eval(&self, values: &BTreeMap<u32, Q>) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            let mut zero_div = false;
            for &(v, e) in &m.0 {
                match values.get(&v) {
                    Some(x) => {
                        if e < 0 && Zero::is_zero(x) {
                            zero_div = true;
                        }
                        let mut p = q(1);
                        for _ in 0..e.unsigned_abs() {
                            p *= x;
                        }
                        if e < 0 && !zero_div {
                            p = p.recip();
                        }
                        coeff *= p;
                    }
                    None => rest.push((v, e)),
                }
            }
            if !zero_div {
                out.add_term(Monomial(rest), coeff);
            }
        }
        out
    }

    /// Largest monomial dividing every term (componentwise minimum exponent).
    pub fn monomial_content(&self) -> Monomial {
        let mut iter = self.terms.keys();
        let Some(first) = iter.next() else {
            return Monomial::one();
        };
        let mut mins: BTreeMap<u32, i32> = first.0.iter().copied().collect();
        for m in iter {
            let here: BTreeMap<u32, i32> = m.0.iter().copied().collect();
            for (v, e) in mins.iter_mut() {
                *e = (*e).min(*here.get(v).unwrap_or(&0));
            }
            for (v, e) in here {
                mins.entry(v).or_insert(0);
                let cur = mins.get_mut(&v).unwrap();
                *cur = (*cur).min(e);
            }
        }
        Monomial::from_exponents(mins.into_iter().collect())
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.terms.values().next_back() {
            Some(c) => {
                let inv = c.recip();
                self.scaled(&inv)
            }
            None => self.clone(),
        }
    }

    pub fn display(&self, names: &dyn Fn(u32) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.display(names);
            if mono.is_empty() {
                out.push_str(&fmt_q(&a));
            } else if a.is_one() {
                out.push_str(&mono);
            } else if mono.starts_with("1/") {
                // c * 1/x reads better as c/x
                out.push_str(&format!("{}{}", fmt_q(&a), &mono[1..]));
            } else {
                out.push_str(&format!("{}*{}", fmt_q(&a), mono));
            }
        }
        out
    }

    pub fn to_f64_hint(&self) -> Option<f64> {
        self.as_constant().and_then(|c| c.to_f64())
    }
}

impl std::ops::Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl std::ops::Sub for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.negated()
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
    fn scaled(&self, s: &Q) -> Self {
        if Zero::is_zero(s) {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }
    fn negated(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
    fn from_rational(x: Q) -> Self {
        Poly::constant(x)
    }
}

impl Ring for Poly {
    fn one() -> Self {
        Poly::constant(q(1))
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

/// Names for polynomial variables (parameters).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamNames {
    names: Vec<String>,
}

impl ParamNames {
    pub fn fresh(&mut self, name: impl Into<String>) -> u32 {
        self.names.push(name.into());
        (self.names.len() - 1) as u32
    }

    pub fn name(&self, v: u32) -> String {
        self.names.get(v as usize).cloned().unwrap_or_else(|| format!("p{v}"))
    }

    pub fn find(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn show(&self, p: &Poly) -> String {
        p.display(&|v| self.name(v))
    }
}
