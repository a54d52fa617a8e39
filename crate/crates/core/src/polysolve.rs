//! Small exact solver for polynomial systems in parameters: repeated affine
//! elimination, with optional variables known to be nonzero, and a bounded
//! rational search as a fallback.

use std::collections::{BTreeMap, BTreeSet};

use crate::scalar::{q, Coeff, Monomial, Poly, Q};

/// Outcome of [`eliminate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Elimination {
    /// Some equation reduced to a nonzero constant (or to a monomial in
    /// variables assumed nonzero). Carries the offending original equation.
    Inconsistent(Poly),
    /// `solved` lists `v := expr` in the order found; each expression only
    /// mentions variables not solved before it. `residual` holds the
    /// equations that could not be reduced further.
    Reduced {
        solved: Vec<(u32, Poly)>,
        residual: Vec<Poly>,
    },
}

/// Strips monomial factors in variables assumed nonzero.
fn strip_nonzero(p: &Poly, nonzero: &BTreeSet<u32>) -> Poly {
    let content = p.monomial_content();
    let keep: Vec<(u32, i32)> = content
        .exponents()
        .iter()
        .filter(|(v, _)| nonzero.contains(v))
        .map(|&(v, e)| (v, -e))
        .collect();
    if keep.is_empty() {
        p.clone()
    } else {
        p.mul_monomial(&Monomial::from_exponents(keep), &q(1))
    }
}

/// Finds a variable `v` with `p = a·v + rest`, where `a` is a nonzero
/// constant or a monomial in nonzero variables and `rest` is free of `v`.
fn affine_variable(p: &Poly, nonzero: &BTreeSet<u32>) -> Option<(u32, Poly)> {
    let vars = p.vars();
    for &v in vars.iter().rev() {
        if nonzero.contains(&v) {
            continue;
        }
        let mut lead: Option<(Monomial, Q)> = None;
        let mut rest = Poly::default();
        let mut ok = true;
        for (m, c) in p.terms() {
            let (e, other) = m.split_off(v);
            match e {
                0 => rest.add_term(m.clone(), c.clone()),
                1 if lead.is_none() && other.exponents().iter().all(|(w, _)| nonzero.contains(w)) => {
                    lead = Some((other, c.clone()))
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if let Some((m, c)) = lead {
            // v = -rest / (c m)
            let value = rest.mul_monomial(&m.inverse(), &(-c.recip()));
            return Some((v, value));
        }
    }
    None
}

/// A lone term `c·m` forces a variable of `m` to vanish when exactly one
/// variable of `m` is not assumed nonzero.
fn forced_zero(p: &Poly, nonzero: &BTreeSet<u32>) -> Option<u32> {
    if p.num_terms() != 1 {
        return None;
    }
    let (m, _) = p.terms().next()?;
    let free: Vec<u32> = m
        .exponents()
        .iter()
        .filter(|(v, e)| *e > 0 && !nonzero.contains(v))
        .map(|(v, _)| *v)
        .collect();
    match free.as_slice() {
        [v] => Some(*v),
        _ => None,
    }
}

fn is_unit(p: &Poly, nonzero: &BTreeSet<u32>) -> bool {
    if p.num_terms() != 1 {
        return false;
    }
    let (m, c) = p.terms().next().expect("one term");
    !Coeff::is_zero(c) && m.exponents().iter().all(|(v, _)| nonzero.contains(v))
}

/// Eliminates variables from `eqs = 0` while the system stays affine in
/// some variable. Variables in `nonzero` are never solved for; monomial
/// factors in them are divided out.
pub fn eliminate(eqs: &[Poly], nonzero: &BTreeSet<u32>) -> Elimination {
    let mut pending: Vec<(Poly, Poly)> = eqs.iter().map(|e| (e.clone(), e.clone())).collect();
    let mut solved: Vec<(u32, Poly)> = Vec::new();
    loop {
        let mut progress = false;
        let mut next = Vec::new();
        let mut step: Option<(u32, Poly)> = None;
        for (orig, e) in pending.drain(..) {
            let e = strip_nonzero(&e, nonzero);
            if e.is_zero() {
                continue;
            }
            if is_unit(&e, nonzero) {
                return Elimination::Inconsistent(orig);
            }
            if step.is_none() {
                if let Some(v) = forced_zero(&e, nonzero) {
                    step = Some((v, Poly::default()));
                    progress = true;
                    continue;
                }
                if let Some(s) = affine_variable(&e, nonzero) {
                    step = Some(s);
                    progress = true;
                    continue;
                }
            }
            next.push((orig, e));
        }
        if let Some((v, value)) = step {
            next = next
                .into_iter()
                .map(|(o, e)| {
                    let s = e.substitute(v, &value).expect("polynomial in solved variable");
                    (o, s)
                })
                .collect();
            for (_, earlier) in solved.iter_mut() {
                if let Some(s) = earlier.substitute(v, &value) {
                    *earlier = s;
                }
            }
            solved.push((v, value));
        }
        pending = next;
        if !progress {
            break;
        }
    }
    Elimination::Reduced {
        solved,
        residual: pending.into_iter().map(|(_, e)| e).collect(),
    }
}

/// Applies a list of solved substitutions to `p`.
pub fn apply_solution(p: &Poly, solved: &[(u32, Poly)]) -> Poly {
    let mut out = p.clone();
    for (v, value) in solved {
        if let Some(s) = out.substitute(*v, value) {
            out = s;
        }
    }
    out
}

/// Completes a solution of an affine-eliminated system to rationals by
/// setting every free variable to `free_value`.
pub fn specialize(solved: &[(u32, Poly)], free_value: &Q) -> BTreeMap<u32, Q> {
    let mut values: BTreeMap<u32, Q> = BTreeMap::new();
    let solved_vars: BTreeSet<u32> = solved.iter().map(|(v, _)| *v).collect();
    // expressions were kept fully substituted, so only free variables remain
    for (_, e) in solved {
        for w in e.vars() {
            if !solved_vars.contains(&w) {
                values.entry(w).or_insert_with(|| free_value.clone());
            }
        }
    }
    let frees = values.clone();
    for (v, e) in solved {
        let x = e.partial_eval(&frees).as_constant().unwrap_or_else(|| q(0));
        values.insert(*v, x);
    }
    values
}

/// Small rationals `p/r` with `|p| ≤ bound`, `1 ≤ r ≤ bound`, in lowest terms
/// and ordered by height.
pub fn small_rationals(bound: i64) -> Vec<Q> {
    let mut out = vec![q(0)];
    for h in 1..=bound {
        for r in 1..=h {
            for p in [h, -h] {
                let x = Q::new(p.into(), r.into());
                if !out.contains(&x) {
                    out.push(x);
                }
            }
            if r < h {
                for p in [r, -r] {
                    let x = Q::new(p.into(), h.into());
                    if !out.contains(&x) {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

/// Searches a box of small rationals for a common zero of `eqs` avoiding
/// zeros of `nonzero` variables. Gives up after `budget` evaluations.
pub fn search_zero(eqs: &[Poly], nonzero: &BTreeSet<u32>, bound: i64, budget: usize) -> Option<BTreeMap<u32, Q>> {
    let vars: Vec<u32> = eqs
        .iter()
        .flat_map(|e| e.vars())
        .chain(nonzero.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let grid = small_rationals(bound);
    let mut idx = vec![0usize; vars.len()];
    let mut spent = 0;
    loop {
        spent += 1;
        if spent > budget {
            return None;
        }
        let values: BTreeMap<u32, Q> = vars.iter().zip(&idx).map(|(v, &i)| (*v, grid[i].clone())).collect();
        let admissible = nonzero
            .iter()
            .all(|v| values.get(v).is_some_and(|x| !Coeff::is_zero(x)));
        if admissible
            && eqs
                .iter()
                .all(|e| e.eval(&|v| values.get(&v).cloned()).is_some_and(|x| Coeff::is_zero(&x)))
        {
            return Some(values);
        }
        // odometer over the grid, cheapest heights first per coordinate
        let mut pos = 0;
        loop {
            if pos == vars.len() {
                return None;
            }
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn affine_system() {
        // x + y = 1, x - y = 3
        let eqs = vec![v(0) + v(1) - Poly::constant(q(1)), v(0) - v(1) - Poly::constant(q(3))];
        let Elimination::Reduced { solved, residual } = eliminate(&eqs, &BTreeSet::new()) else {
            panic!("expected a solution");
        };
        assert!(residual.is_empty());
        let vals = specialize(&solved, &q(0));
        assert_eq!(vals[&0], q(2));
        assert_eq!(vals[&1], q(-1));
    }

    #[test]
    fn inconsistent_affine() {
        let eqs = vec![v(0) + v(1), v(0) + v(1) - Poly::constant(q(1))];
        assert!(matches!(
            eliminate(&eqs, &BTreeSet::new()),
            Elimination::Inconsistent(_)
        ));
    }

    #[test]
    fn nonzero_hypotheses() {
        // a, b ≠ 0: b (2c + a²) = 0 and c (c + a²) = 0 has no solution
        let a = v(0);
        let b = v(1);
        let c = v(2);
        let eqs = vec![b.mul(&(c.scaled(&q(2)) + a.mul(&a))), c.mul(&(c.clone() + a.mul(&a)))];
        let nz: BTreeSet<u32> = [0, 1].into_iter().collect();
        assert!(matches!(eliminate(&eqs, &nz), Elimination::Inconsistent(_)));
    }

    #[test]
    fn quadratic_residual_and_search() {
        // x² = 4 stays as residual; search finds x = ±2
        let eqs = vec![v(0).mul(&v(0)) - Poly::constant(q(4))];
        let Elimination::Reduced { residual, .. } = eliminate(&eqs, &BTreeSet::new()) else {
            panic!()
        };
        assert_eq!(residual.len(), 1);
        let z = search_zero(&residual, &BTreeSet::new(), 5, 1000).unwrap();
        assert_eq!(z[&0].clone() * z[&0].clone(), q(4));
        // x² = 2 has no rational zero
        let none = vec![v(0).mul(&v(0)) - Poly::constant(q(2))];
        assert!(search_zero(&none, &BTreeSet::new(), 6, 10_000).is_none());
    }

    #[test]
    fn rational_grid() {
        let g = small_rationals(2);
        assert_eq!(g.len(), 7);
        assert!(g.contains(&Q::new((-1).into(), 2.into())));
    }
}
