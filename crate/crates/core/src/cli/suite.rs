//! Regression suite over the reference examples. Each criterion is checked
//! exactly as stated; a failing criterion reports what was found instead.

use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::free_lie::LieExpr;
use crate::graded::{is_odd, Degree, LinComb};
use crate::linalg::determinant;
use crate::linf::{brackets_to_coderivation, coderivation_to_brackets, quillen_chains, SymWord};
use crate::quillen_ss::{collapses_through, Collapse, FilteredChains};
use crate::samples::{
    example_algebra, example_family, example_structure, random_binary_structure, random_dgl, random_matrix,
    random_structure,
};
use crate::scalar::{fmt_q, q, qf, Coeff, Monomial, Poly, Q};
use crate::sullivan::{
    conjugated_differential, dualize, graded_det, intrinsic_coformality, multiply, pairing_check, show_element,
    Coformality, Element, QuadraticSolvability,
};
use crate::whitehead::{build_model, formality_obstruction, nine_cell_model, Term, Verdict};

use super::unit;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

fn outcome(id: u8, title: &'static str, checks: Vec<(bool, String)>) -> Outcome {
    let passed = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .into_iter()
        .map(|(ok, s)| format!("{}{s}", if ok { "" } else { "✗ " }))
        .join("; ");
    Outcome {
        id,
        title,
        passed,
        detail,
    }
}

fn failed(id: u8, title: &'static str, e: impl std::fmt::Display) -> Outcome {
    Outcome {
        id,
        title,
        passed: false,
        detail: format!("error: {e}"),
    }
}

pub const TITLES: [&str; 10] = [
    "nine-cell bracket sets",
    "four-fold attaching cycle",
    "two-generator codifferential",
    "quadratic obstruction",
    "sphere products",
    "bracket/coderivation round trips",
    "Quillen chain signs",
    "graded determinant",
    "dualization and pairing",
    "collapse versus coformality",
];

pub fn run_all() -> Vec<Outcome> {
    (1..=10).map(run).collect()
}

pub fn run(id: u8) -> Outcome {
    match id {
        1 => nine_cell(),
        2 => attaching_cycle(),
        3 => codifferential(),
        4 => quadratic_obstruction(),
        5 => sphere_products(),
        6 => round_trips(),
        7 => quillen_signs(),
        8 => graded_determinant(),
        9 => dualization(),
        10 => collapse_versus_coformality(),
        _ => failed(id, "unknown", "no such criterion"),
    }
}

fn seconds(t: Duration) -> String {
    format!("{:.2}s", t.as_secs_f64())
}

fn nine_cell() -> Outcome {
    let title = TITLES[0];
    let start = Instant::now();
    let result = nine_cell_model(12).and_then(|l| {
        let classes = ["v1", "v2", "v3", "v4"].map(LieExpr::generator);
        formality_obstruction(&l, &classes)
    });
    let elapsed = start.elapsed();
    let r = match result {
        Ok(r) => r,
        Err(e) => return failed(1, title, e),
    };
    let mut checks = Vec::new();
    let t_zero = r.in_dgl.class().is_some_and(|c| c.is_constant() && c.is_zero());
    checks.push((
        t_zero,
        match r.in_dgl.class() {
            Some(c) => format!("set in L = {c} ({}), expected {{0}}", r.dgl_class.cardinality.kind()),
            None => "set in L is empty, expected {0}".into(),
        },
    ));
    let form_matches = r.in_homology.class().is_some_and(|c| {
        let p = |n: &str| c.params.find(n).map(Poly::var);
        let (Some(l12), Some(l34), Some(l14), Some(l23), Some(l13), Some(l24)) =
            (p("l12"), p("l34"), p("l14"), p("l23"), p("l13"), p("l24"))
        else {
            return false;
        };
        let form = l12.mul(&l34) + l14.mul(&l23) + l13.mul(&l24);
        let Some(zz) = c.basis.iter().position(|b| b == "[z,z]") else {
            return false;
        };
        [form.clone(), form.scaled(&q(-1))].iter().any(|f| {
            c.coords
                .iter()
                .enumerate()
                .all(|(i, x)| if i == zz { x == f } else { x.is_zero() })
        })
    });
    checks.push((
        form_matches,
        match r.in_homology.class() {
            Some(c) => format!(
                "set in H = {c} ({}), expected ±(l12·l34 + l14·l23 + l13·l24)·[z,z]",
                r.homology_class.cardinality.kind()
            ),
            None => "set in H is empty".into(),
        },
    ));
    checks.push((
        r.verdict == Verdict::NotFormalCardinality,
        format!("verdict {}", r.verdict),
    ));
    checks.push((
        elapsed < Duration::from_secs(60),
        format!("runtime {}", seconds(elapsed)),
    ));
    outcome(1, title, checks)
}

fn attaching_cycle() -> Outcome {
    let title = TITLES[1];
    let m = match build_model(&[3, 3, 3, 3], 10) {
        Ok(m) => m,
        Err(e) => return failed(2, title, e),
    };
    let idx = |s: &str| -> Vec<usize> { s.bytes().map(|b| (b - b'1') as usize).collect() };
    let printed = [
        (1, "123", "4"),
        (-1, "124", "3"),
        (1, "12", "34"),
        (1, "14", "23"),
        (1, "1", "234"),
        (-1, "13", "24"),
        (1, "134", "2"),
    ];
    let got = m.attaching_terms();
    let missing: Vec<String> = printed
        .iter()
        .filter(|(s, a, b)| {
            !got.contains(&Term {
                sign: *s,
                left: idx(a),
                right: idx(b),
            })
        })
        .map(|(s, a, b)| format!("{}[v{a},v{b}]", if *s < 0 { "-" } else { "+" }))
        .collect();
    let d2 = m.presentation().check_d_squared().passed;
    outcome(
        2,
        title,
        vec![
            (d2, format!("d^2 = 0: {d2}")),
            (
                missing.is_empty() && got.len() == printed.len(),
                if missing.is_empty() {
                    format!("{} of 7 terms match: {}", got.len(), m.attaching())
                } else {
                    format!("missing {}", missing.join(" "))
                },
            ),
        ],
    )
}

/// `x^a y^b z^c` with x, y, z = 0, 1, 2.
fn word(a: usize, b: usize, c: usize) -> SymWord {
    let mut w = vec![0; a];
    w.extend(std::iter::repeat_n(1, b));
    w.extend(std::iter::repeat_n(2, c));
    w
}

fn binom2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

fn codifferential() -> Outcome {
    let title = TITLES[2];
    let l = example_structure();
    let c = brackets_to_coderivation(&l);
    let mut mismatches = Vec::new();
    let mut consistent = true;
    for n in 0..=6 {
        for m in 0..=6 {
            let got = c.apply(&word(n, m, 0));
            let mut printed: LinComb<SymWord, Q> = LinComb::zero();
            if m >= 2 {
                printed.add_term(word(n, m - 2, 1), q(binom2(m)));
                if n >= 1 {
                    printed.add_term(word(n - 1, m - 2, 1), q(n as i64 * binom2(m)));
                }
            }
            if got != printed {
                mismatches.push((n, m));
            }
            // the degree-consistent expansion: one pair of y's, or one y
            // and a pair of x's
            let mut expected: LinComb<SymWord, Q> = LinComb::zero();
            if m >= 2 {
                expected.add_term(word(n, m - 2, 1), q(binom2(m)));
            }
            if m >= 1 && n >= 2 {
                expected.add_term(word(n - 2, m - 1, 1), q(m as i64 * binom2(n)));
            }
            consistent &= got == expected;
        }
    }
    let mut checks = vec![(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "stated formula holds for 0 ≤ n,m ≤ 6".to_string()
        } else {
            format!(
                "stated formula differs at {} of 49 (n,m), first {:?}: its second term x^(n-1)y^(m-2)z has degree 2n+4m-3, not 2n+4m-1",
                mismatches.len(),
                mismatches[0]
            )
        },
    )];
    checks.push((
        consistent,
        format!("C(m,2)·x^n y^(m-2) z + m·C(n,2)·x^(n-2) y^(m-1) z matches: {consistent}"),
    ));
    let start = Instant::now();
    let collapse = FilteredChains::of_structure(&l, 31).and_then(|ch| collapses_through(&ch, 2, 30));
    let elapsed = start.elapsed();
    checks.push(match collapse {
        Ok(Collapse::Collapses { .. }) => (true, "d^k = 0 for k ≥ 2 through degree 30".into()),
        Ok(Collapse::Differential { page, degree, .. }) => (false, format!("d^{page} ≠ 0 in degree {degree}")),
        Err(e) => (false, format!("collapse check failed: {e}")),
    });
    checks.push((
        elapsed < Duration::from_secs(120),
        format!("runtime {}", seconds(elapsed)),
    ));
    outcome(3, title, checks)
}

fn quadratic_obstruction() -> Outcome {
    let title = TITLES[3];
    let s = example_algebra();
    let f = example_family();
    let dd = match conjugated_differential(&s, &f) {
        Ok(d) => d,
        Err(e) => return failed(4, title, e),
    };
    let (a, b, c) = (Poly::var(0), Poly::var(1), Poly::var(2));
    let inv_e = Poly::monomial(Monomial::var(3).inverse(), q(1));
    let expected: Element<Poly> = [
        (vec![1, 1], b.mul(&b).mul(&inv_e)),
        (vec![0, 0, 1], b.mul(&(c.scaled(&q(2)) + a.mul(&a))).mul(&inv_e)),
        (vec![0, 0, 0, 0], c.mul(&(c.clone() + a.mul(&a))).mul(&inv_e)),
    ]
    .into_iter()
    .collect();
    let same = dd.images[2] == expected && dd.images[0].is_zero() && dd.images[1].is_zero();
    let solve = dd.solve_quadratic();
    outcome(
        4,
        title,
        vec![
            (same, format!("d'z = {}", dd.show(2, s.names()))),
            (
                matches!(solve, QuadraticSolvability::NoSolution { .. }),
                match &solve {
                    QuadraticSolvability::NoSolution { .. } => "no rational solution with a,b,e ≠ 0".into(),
                    other => format!("solver returned {other:?}"),
                },
            ),
        ],
    )
}

/// Some `n_i = Σ_{j∈S} n_j − 1` with `S` an even subset of size ≥ 4.
fn has_witness(dims: &[i64]) -> bool {
    let k = dims.len();
    (0..k).any(|i| {
        (0u32..1 << k).any(|mask| {
            let size = mask.count_ones();
            mask & (1 << i) == 0
                && size >= 4
                && size % 2 == 0
                && (0..k).filter(|j| mask & (1 << j) != 0).map(|j| dims[j]).sum::<i64>() - 1 == dims[i]
        })
    })
}

fn sphere_products() -> Outcome {
    let title = TITLES[4];
    let mut checks = Vec::new();
    let odd = [3, 5, 7, 9, 11, 13];
    let small_yes = (1..=4).all(|k| {
        (0..k)
            .map(|_| odd.iter().copied())
            .multi_cartesian_product()
            .all(|dims| intrinsic_coformality(&dims) == Ok(Coformality::Yes))
    });
    checks.push((
        small_yes,
        "every product of at most 4 spheres (n ≤ 13) is coformal".into(),
    ));
    let no = [3, 3, 3, 3, 11];
    match intrinsic_coformality(&no) {
        Ok(c) => checks.push((
            c.describe(&no) == "NO, witness n5 = 3+3+3+3−1",
            format!("(3,3,3,3,11): {}", c.describe(&no)),
        )),
        Err(e) => checks.push((false, e.to_string())),
    }
    let yes = [3, 5, 7, 9, 13];
    let r = intrinsic_coformality(&yes);
    checks.push((
        r == Ok(Coformality::Yes),
        format!(
            "(3,5,7,9,13): {}",
            r.as_ref().map_or_else(|e| e.to_string(), |c| c.describe(&yes))
        ),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut disagree = 0;
    let mut negatives = 0;
    for _ in 0..50 {
        let k = rng.gen_range(1..=7);
        let dims: Vec<i64> = (0..k).map(|_| 2 * rng.gen_range(1..=10) + 1).collect();
        let oracle = !has_witness(&dims);
        negatives += usize::from(!oracle);
        if intrinsic_coformality(&dims).map(|c| c == Coformality::Yes) != Ok(oracle) {
            disagree += 1;
        }
    }
    checks.push((
        disagree == 0,
        format!("50 random tuples: {disagree} disagreements, {negatives} negative"),
    ));
    outcome(5, title, checks)
}

fn round_trips() -> Outcome {
    let title = TITLES[5];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut trips, mut discrepancies, mut pass, mut fail) = (0, 0, 0, 0);
    for trial in 0..100 {
        let l = random_structure(&mut rng, trial % 2 == 0);
        let c = brackets_to_coderivation(&l);
        let back = coderivation_to_brackets(&c, l.names().to_vec());
        if back.as_ref() == Ok(&l) && back.map(|b| brackets_to_coderivation(&b)) == Ok(c.clone()) {
            trips += 1;
        }
        let n = 2 * l.arity_bound().max(1);
        let jacobi = l.check_generalized_jacobi(n).passed();
        let top: Degree = l.suspended_degrees().iter().sum::<Degree>() * n as Degree;
        let square = c.check_square_zero(n, top).is_none();
        if jacobi != square {
            discrepancies += 1;
        }
        if jacobi {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    outcome(
        6,
        title,
        vec![
            (trips == 100, format!("{trips}/100 round trips exact")),
            (
                discrepancies == 0,
                format!("{discrepancies} discrepancies between δ² = 0 and Jacobi"),
            ),
            (
                pass > 0 && fail > 0,
                format!("{pass} satisfy and {fail} violate Jacobi"),
            ),
        ],
    )
}

fn quillen_signs() -> Outcome {
    let title = TITLES[6];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut sign_errors, mut square_errors) = (0, 0);
    for _ in 0..50 {
        let l = random_dgl(&mut rng, 7);
        let ch = match quillen_chains(&l, 7) {
            Ok(c) => c,
            Err(e) => return failed(7, title, e),
        };
        let s = &ch.structure;
        for i in 0..s.dim() {
            if ch.codifferential.component(&[i]) != s.bracket(&[i]).scaled(&q(-1)) {
                sign_errors += 1;
            }
            for j in 0..s.dim() {
                let sign = if is_odd(s.degree(i)) { q(1) } else { q(-1) };
                if ch.codifferential.component(&[i, j]) != s.bracket(&[i, j]).scaled(&sign) {
                    sign_errors += 1;
                }
            }
        }
        if ch.verify_square_zero(ch.exact_through()) != Ok(None) {
            square_errors += 1;
        }
    }
    outcome(
        7,
        title,
        vec![
            (sign_errors == 0, format!("h₁ and h₂ sign mismatches: {sign_errors}")),
            (square_errors == 0, format!("δ² ≠ 0 in {square_errors} of 50")),
        ],
    )
}

/// Coefficient of `w_1 ⋯ w_r` in the product of the rows read as linear
/// forms in the free graded commutative algebra.
fn expand_rows(a: &[Vec<Q>], degrees: &[Degree]) -> Q {
    let mut prod: Element<Q> = LinComb::term(Vec::new(), q(1));
    for row in a {
        let y: Element<Q> = row.iter().enumerate().map(|(j, c)| (vec![j], c.clone())).collect();
        prod = multiply(&prod, &y, degrees);
    }
    prod.coeff(&(0..a.len()).collect::<Vec<_>>())
}

fn graded_determinant() -> Outcome {
    let title = TITLES[7];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut det_errors = 0;
    for _ in 0..100 {
        let a = random_matrix(&mut rng, 4);
        let odd: Vec<Degree> = (0..4).map(|_| 2 * rng.gen_range(0..4) + 1).collect();
        if graded_det(&a, &odd) != Ok(determinant(&a)) {
            det_errors += 1;
        }
    }
    let mut zero_errors = 0;
    for t in 0..40 {
        let mut a = random_matrix(&mut rng, 4);
        let degrees: Vec<Degree> = (0..4).map(|_| rng.gen_range(1..=6)).collect();
        let i = rng.gen_range(0..4);
        if t % 2 == 0 {
            a[i] = vec![q(0); 4];
        } else {
            a.iter_mut().for_each(|row| row[i] = q(0));
        }
        if graded_det(&a, &degrees) != Ok(q(0)) {
            zero_errors += 1;
        }
    }
    let mut extraction_errors = 0;
    let mut mixed = 0;
    for _ in 0..100 {
        let r = rng.gen_range(2..=4);
        let a = random_matrix(&mut rng, r);
        let degrees: Vec<Degree> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        if degrees.iter().any(|d| d % 2 == 0) && degrees.iter().any(|d| d % 2 != 0) {
            mixed += 1;
        }
        if graded_det(&a, &degrees) != Ok(expand_rows(&a, &degrees)) {
            extraction_errors += 1;
        }
    }
    outcome(
        8,
        title,
        vec![
            (
                det_errors == 0,
                format!("odd degrees: {det_errors}/100 differ from det"),
            ),
            (zero_errors == 0, format!("zero row/column: {zero_errors}/40 nonzero")),
            (
                extraction_errors == 0,
                format!("coefficient extraction: {extraction_errors}/100 differ ({mixed} mixed parity)"),
            ),
        ],
    )
}

fn dualization() -> Outcome {
    let title = TITLES[8];
    let l = example_structure();
    let s = match dualize(&l) {
        Ok(s) => s,
        Err(e) => return failed(9, title, e),
    };
    let printed: Element<Q> = [(vec![1, 1], q(1)), (vec![0, 0, 1], q(1))].into_iter().collect();
    let dz = s.differential(2);
    let literal = *dz == printed || *dz == printed.scaled(&q(-1));
    let mut checks = vec![(
        literal,
        if literal {
            format!("dz = {}", show_element(dz, s.names()))
        } else {
            format!(
                "dz = {} (expected ±(y^2 + x^2*y); the pairing counts both orderings of y∧y, giving ⟨y^2; sy∧sy⟩ = 2)",
                show_element(dz, s.names())
            )
        },
    )];
    let ratio_ok = *dz == printed.scaled(&qf(1, 2));
    checks.push((ratio_ok, "both terms enter with the same coefficient and sign".into()));
    let classes = [unit(1), unit(0), unit(0)];
    let member = l.eval(&[&classes[0], &classes[1], &classes[2]]);
    match pairing_check(&l, &s, 2, &classes, &member) {
        Ok(rep) => checks.push((
            rep.bracket_form_holds() && rep.determinant_form_holds(),
            format!(
                "v = z, classes (y,x,x): ⟨dz; sy∧sx∧sx⟩ = {}, ε⟨z; sℓ₃⟩ = {}",
                fmt_q(&rep.pairing_of_part),
                fmt_q(&rep.bracket_form)
            ),
        )),
        Err(e) => checks.push((false, format!("v = z, classes (y,x,x): {e}"))),
    }
    outcome(9, title, checks)
}

fn collapse_versus_coformality() -> Outcome {
    let title = TITLES[9];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut failures = 0;
    for _ in 0..30 {
        let l = random_binary_structure(&mut rng);
        let ok = FilteredChains::of_structure(&l, 13)
            .and_then(|ch| collapses_through(&ch, 2, 12))
            .is_ok_and(|c| matches!(c, Collapse::Collapses { .. }));
        if !ok {
            failures += 1;
        }
    }
    let example = FilteredChains::of_structure(&example_structure(), 21)
        .and_then(|ch| collapses_through(&ch, 2, 20))
        .is_ok_and(|c| matches!(c, Collapse::Collapses { .. }));
    let obstruction = conjugated_differential(&example_algebra(), &example_family())
        .map(|d| matches!(d.solve_quadratic(), QuadraticSolvability::NoSolution { .. }))
        .unwrap_or(false);
    outcome(
        10,
        title,
        vec![
            (
                failures == 0,
                format!(
                    "{}/30 ℓ₂-only structures collapse at E² through degree 12",
                    30 - failures
                ),
            ),
            (
                example,
                "two-generator example collapses at E² through degree 20".into(),
            ),
            (
                obstruction,
                "two-generator example is not coformal (no quadratic conjugate)".into(),
            ),
        ],
    )
}
