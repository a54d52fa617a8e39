use super::*;
use crate::dgl::DglPresentation;
use crate::free_lie::{GeneratorSet, LieExpr, LieTree};
use crate::linalg::determinant;
use crate::linf::structure_of_dgl;
use crate::samples::{example_algebra, example_family, example_structure, random_matrix, random_structure};
use crate::scalar::qf;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(i: usize) -> LinComb<usize, Q> {
    LinComb::term(i, q(1))
}

fn el(terms: &[(&[usize], Q)]) -> Element<Q> {
    terms.iter().map(|(w, c)| (w.to_vec(), c.clone())).collect()
}

fn same_brackets(a: &LInfStructure, b: &LInfStructure, max_arity: usize) -> bool {
    (1..=max_arity).all(|k| {
        multisets(a.dim(), k)
            .iter()
            .all(|args| a.bracket(args) == b.bracket(args))
    })
}

#[test]
fn example_dualizes_to_half_the_printed_differential() {
    let s = dualize(&example_structure()).unwrap();
    assert_eq!(s.degrees(), &[2, 4, 7]);
    assert_eq!(s.show_differential(2), "1/2*x^2*y + 1/2*y^2");
    assert!(s.differential(0).is_zero() && s.differential(1).is_zero());
    assert_eq!(s.square_zero_violation(), None);
    assert!(s.is_triangular() && s.is_minimal() && !s.is_quadratic());
    // the pairing sign is + for both brackets
    assert_eq!(pairing_sign(7, &[3, 3]), 1);
    assert_eq!(pairing_sign(7, &[3, 1, 1]), 1);
    // ⟨y² ; sy ∧ sy⟩ = 2 counts both matchings
    assert_eq!(pair_monomial(&[1, 1], &[1, 1], s.degrees()), q(2));
}

#[test]
fn zero_brackets_give_zero_differential() {
    let l = LInfStructure::new(vec![("a".into(), 0), ("b".into(), 3)]).unwrap();
    let s = dualize(&l).unwrap();
    assert!((0..2).all(|i| s.differential(i).is_zero()));
}

#[test]
fn negative_degrees_are_refused() {
    let l = LInfStructure::new(vec![("a".into(), -1)]).unwrap();
    assert_eq!(dualize(&l), Err(Error::NegativeDegree));
}

#[test]
fn dgl_brackets_give_linear_plus_quadratic() {
    let g = GeneratorSet::new(vec![("x".into(), 1), ("y".into(), 1), ("w".into(), 3)], 5).unwrap();
    let dw = LieExpr::zero().plus(q(1), LieTree::bracket(LieTree::leaf("x"), LieTree::leaf("y")));
    let dgl = DglPresentation::new(g.clone(), vec![("w".into(), dw)]).unwrap();
    let (l, _) = structure_of_dgl(&dgl, 5).unwrap();
    let s = dualize(&l).unwrap();
    assert!(!s.is_minimal());
    for i in 0..s.len() {
        assert!(s.differential(i).iter().all(|(w, _)| w.len() <= 2));
    }
    // the top degree misses ℓ₁ from the discarded degree above
    for i in 0..s.len() {
        if s.degrees()[i] <= 5 {
            assert!(s.d(s.differential(i)).is_zero());
        }
    }
    let free = DglPresentation::new(g, vec![]).unwrap();
    let (l, _) = structure_of_dgl(&free, 5).unwrap();
    let s = dualize(&l).unwrap();
    assert!(s.is_quadratic());
}

#[test]
fn dualizing_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let central = rng.gen_bool(0.5);
        let l = random_structure(&mut rng, central);
        let s = dualize(&l).unwrap();
        let back = brackets_of(&s).unwrap();
        assert!(same_brackets(&l, &back, 4));
        assert_eq!(dualize(&back).unwrap(), s);
    }
}

#[test]
fn square_zero_iff_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut both, mut neither) = (0, 0);
    for _ in 0..100 {
        let central = rng.gen_bool(0.3);
        let l = random_structure(&mut rng, central);
        let jacobi = l.check_generalized_jacobi(2 * l.arity_bound().max(1)).passed();
        let square_zero = dualize(&l).unwrap().square_zero_violation().is_none();
        assert_eq!(jacobi, square_zero);
        if jacobi {
            both += 1;
        } else {
            neither += 1;
        }
    }
    assert!(both > 0 && neither > 0);
}

#[test]
fn permutation_sign_is_the_koszul_sign() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for r in 1..=5 {
        let degrees: Vec<Degree> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        for perm in (0..r).permutations(r) {
            assert_eq!(permutation_sign(&perm, &degrees), koszul_sign(&perm, &degrees).unwrap());
        }
    }
}

/// Coefficient of `w_1 ⋯ w_r` in `y_1 ⋯ y_r`, `y_i = Σ_j a_{ij} w_j`.
fn extraction_oracle(a: &[Vec<Q>], degrees: &[Degree]) -> Q {
    let r = a.len();
    let mut prod: Element<Q> = LinComb::term(Vec::new(), q(1));
    for row in a {
        let y: Element<Q> = row.iter().enumerate().map(|(j, c)| (vec![j], c.clone())).collect();
        prod = multiply(&prod, &y, degrees);
    }
    prod.coeff(&(0..r).collect::<Vec<_>>())
}

#[test]
fn graded_determinant_basics() {
    assert_eq!(graded_det(&[vec![q(7)]], &[4]).unwrap(), q(7));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = random_matrix(&mut rng, 4);
        let odd: Vec<Degree> = (0..4).map(|_| 2 * rng.gen_range(0..4) + 1).collect();
        assert_eq!(graded_det(&a, &odd).unwrap(), determinant(&a));
    }
    for _ in 0..20 {
        let mut a = random_matrix(&mut rng, 3);
        let degrees: Vec<Degree> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
        let i = rng.gen_range(0..3);
        if rng.gen_bool(0.5) {
            a[i] = vec![q(0); 3];
        } else {
            a.iter_mut().for_each(|row| row[i] = q(0));
        }
        assert_eq!(graded_det(&a, &degrees).unwrap(), q(0));
    }
    // dependent rows need not give zero when degrees are even
    let ones = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
    assert_eq!(graded_det(&ones, &[2, 2]).unwrap(), q(2));
    assert!(graded_det(&ones, &[2]).is_err());
}

#[test]
fn graded_determinant_is_a_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let r = rng.gen_range(1..=4);
        let a = random_matrix(&mut rng, r);
        let degrees: Vec<Degree> = (0..r).map(|_| rng.gen_range(1..=6)).collect();
        assert_eq!(graded_det(&a, &degrees).unwrap(), extraction_oracle(&a, &degrees));
    }
}

#[test]
fn rho_reads_the_coefficient_in_an_adapted_basis() {
    // generators v0..v3 of degrees 2, 2, 3, 3; Φ random in Λ^2 V ⊕ Λ^3 V of
    // degree 5, classes dual to w0 and w2 of a new basis w = P v
    let degrees = vec![2, 2, 3, 3];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let mut p = vec![vec![q(0); 4]; 4];
        loop {
            for block in [[0, 1], [2, 3]] {
                for &i in &block {
                    for &j in &block {
                        p[i][j] = q(rng.gen_range(-3..=3));
                    }
                }
            }
            if !Coeff::is_zero(&determinant(&p)) {
                break;
            }
        }
        // x_q = column q of P⁻¹, so ⟨w_p ; sx_q⟩ = δ_pq
        let inv = invert(&p);
        let classes: Vec<LinComb<usize, Q>> = [0, 2]
            .iter()
            .map(|&qi| (0..4).map(|i| (i, inv[i][qi].clone())).collect())
            .collect();
        let mut phi = Element::zero();
        for w in [vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]] {
            phi.add_term(w, q(rng.gen_range(-3..=3)));
        }
        phi.add_term(vec![0, 0, 0], q(rng.gen_range(-3..=3)));
        // rewrite Φ in the w basis: v = P⁻¹ w
        let v_in_w: Vec<Element<Q>> = (0..4)
            .map(|i| (0..4).map(|j| (vec![j], inv[i][j].clone())).collect())
            .collect();
        let phi_w = apply_morphism(&v_in_w, &phi, &degrees);
        let lambda = phi_w.coeff(&vec![0, 2]);
        assert_eq!(rho(&phi, &degrees, &classes).unwrap(), lambda);
    }
    assert!(rho(&el(&[(&[0], q(1))]), &degrees, &[unit(0), unit(1)]).is_err());
    assert_eq!(rho(&Element::zero(), &degrees, &[unit(0)]).unwrap(), q(0));
}

fn invert(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !Coeff::is_zero(&a[r][col])).unwrap();
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !Coeff::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

#[test]
fn rho_by_definition_and_extraction_agree_on_two_generators() {
    // Φ = v1 v2, ⟨v_i ; sx_j⟩ = δ_ij, mixed parities
    for degrees in [vec![2, 3], vec![3, 3], vec![2, 4], vec![3, 2]] {
        let phi = el(&[(&[0, 1], q(1))]);
        let value = rho(&phi, &degrees, &[unit(0), unit(1)]).unwrap();
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        assert_eq!(value, extraction_oracle(&a, &degrees));
        assert_eq!(value, q(1));
    }
}

#[test]
fn pairing_check_quadratic_case() {
    // ℓ₂(a, b) = c with |a| = 2, |b| = 2, |c| = 4: odd suspended degrees
    let mut l = LInfStructure::new(vec![("a".into(), 2), ("b".into(), 2), ("c".into(), 4)]).unwrap();
    l.set_bracket(&[0, 1], unit(2)).unwrap();
    let s = dualize(&l).unwrap();
    let member = l.bracket(&[0, 1]);
    let rep = pairing_check(&l, &s, 2, &[unit(0), unit(1)], &member).unwrap();
    assert_eq!(rep.alpha_sign, -1);
    // the pairing of d₂c and ρ(d₂c) differ by (−1)^α
    assert_eq!(rep.pairing_of_part, rep.rho.clone() * q(rep.alpha_sign as i64));
    assert_eq!(rep.pairing_of_part, rep.bracket_form);
    assert!(rep.forms_agree());
    assert_eq!(rep.bracket_form, q(rep.epsilon as i64));
    assert_eq!(rep.member, q(1));
    assert_eq!(rep.bracket_form_holds(), rep.epsilon == 1);
}

#[test]
fn pairing_check_refuses_lower_word_length() {
    let l = example_structure();
    let s = dualize(&l).unwrap();
    let z = s.index_of("z").unwrap();
    let classes = [unit(1), unit(0), unit(0)];
    let member = l.eval(&[&classes[0], &classes[1], &classes[2]]);
    let err = pairing_check(&l, &s, z, &classes, &member).unwrap_err();
    assert!(matches!(err, Error::Refused(ref m) if m.contains("y^2")));
    // the cubic part alone satisfies the pairing identity
    let part = s.part(z, 3);
    assert_eq!(part, el(&[(&[0, 0, 1], qf(1, 2))]));
    let lhs = multilinear_pairing(&part, &[unit(1), unit(0), unit(0)], s.degrees());
    assert_eq!(lhs, q(pairing_sign(7, &[3, 1, 1]) as i64));
    assert_eq!(rho(&part, s.degrees(), &classes).unwrap(), q(1));
}

#[test]
fn pairing_check_vanishes_above_the_arity() {
    // ℓ₃(a, a, a) = e, checked with r = 2 against a·a: dv is cubic only
    let mut l = LInfStructure::new(vec![("a".into(), 1), ("e".into(), 4)]).unwrap();
    l.set_bracket(&[0, 0, 0], unit(1)).unwrap();
    let s = dualize(&l).unwrap();
    let err = pairing_check(
        &l,
        &s,
        1,
        &[unit(0), unit(0)],
        &Element::<Q>::zero().map_linear(|_| LinComb::<usize, Q>::zero()),
    );
    // degree of e is 5 but two classes of degree 2 need 3
    assert!(err.is_err());
    let mut l = LInfStructure::new(vec![("a".into(), 1), ("b".into(), 1), ("e".into(), 2)]).unwrap();
    l.set_bracket(&[0, 0, 0], LinComb::zero()).unwrap();
    let s = dualize(&l).unwrap();
    let rep = pairing_check(&l, &s, 2, &[unit(0), unit(1)], &LinComb::zero()).unwrap();
    assert_eq!((rep.bracket_form.clone(), rep.determinant_form.clone()), (q(0), q(0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pairing_forms_agree(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_structure(&mut rng, true);
        let s = dualize(&l).unwrap();
        for v in 0..l.dim() {
            for r in 2..=3 {
                for args in multisets(l.dim(), r) {
                    let classes: Vec<LinComb<usize, Q>> = args.iter().map(|&a| unit(a)).collect();
                    let member = l.eval(&classes.iter().collect::<Vec<_>>());
                    if let Ok(rep) = pairing_check(&l, &s, v, &classes, &member) {
                        prop_assert!(rep.forms_agree());
                        prop_assert_eq!(&rep.pairing_of_part, &rep.bracket_form);
                    }
                }
            }
        }
    }
}

#[test]
fn lower_central_series_cases() {
    let abelian = LInfStructure::new(vec![("a".into(), 1), ("b".into(), 2)]).unwrap();
    let series = lower_central_series(&abelian, 5);
    assert!(series.stable && series.terms[0].is_empty());
    assert!(matches!(is_sullivan(&abelian), SullivanVerdict::Yes { .. }));

    // ℓ₂(a, b) = b in degree 0 never dies
    let mut l = LInfStructure::new(vec![("a".into(), 0), ("b".into(), 0)]).unwrap();
    l.set_bracket(&[0, 1], unit(1)).unwrap();
    assert_eq!(is_sullivan(&l), SullivanVerdict::No { degree: 0 });
}

#[test]
fn positively_graded_minimal_structures_are_sullivan() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..60 {
        let l = random_structure(&mut rng, false);
        if l.dim() > 5 || !l.is_minimal() {
            continue;
        }
        match is_sullivan(&l) {
            SullivanVerdict::Yes { basis } => {
                assert!(check_ordered_basis(&l, &basis).unwrap());
                checked += 1;
            }
            other => panic!("expected a Sullivan structure, got {other:?}"),
        }
    }
    assert!(checked > 10);
    match is_sullivan(&example_structure()) {
        SullivanVerdict::Yes { basis } => {
            assert!(check_ordered_basis(&example_structure(), &basis).unwrap());
            // z is the only bracket output, so it comes last
            assert_eq!(basis.last().unwrap(), &unit(2));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn conjugated_example_differential() {
    let s = example_algebra();
    let f = example_family();
    let inv = f.inverse(s.degrees()).unwrap();
    for i in 0..3 {
        let back = apply_morphism(&f.images, &inv[i], s.degrees());
        assert_eq!(back, generator::<Poly>(i));
    }
    let dd = conjugated_differential(&s, &f).unwrap();
    assert!(dd.images[0].is_zero() && dd.images[1].is_zero());
    let (a, b, c) = (Poly::var(0), Poly::var(1), Poly::var(2));
    let inv_e = Poly::monomial(crate::scalar::Monomial::var(3).inverse(), q(1));
    let expected: Element<Poly> = [
        (vec![1, 1], b.mul(&b).mul(&inv_e)),
        (vec![0, 0, 1], b.mul(&(c.scaled(&q(2)) + a.mul(&a))).mul(&inv_e)),
        (vec![0, 0, 0, 0], c.mul(&(c.clone() + a.mul(&a))).mul(&inv_e)),
    ]
    .into_iter()
    .collect();
    assert_eq!(dd.images[2], expected);
    assert!(matches!(dd.solve_quadratic(), QuadraticSolvability::NoSolution { .. }));
}

#[test]
fn identity_family_keeps_the_differential() {
    let s = example_algebra();
    let dd = conjugated_differential(&s, &AutomorphismFamily::identity(3)).unwrap();
    for i in 0..3 {
        assert_eq!(dd.images[i], s.differential(i).lift());
    }
}

#[test]
fn non_invertible_families_are_refused() {
    let s = example_algebra();
    let mut f = example_family();
    f.nonzero.remove(&1);
    assert!(matches!(conjugated_differential(&s, &f), Err(Error::NotInvertible(_))));
    let mut f = example_family();
    f.images[0] = LinComb::term(vec![1], Poly::var(0));
    assert!(matches!(conjugated_differential(&s, &f), Err(Error::NotInvertible(_))));
}

#[test]
fn removable_higher_terms_are_solved() {
    // dz = y² + 2yx² + x⁴ = (y + x²)²: y ↦ y − x² makes it quadratic
    let s = SullivanAlgebra::new(
        vec![("x".into(), 2), ("y".into(), 4), ("z".into(), 7)],
        vec![
            Element::zero(),
            Element::zero(),
            el(&[(&[1, 1], q(1)), (&[0, 0, 1], q(2)), (&[0, 0, 0, 0], q(1))]),
        ],
    )
    .unwrap();
    let dd = conjugated_differential(&s, &example_family()).unwrap();
    match dd.solve_quadratic() {
        QuadraticSolvability::Solution(values) => {
            let eval = |p: &Poly| p.eval(&|v| values.get(&v).cloned()).unwrap();
            for (_, _, c) in dd.non_quadratic_coefficients() {
                assert!(Coeff::is_zero(&eval(&c)));
            }
            for v in &dd.nonzero {
                assert!(!Coeff::is_zero(&values[v]));
            }
        }
        other => panic!("expected a solution, got {other:?}"),
    }
}

#[test]
fn sphere_products() {
    for dims in [vec![3], vec![3, 5], vec![3, 3, 5], vec![3, 3, 3, 11]] {
        assert_eq!(intrinsic_coformality(&dims).unwrap(), Coformality::Yes);
    }
    let dims = [3, 3, 3, 3, 11];
    let verdict = intrinsic_coformality(&dims).unwrap();
    assert_eq!(
        verdict,
        Coformality::No {
            index: 4,
            subset: vec![0, 1, 2, 3]
        }
    );
    assert_eq!(verdict.describe(&dims), "NO, witness n5 = 3+3+3+3−1");
    assert_eq!(intrinsic_coformality(&[3, 5, 7, 9, 13]).unwrap(), Coformality::Yes);
    assert!(intrinsic_coformality(&[3, 4, 5]).is_err());
    assert!(intrinsic_coformality(&[1, 3]).is_err());
    assert_eq!(intrinsic_coformality_em(&[2, 4, 4]).unwrap(), Coformality::Yes);
    assert!(intrinsic_coformality_em(&[3]).is_err());
}

/// Brute force over all index subsets.
pub(crate) fn coformality_oracle(dims: &[i64]) -> bool {
    let k = dims.len();
    if k <= 4 {
        return true;
    }
    for i in 0..k {
        for mask in 0u32..(1 << k) {
            if mask & (1 << i) != 0 {
                continue;
            }
            let size = mask.count_ones();
            if size < 4 || size % 2 == 1 {
                continue;
            }
            let total: i64 = (0..k).filter(|j| mask & (1 << j) != 0).map(|j| dims[j]).sum();
            if dims[i] == total - 1 {
                return false;
            }
        }
    }
    true
}

#[test]
fn sphere_products_agree_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut negatives = 0;
    for _ in 0..200 {
        let k = rng.gen_range(1..=7);
        let dims: Vec<i64> = (0..k).map(|_| 2 * rng.gen_range(1..=10) + 1).collect();
        let verdict = intrinsic_coformality(&dims).unwrap();
        assert_eq!(verdict == Coformality::Yes, coformality_oracle(&dims), "{dims:?}");
        if let Coformality::No { index, subset } = &verdict {
            negatives += 1;
            assert_eq!(dims[*index], subset.iter().map(|&j| dims[j]).sum::<i64>() - 1);
        }
    }
    assert!(negatives > 0);
}

#[test]
fn exotic_structures_are_valid() {
    let dims = [3, 3, 3, 3, 11];
    let verdict = intrinsic_coformality(&dims).unwrap();
    let l = exotic_structure(&dims, &verdict).unwrap().unwrap();
    assert!(l.check_generalized_jacobi(7).passed());
    assert_eq!(l.bracket(&[0, 1, 2, 3]), unit(4));
    let s = dualize(&l).unwrap();
    assert_eq!(s.square_zero_violation(), None);
    assert!(exotic_structure(&dims, &Coformality::Yes).unwrap().is_none());
}
