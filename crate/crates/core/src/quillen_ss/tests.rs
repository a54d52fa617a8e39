use super::*;
use crate::dgl::DglPresentation;
use crate::free_lie::GeneratorSet;
use crate::linf::structure_of_dgl;
use crate::linf::tests::{example_structure, random_structure};
use crate::scalar::q;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lone_ternary() -> LInfStructure {
    // a of degree 1, e of degree 4, ℓ₃(a,a,a) = e
    let mut l = LInfStructure::new(vec![("a".into(), 1), ("e".into(), 4)]).unwrap();
    l.set_bracket(&[0, 0, 0], LinComb::term(1, q(1))).unwrap();
    l
}

fn word_count(ch: &FilteredChains, degree: Degree) -> usize {
    ch.filtration_subspace(usize::MAX, degree).unwrap().len()
}

#[test]
fn zero_codifferential_keeps_every_word() {
    let l = LInfStructure::new(vec![("u".into(), 1), ("v".into(), 2)]).unwrap();
    let ch = FilteredChains::of_structure(&l, 9).unwrap();
    for k in 0..4 {
        let page = ch.page(k).unwrap();
        assert!(page.is_zero_differential());
        for d in 1..=ch.certified_through() {
            assert_eq!(page.total_dimension(d), word_count(&ch, d));
        }
    }
    assert!(matches!(
        collapses_through(&ch, 0, 8).unwrap(),
        Collapse::Collapses { .. }
    ));
}

#[test]
fn filtration_is_by_length() {
    let l = example_structure();
    let ch = FilteredChains::of_structure(&l, 12).unwrap();
    // degree 8 words: x^4, x^2y, y^2
    assert_eq!(ch.filtration_subspace(1, 8).unwrap().len(), 0);
    assert_eq!(ch.filtration_subspace(2, 8).unwrap().len(), 1);
    assert_eq!(ch.filtration_subspace(3, 8).unwrap().len(), 2);
    assert_eq!(ch.filtration_subspace(4, 8).unwrap().len(), 3);
    assert!(ch.filtration_subspace(1, 13).is_err());
}

#[test]
fn lone_ternary_bracket_gives_second_differential() {
    let l = lone_ternary();
    let ch = FilteredChains::of_structure(&l, 8).unwrap();
    let e1 = ch.page(1).unwrap();
    assert!(e1.is_zero_differential());
    let e2 = ch.page(2).unwrap();
    assert_eq!(e2.first_nonzero(), Some((3, 6, 0)));
    match collapses_through(&ch, 2, 7).unwrap() {
        Collapse::Differential {
            page,
            p,
            degree,
            element,
            image,
        } => {
            assert_eq!((page, p, degree), (2, 3, 6));
            let names = l.names().to_vec();
            assert_eq!(show_vector(&element, &names), "a^3");
            assert!(!image.is_zero());
            assert_eq!(show_vector(&image, &names), "e");
        }
        other => panic!("expected d² ≠ 0, got {other:?}"),
    }
    // E³ has lost a³ and e
    let e3 = ch.page(3).unwrap();
    assert_eq!(e3.dimension(3, 6), 0);
    assert_eq!(e3.dimension(1, 5), 0);
}

#[test]
fn low_pages_are_the_words_when_low_brackets_vanish() {
    let l = lone_ternary();
    let ch = FilteredChains::of_structure(&l, 10).unwrap();
    for k in 0..=2 {
        let page = ch.page(k).unwrap();
        for d in 1..=ch.certified_through() {
            for p in 1..=ch.max_length(d) {
                let words =
                    ch.filtration_subspace(p, d).unwrap().len() - ch.filtration_subspace(p - 1, d).unwrap().len();
                assert_eq!(page.dimension(p, d), words, "E^{k} at ({p}, {d})");
            }
        }
    }
}

#[test]
fn example_collapses_at_second_page() {
    let l = example_structure();
    let ch = FilteredChains::of_structure(&l, 31).unwrap();
    match collapses_through(&ch, 2, 30).unwrap() {
        Collapse::Collapses {
            from_page,
            through_degree,
            ..
        } => {
            assert_eq!((from_page, through_degree), (2, 30));
        }
        other => panic!("expected collapse, got {other:?}"),
    }
    // d¹ is not zero: y² ↦ ±z
    assert!(!ch.page(1).unwrap().is_zero_differential());
}

#[test]
fn free_lie_algebras_collapse_at_second_page() {
    for gens in [
        vec![("x", 1), ("y", 1)],
        vec![("x", 1), ("y", 2)],
        vec![("x", 2), ("y", 3), ("t", 1)],
    ] {
        let g = GeneratorSet::new(gens.iter().map(|(n, d)| (n.to_string(), *d)).collect(), 5).unwrap();
        let dgl = DglPresentation::new(g, vec![]).unwrap();
        let (s, _) = structure_of_dgl(&dgl, 5).unwrap();
        let ch = FilteredChains::of_structure(&s, 7).unwrap();
        assert!(matches!(
            collapses_through(&ch, 2, 6).unwrap(),
            Collapse::Collapses { .. }
        ));
    }
}

#[test]
fn limit_matches_chain_homology() {
    let l = example_structure();
    let ch = FilteredChains::of_structure(&l, 16).unwrap();
    let last = ch.page(16).unwrap();
    for d in 1..=14 {
        assert_eq!(last.total_dimension(d), chain_homology_dimension(&ch, d).unwrap());
    }
}

#[test]
fn nonpositive_suspended_degrees_are_refused() {
    let l = LInfStructure::new(vec![("c".into(), -1)]).unwrap();
    assert!(matches!(FilteredChains::of_structure(&l, 4), Err(Error::Refused(_))));
}

fn compose(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    // rows of a, then through b
    a.iter()
        .map(|row| {
            let width = b.first().map_or(0, Vec::len);
            let mut out = vec![q(0); width];
            for (i, c) in row.iter().enumerate() {
                for (j, x) in b[i].iter().enumerate() {
                    out[j] += c.clone() * x.clone();
                }
            }
            out
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pages_are_homology_of_the_previous(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_structure(&mut rng, true);
        prop_assume!(l.degrees().iter().all(|&d| d >= 0));
        let ch = FilteredChains::of_structure(&l, 10).unwrap();
        let top = ch.certified_through();
        for k in 0..4 {
            let page = ch.page(k).unwrap();
            let next = ch.page(k + 1).unwrap();
            for (&(p, d), m) in &page.differentials {
                // d^k ∘ d^k = 0
                if p > 2 * k && p > k {
                    if let Some(m2) = page.differentials.get(&(p - k, d - 1)) {
                        if !m.is_empty() && !m2.is_empty() && m[0].len() == m2.len() {
                            for row in compose(m, m2) {
                                prop_assert!(row.iter().all(Coeff::is_zero));
                            }
                        }
                    }
                }
                if d >= top {
                    continue;
                }
                let incoming = page.rank_from(p + k, d + 1);
                let outgoing = page.rank_from(p, d);
                prop_assert_eq!(
                    next.dimension(p, d),
                    page.dimension(p, d) - incoming - outgoing,
                    "page {} block ({}, {})", k, p, d
                );
            }
        }
        let last = ch.page(12).unwrap();
        for d in 1..top {
            prop_assert_eq!(last.total_dimension(d), chain_homology_dimension(&ch, d).unwrap());
        }
    }
}
