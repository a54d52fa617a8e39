//! Reference presentations and seeded random generators.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dgl::DglPresentation;
use crate::free_lie::{GeneratorSet, LieExpr, LieTree};
use crate::graded::{Degree, LinComb};
use crate::linf::{multisets, sort_with_sign, LInfStructure};
use crate::scalar::{q, ParamNames, Poly, Q};
use crate::sullivan::{AutomorphismFamily, Element, SullivanAlgebra};

/// x, y, z of degrees 1, 3, 6 with ℓ₂(y,y) = ℓ₃(y,x,x) = z.
pub fn example_structure() -> LInfStructure {
    let mut l = LInfStructure::new(vec![("x".into(), 1), ("y".into(), 3), ("z".into(), 6)]).expect("distinct names");
    l.set_bracket(&[1, 1], LinComb::term(2, q(1))).expect("degrees match");
    l.set_bracket(&[1, 0, 0], LinComb::term(2, q(1)))
        .expect("degrees match");
    l
}

/// x, y, z of degrees 2, 4, 7 with dz = y² + yx².
pub fn example_algebra() -> SullivanAlgebra {
    let dz: Element<Q> = [(vec![1, 1], q(1)), (vec![0, 0, 1], q(1))].into_iter().collect();
    SullivanAlgebra::new(
        vec![("x".into(), 2), ("y".into(), 4), ("z".into(), 7)],
        vec![Element::zero(), Element::zero(), dz],
    )
    .expect("valid algebra")
}

/// x ↦ ax, y ↦ by + cx², z ↦ ez with a, b, e nonzero.
pub fn example_family() -> AutomorphismFamily {
    let mut params = ParamNames::default();
    let a = params.fresh("a");
    let b = params.fresh("b");
    let c = params.fresh("c");
    let e = params.fresh("e");
    let images = vec![
        LinComb::term(vec![0], Poly::var(a)),
        [(vec![1], Poly::var(b)), (vec![0, 0], Poly::var(c))]
            .into_iter()
            .collect(),
        LinComb::term(vec![2], Poly::var(e)),
    ];
    AutomorphismFamily {
        params,
        nonzero: [a, b, e].into_iter().collect(),
        images,
    }
}

/// Random structure on 2 to 4 basis vectors of degrees 1 to 5 with brackets
/// of arity at most 4. With `central`, outputs land on basis vectors that
/// never enter a bracket, so the generalized Jacobi identities hold.
pub fn random_structure(rng: &mut ChaCha8Rng, central: bool) -> LInfStructure {
    let dim = rng.gen_range(2..=4);
    let degrees: Vec<Degree> = (0..dim).map(|_| rng.gen_range(1..=5)).collect();
    let names = (0..dim).map(|i| format!("e{i}"));
    let mut l = LInfStructure::new(names.zip(degrees.iter().copied()).collect()).expect("distinct names");
    let outputs: Vec<usize> = if central {
        let k = rng.gen_range(1..dim);
        (dim - k..dim).collect()
    } else {
        (0..dim).collect()
    };
    let inputs: Vec<usize> = if central {
        (0..dim).filter(|i| !outputs.contains(i)).collect()
    } else {
        (0..dim).collect()
    };
    let max_arity = rng.gen_range(1..=4);
    for k in 1..=max_arity {
        for args in multisets(inputs.len(), k) {
            let args: Vec<usize> = args.iter().map(|&a| inputs[a]).collect();
            if sort_with_sign(&args, &degrees, true).is_none() {
                continue;
            }
            let want = l.output_degree(&args);
            let mut v = LinComb::zero();
            for &o in &outputs {
                if degrees[o] == want && rng.gen_bool(0.6) {
                    v.add_term(o, q(rng.gen_range(-3..=3)));
                }
            }
            l.set_bracket(&args, v).expect("degrees match");
        }
    }
    l
}

/// Random structure whose only bracket is ℓ₂.
pub fn random_binary_structure(rng: &mut ChaCha8Rng) -> LInfStructure {
    loop {
        let l = random_structure(rng, true);
        let mut out = LInfStructure::new(l.names().iter().cloned().zip(l.degrees().iter().copied()).collect())
            .expect("distinct names");
        for args in multisets(l.dim(), 2) {
            let v = l.bracket(&args);
            if sort_with_sign(&args, l.degrees(), true).is_some() {
                out.set_bracket(&args, v).expect("degrees match");
            }
        }
        if out.arity_bound() == 2 {
            return out;
        }
    }
}

/// Random DGL on x, y, w: x and y are cycles of degree 1 to 3 and ∂w is a
/// random combination of the brackets of x and y in degree |w| − 1.
pub fn random_dgl(rng: &mut ChaCha8Rng, truncation: Degree) -> DglPresentation {
    loop {
        let dx = rng.gen_range(1..=3);
        let dy = rng.gen_range(1..=3);
        let pairs = [("x", "x", 2 * dx), ("x", "y", dx + dy), ("y", "y", 2 * dy)];
        let target = pairs[rng.gen_range(0..3)].2;
        let mut e = LieExpr::zero();
        for (a, b, d) in pairs {
            if d == target {
                e = e.plus(
                    q(rng.gen_range(-2..=2)),
                    LieTree::bracket(LieTree::leaf(a), LieTree::leaf(b)),
                );
            }
        }
        if target + 1 > truncation {
            continue;
        }
        let gens = GeneratorSet::new(
            vec![("x".into(), dx), ("y".into(), dy), ("w".into(), target + 1)],
            truncation,
        )
        .expect("degrees within truncation");
        return DglPresentation::new(gens, vec![("w".into(), e)]).expect("homogeneous differential");
    }
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize) -> Vec<Vec<Q>> {
    (0..r)
        .map(|_| (0..r).map(|_| q(rng.gen_range(-4..=4))).collect())
        .collect()
}
