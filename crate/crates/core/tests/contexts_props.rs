mod common;

use aqm::algebra::{c64, spectrum, CMatrix, Element, Observable};
use aqm::contexts::{
    characters, contains, evaluate, joint_eigenbasis, masa_from_observable, Context,
};
use aqm::Error;
use common::*;
use proptest::prelude::*;

/// `n^2 - rank` of the stacked linear maps `X -> P_k X - X P_k`, computed
/// entrywise on row-major `vec(X)`.
fn commutant_dim_oracle(projectors: &[CMatrix]) -> usize {
    let n = projectors[0].nrows();
    let nn = n * n;
    let mut system = CMatrix::zeros(nn * projectors.len(), nn);
    for (b, p) in projectors.iter().enumerate() {
        for col in 0..nn {
            let mut x = CMatrix::zeros(n, n);
            x[(col / n, col % n)] = c64(1.0, 0.0);
            let c = p * &x - &x * p;
            for row in 0..nn {
                system[(b * nn + row, col)] = c[(row / n, row % n)];
            }
        }
    }
    let sv = system.svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    nn - sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn assert_orthonormal(ctx: &Context) {
    let b = ctx.basis();
    let gram = b.adjoint() * b;
    assert!((gram - CMatrix::identity(ctx.dim(), ctx.dim())).norm() < 1e-10);
}

#[test]
fn joint_eigenbasis_examples() {
    let ctx = joint_eigenbasis(&[Observable::real_diagonal(&[1.0, 2.0])]).unwrap();
    assert_eq!(ctx.label(), Context::standard(2).label());
    let ctx = masa_from_observable(&Observable::pauli_z());
    assert_eq!(ctx.label(), Context::standard(2).label());

    // Kronecker products of the single-factor eigenbases
    let z = Observable::pauli_z();
    let id = Observable::identity(2);
    let ctx = joint_eigenbasis(&[z.kron(&id), id.kron(&z)]).unwrap();
    assert_eq!(ctx.dim(), 4);
    let e = [
        CMatrix::identity(2, 2).column(0).into_owned(),
        CMatrix::identity(2, 2).column(1).into_owned(),
    ];
    let mut found = [false; 4];
    for k in 0..4 {
        let v = ctx.basis_vector(k);
        for (idx, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let product = e[i].kronecker(&e[j]);
            if (product.dotc(&v)).norm() > 1.0 - 1e-12 {
                found[idx] = true;
            }
        }
    }
    assert!(found.iter().all(|&f| f));
}

#[test]
fn non_commuting_generators_rejected() {
    let err = joint_eigenbasis(&[Observable::pauli_x(), Observable::pauli_z()]).unwrap_err();
    assert_eq!(
        err,
        Error::NonCommuting {
            first: 0,
            second: 1
        }
    );
}

#[test]
fn masa_examples() {
    let ctx = masa_from_observable(&Observable::pauli_along([0.0, 0.6, 0.8]));
    assert_eq!(characters(&ctx).len(), 2);
    for n in 1..=5 {
        let ctx = masa_from_observable(&Observable::identity(n));
        assert_eq!(ctx.label(), Context::standard(n).label());
        assert!((ctx.basis() - CMatrix::identity(n, n)).norm() < 1e-14);
    }
}

#[test]
fn characters_on_identity_and_products() {
    let mut r = rng(11);
    for n in 2..=5 {
        let u = random_unitary(&mut r, n);
        let va: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
        let vb: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
        let a = conjugated_diagonal(&u, &va);
        let b = conjugated_diagonal(&u, &vb);
        let ab = Observable::with_tolerance(a.element() * b.element(), 1e-8).unwrap();
        let ctx = joint_eigenbasis(&[a.clone(), b.clone()]).unwrap();
        let id = Observable::identity(n);
        for ch in characters(&ctx) {
            assert!((evaluate(&ch, &id).unwrap() - 1.0).abs() < 1e-12);
            let prod = evaluate(&ch, &a).unwrap() * evaluate(&ch, &b).unwrap();
            assert!((evaluate(&ch, &ab).unwrap() - prod).abs() < 1e-8);
            let aa =
                Observable::with_tolerance(a.element() * &a.element().adjoint(), 1e-8).unwrap();
            assert!(evaluate(&ch, &aa).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn evaluate_on_diagonal_and_errors() {
    let a = Observable::real_diagonal(&[3.0, -1.0, 0.5]);
    let ctx = Context::standard(3);
    for ch in characters(&ctx) {
        assert_eq!(evaluate(&ch, &a).unwrap(), [3.0, -1.0, 0.5][ch.index()]);
    }
    let z = masa_from_observable(&Observable::pauli_z());
    let ch = &characters(&z)[0];
    assert!(matches!(
        evaluate(ch, &Observable::pauli_x()),
        Err(Error::NotInContext { .. })
    ));
}

#[test]
fn contains_examples() {
    let z = masa_from_observable(&Observable::pauli_z());
    assert!(contains(&z, &Observable::pauli_z()).unwrap());
    assert!(!contains(&z, &Observable::pauli_x()).unwrap());
    assert!(contains(&z, &Observable::identity(2)).unwrap());
    assert!(contains(&z, &Observable::identity(3)).is_err());
    // change-of-basis oracle: tau_1 in the tau_3 basis has off-diagonal 1
    let off = z.in_basis(Observable::pauli_x().element());
    assert!((off[(0, 1)].norm() - 1.0).abs() < 1e-14);
}

#[test]
fn degenerate_observable_gets_canonical_completion() {
    let mut r = rng(12);
    let u = random_unitary(&mut r, 4);
    let a = conjugated_diagonal(&u, &[2.0, 2.0, -1.0, 0.5]);
    let c1 = masa_from_observable(&a);
    let c2 = masa_from_observable(&a);
    assert_eq!(c1.label(), c2.label());
    assert_eq!(characters(&c1).len(), 4);
    assert_orthonormal(&c1);
    assert!(contains(&c1, &a).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_correspondence(seed in any::<u64>(), n in 1usize..=6) {
        let a = random_hermitian(&mut rng(seed), n);
        let ctx = masa_from_observable(&a);
        let mut values: Vec<f64> = characters(&ctx).iter().map(|c| evaluate(c, &a).unwrap()).collect();
        values.sort_by(|x, y| y.total_cmp(x));
        let eigs = spectrum(a.element()).unwrap();
        for (v, s) in values.iter().zip(&eigs) {
            prop_assert!((v - s.re).abs() <= 1e-8 * a.element().frobenius().max(1.0));
        }
    }

    #[test]
    fn contexts_are_maximal(seed in any::<u64>(), n in 2usize..=4) {
        let ctx = masa_from_observable(&random_hermitian(&mut rng(seed), n));
        assert_orthonormal(&ctx);
        let projectors: Vec<CMatrix> = (0..n).map(|k| ctx.projector(k).matrix().clone()).collect();
        prop_assert_eq!(commutant_dim_oracle(&projectors), n);
    }

    #[test]
    fn generators_are_diagonal(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let u = random_unitary(&mut r, n);
        let gens: Vec<Observable> = (0..2)
            .map(|_| {
                let v: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
                conjugated_diagonal(&u, &v)
            })
            .collect();
        let ctx = joint_eigenbasis(&gens).unwrap();
        for g in ctx.generators() {
            let m = ctx.in_basis(g.element());
            let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|(i, j)| i != j)
                .map(|(i, j)| m[(i, j)].norm())
                .fold(0.0, f64::max);
            prop_assert!(off <= 1e-8 * g.element().frobenius().max(1.0));
        }
    }

    #[test]
    fn labels_ignore_phase_and_order(seed in any::<u64>(), n in 2usize..=5, shift in 1usize..5) {
        let mut r = rng(seed);
        let u = random_unitary(&mut r, n);
        let values: Vec<f64> = (0..n).map(|k| k as f64 - 1.3).collect();
        // same eigenvectors, rephased, carrying permuted eigenvalues
        let mut rephased = u.clone();
        for k in 0..n {
            let phase = aqm::algebra::C64::from_polar(1.0, gaussian(&mut r));
            let col = rephased.column(k) * phase;
            rephased.set_column(k, &col);
        }
        let permuted: Vec<f64> = (0..n).map(|k| values[(k + shift) % n]).collect();
        let a = masa_from_observable(&conjugated_diagonal(&u, &values));
        let b = masa_from_observable(&conjugated_diagonal(&rephased, &permuted));
        prop_assert_eq!(a.label(), b.label());
    }

    #[test]
    fn characters_are_multiplicative(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let u = random_unitary(&mut r, n);
        let va: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
        let vb: Vec<f64> = (0..n).map(|_| gaussian(&mut r)).collect();
        let a = conjugated_diagonal(&u, &va);
        let b = conjugated_diagonal(&u, &vb);
        let ab = Observable::with_tolerance(Element::new(a.matrix() * b.matrix()).unwrap(), 1e-8).unwrap();
        let ctx = joint_eigenbasis(&[a.clone(), b.clone()]).unwrap();
        for ch in characters(&ctx) {
            let lhs = evaluate(&ch, &ab).unwrap();
            let rhs = evaluate(&ch, &a).unwrap() * evaluate(&ch, &b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-8);
        }
    }
}
