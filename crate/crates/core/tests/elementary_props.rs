mod common;

use std::sync::Arc;

use aqm::algebra::{c64, jordan_product, spectrum, CMatrix, CVector, Observable};
use aqm::contexts::{characters, joint_eigenbasis, masa_from_observable, Character, Context};
use aqm::elementary::{
    bloch_decompose, construct_elementary_state, ensemble_value_mean, is_equivalent,
    time_average_observable, two_level_value, ElementaryState, OverlapPolicy, TwoLevelSignField,
};
use aqm::statistics::{born_weights, expectation, QuantumState};
use aqm::Error;
use common::*;
use proptest::prelude::*;

fn ground() -> Arc<QuantumState> {
    Arc::new(QuantumState::pure(&CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)])).unwrap())
}

/// A random element of `ctx`: `sum_k v_k |b_k><b_k|`.
fn random_member(r: &mut rand_chacha::ChaCha8Rng, ctx: &Context) -> Observable {
    let v: Vec<f64> = (0..ctx.dim()).map(|_| gaussian(r)).collect();
    ctx.diagonal_observable(&v).unwrap()
}

fn near_spectrum(value: f64, a: &Observable) -> bool {
    spectrum(a.element())
        .unwrap()
        .iter()
        .any(|z| (z.re - value).abs() <= 1e-8 * a.element().frobenius().max(1.0))
}

#[test]
fn construction_example_and_determinism() {
    let eta = masa_from_observable(&Observable::pauli_z());
    let chi = Character::new(&eta, 1).unwrap();
    let phi = construct_elementary_state(&eta, &chi, ground(), 9).unwrap();
    assert_eq!(phi.assigned_count(), 1);
    let contexts: Vec<Context> = (0..30)
        .map(|k| {
            masa_from_observable(&Observable::pauli_along([
                (k as f64).sin(),
                (k as f64).cos(),
                0.3,
            ]))
        })
        .collect();
    let mut a = phi.clone();
    let mut b = construct_elementary_state(&eta, &chi, ground(), 9).unwrap();
    for c in &contexts {
        assert_eq!(a.character_for(c).unwrap(), b.character_for(c).unwrap());
    }
}

#[test]
fn equivalence_examples() {
    let mut r = rng(30);
    let psi = Arc::new(random_pure_state(&mut r, 3));
    let mut a = ElementaryState::for_pure_state(psi.clone(), 1).unwrap();
    let b = ElementaryState::for_pure_state(psi.clone(), 2).unwrap();
    let eta = a.stabilized_context().clone();
    assert!(is_equivalent(&a, &a, &eta).unwrap());
    assert!(is_equivalent(&a, &b, &eta).unwrap());
    let xi = masa_from_observable(&random_hermitian(&mut r, 3));
    assert!(matches!(
        is_equivalent(&a, &b, &xi),
        Err(Error::Unassigned { .. })
    ));
    // find a seed whose character on xi differs from a's
    a.character_for(&xi).unwrap();
    let differs = (3..200).any(|s| {
        let mut c = ElementaryState::for_pure_state(psi.clone(), s).unwrap();
        c.character_for(&xi).unwrap();
        !is_equivalent(&a, &c, &xi).unwrap()
    });
    assert!(differs);
}

#[test]
fn independent_policy_does_not_enforce_shared_values() {
    // A = diag(1, 1, -1) lies in two maximal contexts that split its
    // degenerate block differently
    let a = Observable::real_diagonal(&[1.0, 1.0, -1.0]);
    let b1 = Observable::real_diagonal(&[0.0, 1.0, 2.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rot = Observable::from_real_rows(&[
        vec![0.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 0.0, 2.0],
    ])
    .unwrap();
    let c1 = joint_eigenbasis(&[a.clone(), b1]).unwrap();
    let c2 = joint_eigenbasis(&[a.clone(), rot]).unwrap();
    assert_ne!(c1.label(), c2.label());
    let psi = Arc::new(
        QuantumState::pure(&CVector::from_vec(vec![
            c64(0.6 * s, 0.0),
            c64(0.6 * s, 0.0),
            c64(0.8, 0.0),
        ]))
        .unwrap(),
    );

    let disagreement = (0..500).find(|&seed| {
        let mut phi = ElementaryState::for_pure_state(psi.clone(), seed).unwrap();
        (phi.value(&c1, &a).unwrap() - phi.value(&c2, &a).unwrap()).abs() > 1e-9
    });
    assert!(
        disagreement.is_some(),
        "independent sampling should allow disagreement"
    );

    for seed in 0..500 {
        let mut phi = ElementaryState::for_pure_state(psi.clone(), seed)
            .unwrap()
            .with_policy(OverlapPolicy::Consistent);
        assert!((phi.value(&c1, &a).unwrap() - phi.value(&c2, &a).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn class_inconsistency() {
    let eta = masa_from_observable(&Observable::pauli_z());
    let chi = Character::new(&eta, 0).unwrap();
    assert!(matches!(
        construct_elementary_state(&eta, &chi, ground(), 0),
        Err(Error::ClassInconsistency { .. })
    ));
}

#[test]
fn born_distribution_over_fresh_states() {
    let mut r = rng(31);
    let psi = Arc::new(random_pure_state(&mut r, 3));
    let ctx = masa_from_observable(&random_hermitian(&mut r, 3));
    let weights = born_weights(&psi, &ctx).unwrap().weights().to_vec();
    let n = 1_000_000;
    for k in 0..3 {
        let mut v = vec![0.0; 3];
        v[k] = 1.0;
        let indicator = ctx.diagonal_observable(&v).unwrap();
        let est = ensemble_value_mean(psi.clone(), &ctx, &indicator, n, 100 + k as u64).unwrap();
        let sigma = (weights[k] * (1.0 - weights[k]) / n as f64).sqrt();
        assert!(
            (est.mean - weights[k]).abs() <= 4.0 * sigma,
            "{} vs {}",
            est.mean,
            weights[k]
        );
    }
}

#[test]
fn law_of_large_numbers() {
    let mut r = rng(32);
    let psi = Arc::new(random_pure_state(&mut r, 3));
    let ctx = masa_from_observable(&random_hermitian(&mut r, 3));
    let a = random_member(&mut r, &ctx);
    let mean = expectation(&psi, &a).unwrap();
    let w = born_weights(&psi, &ctx).unwrap();
    let values: Vec<f64> = characters(&ctx)
        .iter()
        .map(|c| aqm::contexts::evaluate(c, &a).unwrap())
        .collect();
    let var: f64 = values
        .iter()
        .zip(w.weights())
        .map(|(v, p)| p * (v - mean).powi(2))
        .sum();
    let n = 20_000u64;
    let bound = 4.0 * var.sqrt() / (n as f64).sqrt();
    let inside = (0..100)
        .filter(|&rep| {
            let est = ensemble_value_mean(psi.clone(), &ctx, &a, n, 1000 + rep).unwrap();
            (est.mean - mean).abs() <= bound
        })
        .count();
    assert!(inside >= 99, "{inside} of 100 within 4 sigma");
}

#[test]
fn bloch_examples() {
    let b = bloch_decompose(&Observable::real_diagonal(&[1.0, -1.0])).unwrap();
    assert_eq!((b.r0, b.r, b.xi), (0.0, 1.0, [0.0, 0.0, 1.0]));
    let b = bloch_decompose(&Observable::pauli_x()).unwrap();
    assert_eq!((b.r0, b.r, b.xi), (0.0, 1.0, [1.0, 0.0, 0.0]));
    let two = Observable::real_diagonal(&[2.0, 2.0]);
    assert!(matches!(
        bloch_decompose(&two),
        Err(Error::DegenerateDirection { .. })
    ));
}

#[test]
fn two_level_value_examples() {
    let e0 = 1.7;
    let h = Observable::real_diagonal(&[e0, -e0]);
    for seed in 0..100 {
        let f = TwoLevelSignField::ground(seed);
        assert_eq!(two_level_value(&f, &h).unwrap(), -e0);
        assert_eq!(two_level_value(&f, &Observable::identity(2)).unwrap(), 1.0);
    }
    let mut r = rng(33);
    for seed in 0..200 {
        let f = TwoLevelSignField::new(seed, [0.0, 0.6, 0.8]);
        let a = random_hermitian(&mut r, 2);
        assert!(near_spectrum(two_level_value(&f, &a).unwrap(), &a));
    }
}

#[test]
fn time_average_examples() {
    let mut r = rng(34);
    let h = Observable::real_diagonal(&[1.0, -1.0]);
    let p0 = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)]));
    let p1 = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]));
    let a = random_hermitian(&mut r, 2);
    let oracle = &p0 * a.matrix() * &p0 + &p1 * a.matrix() * &p1;
    assert!((time_average_observable(&a, &h).unwrap().matrix() - oracle).norm() < 1e-14);

    // commuting observable is unchanged
    let u = random_unitary(&mut r, 3);
    let hh = conjugated_diagonal(&u, &[1.0, 2.0, 3.0]);
    let aa = conjugated_diagonal(&u, &[-0.5, 4.0, 0.1]);
    assert!(
        time_average_observable(&aa, &hh)
            .unwrap()
            .element()
            .distance(aa.element())
            < 1e-10
    );

    // degenerate H keeps whole blocks
    let hd = Observable::real_diagonal(&[1.0, 1.0, 2.0]);
    let ad = random_hermitian(&mut r, 3);
    let avg = time_average_observable(&ad, &hd).unwrap();
    assert!((avg.matrix()[(0, 1)] - ad.matrix()[(0, 1)]).norm() < 1e-14);
    assert!(avg.matrix()[(0, 2)].norm() < 1e-14 && avg.matrix()[(1, 2)].norm() < 1e-14);

    // ground field on the dephased observable gives the ground expectation
    let phi0 = TwoLevelSignField::ground(5);
    for _ in 0..100 {
        let a = random_hermitian(&mut r, 2);
        let dephased = time_average_observable(&a, &h).unwrap();
        let v = two_level_value(&phi0, &dephased).unwrap();
        assert!((v - a.matrix()[(1, 1)].re).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn values_lie_in_spectrum(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let psi = Arc::new(random_pure_state(&mut r, n));
        let mut phi = ElementaryState::for_pure_state(psi, seed).unwrap();
        for _ in 0..4 {
            let ctx = masa_from_observable(&random_hermitian(&mut r, n));
            let a = random_member(&mut r, &ctx);
            let v = phi.value(&ctx, &a).unwrap();
            prop_assert!(near_spectrum(v, &a));
            prop_assert_eq!(phi.value(&ctx, &a).unwrap(), v);
        }
    }

    #[test]
    fn values_are_linear_and_multiplicative(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let psi = Arc::new(random_pure_state(&mut r, n));
        let mut phi = ElementaryState::for_pure_state(psi, seed).unwrap();
        let ctx = masa_from_observable(&random_hermitian(&mut r, n));
        let a = random_member(&mut r, &ctx);
        let b = random_member(&mut r, &ctx);
        let sum = a.combine(1.0, &b, 1.0).unwrap();
        let prod = jordan_product(&a, &b).unwrap();
        let (va, vb) = (phi.value(&ctx, &a).unwrap(), phi.value(&ctx, &b).unwrap());
        prop_assert!((phi.value(&ctx, &sum).unwrap() - va - vb).abs() <= 1e-8);
        prop_assert!((phi.value(&ctx, &prod).unwrap() - va * vb).abs() <= 1e-8);
    }

    #[test]
    fn bloch_reconstructs(seed in any::<u64>()) {
        let a = random_hermitian(&mut rng(seed), 2);
        let b = bloch_decompose(&a).unwrap();
        let rebuilt = Observable::identity(2).combine(b.r0, &Observable::pauli_along(b.xi), b.r).unwrap();
        prop_assert!(rebuilt.element().distance(a.element()) <= 1e-12 * a.element().frobenius().max(1.0));
        let len: f64 = b.xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((len - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sign_field_antisymmetry() {
    let mut r = rng(35);
    for i in 0..10_000u64 {
        let s = [gaussian(&mut r), gaussian(&mut r), gaussian(&mut r)];
        let len = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let f = TwoLevelSignField::new(i, s.map(|x| x / len));
        let xi = [gaussian(&mut r), gaussian(&mut r), gaussian(&mut r)];
        let len = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let xi = xi.map(|x| x / len);
        assert_eq!(f.sign(xi.map(|x| -x)), -f.sign(xi));
    }
    // axis-aligned ties
    let f = TwoLevelSignField::ground(1);
    for xi in [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, -1.0, 0.0],
    ] {
        assert_eq!(f.sign(xi.map(|x: f64| -x)), -f.sign(xi));
    }
}

#[test]
fn sign_field_ensemble_reproduces_born_statistics() {
    let mut r = rng(36);
    let psi = random_pure_state(&mut r, 2);
    let n = 200_000u64;
    for _ in 0..5 {
        let a = random_hermitian(&mut r, 2);
        let mean: f64 = (0..n)
            .map(|s| two_level_value(&TwoLevelSignField::for_state(s, &psi).unwrap(), &a).unwrap())
            .sum::<f64>()
            / n as f64;
        let exp = expectation(&psi, &a).unwrap();
        let b = bloch_decompose(&a).unwrap();
        assert!((mean - exp).abs() <= 4.0 * b.r / (n as f64).sqrt());
    }
}
