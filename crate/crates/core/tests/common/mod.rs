#![allow(dead_code)]

use aqm::algebra::{c64, CMatrix, CVector, Element, Observable};
use aqm::statistics::QuantumState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| c64(gaussian(rng), gaussian(rng)))
}

pub fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Element {
    Element::new(random_matrix(rng, n)).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Observable {
    let m = random_matrix(rng, n);
    Observable::new(Element::new((&m + m.adjoint()) * c64(0.5, 0.0)).unwrap()).unwrap()
}

pub fn random_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| c64(gaussian(rng), gaussian(rng)));
    let norm = v.norm();
    v / c64(norm, 0.0)
}

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let qr = random_matrix(rng, n).qr();
    qr.q()
}

pub fn random_pure_state(rng: &mut ChaCha8Rng, n: usize) -> QuantumState {
    QuantumState::pure(&random_unit_vector(rng, n)).unwrap()
}

/// `G G^dagger / tr`, full rank with probability one.
pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> QuantumState {
    let g = random_matrix(rng, n);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    QuantumState::from_density(rho / tr).unwrap()
}

/// `U diag(values) U^dagger`.
pub fn conjugated_diagonal(u: &CMatrix, values: &[f64]) -> Observable {
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&x| c64(x, 0.0)),
    ));
    let m = u * d * u.adjoint();
    Observable::with_tolerance(Element::new(m).unwrap(), 1e-9).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
