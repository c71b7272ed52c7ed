//! Harmonic oscillator on a truncated Fock space (`hbar = m = 1`).
//!
//! `X(t) = (a e^{-i w t} + a^+ e^{i w t}) / sqrt(2 w)`. Green's functions are
//! read off `p0 T(X(t1)...X(tn)) p0 = G p0` with the ground projector `p0`,
//! i.e. through the theta-functional of `p0`. Products of `n` position
//! operators reach at most level `n`, so the vacuum correlators are exact
//! once `fock_dim > n / 2`.

use serde::{Deserialize, Serialize};

use crate::algebra::{c64, CMatrix, Element, Projector, C64};
use crate::error::{Error, Result};
use crate::statistics::theta_functional;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OscillatorConfig {
    pub omega: f64,
    pub fock_dim: usize,
    pub r: f64,
}

impl Default for OscillatorConfig {
    fn default() -> Self {
        Self {
            omega: 1.0,
            fock_dim: 16,
            r: 10.0,
        }
    }
}

impl OscillatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fock_dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "fock_dim {} < 2",
                self.fock_dim
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0 && self.r.is_finite() && self.r > 0.0) {
            return Err(Error::InvalidConfig("omega and r must be positive".into()));
        }
        Ok(())
    }
}

/// Lowering operator `a^-` with `a^- |n> = sqrt(n) |n-1>`.
pub fn lowering(fock_dim: usize) -> Element {
    let mut m = CMatrix::zeros(fock_dim, fock_dim);
    for n in 1..fock_dim {
        m[(n - 1, n)] = c64((n as f64).sqrt(), 0.0);
    }
    Element::new(m).expect("square")
}

pub fn raising(fock_dim: usize) -> Element {
    lowering(fock_dim).adjoint()
}

/// Number operator `a^+ a^-`, exact on the truncated space.
pub fn number(fock_dim: usize) -> Element {
    let levels: Vec<f64> = (0..fock_dim).map(|n| n as f64).collect();
    Element::real_diagonal(&levels)
}

/// `H = w (a^+ a^- + 1/2)`.
pub fn hamiltonian(config: &OscillatorConfig) -> Element {
    let levels: Vec<f64> = (0..config.fock_dim)
        .map(|n| config.omega * (n as f64 + 0.5))
        .collect();
    Element::real_diagonal(&levels)
}

/// `exp(-s a^+ a^-) = diag(e^{-s n})`.
pub fn damping(fock_dim: usize, s: f64) -> Element {
    let d: Vec<f64> = (0..fock_dim).map(|n| (-s * n as f64).exp()).collect();
    Element::real_diagonal(&d)
}

/// `exp(-r a^+ a^-)`, which tends to the ground projector as `r` grows.
/// Its distance from `|0><0|` is `e^{-r}`.
pub fn oscillator_ground_projector(config: &OscillatorConfig) -> Element {
    damping(config.fock_dim, config.r)
}

/// The exact ground projector `|0><0|`.
pub fn ground_projector(fock_dim: usize) -> Projector {
    let mut m = CMatrix::zeros(fock_dim, fock_dim);
    m[(0, 0)] = c64(1.0, 0.0);
    Projector::new(Element::new(m).expect("square")).expect("rank-one projector")
}

/// `exp(-r1 N) (a^+)^k (a^-)^l exp(-r2 N)`; vanishes as `r1, r2` grow
/// whenever `k + l > 0`.
pub fn auxiliary_product(fock_dim: usize, r1: f64, r2: f64, k: u32, l: u32) -> Element {
    let up = raising(fock_dim).powi(k);
    let down = lowering(fock_dim).powi(l);
    &(&(&damping(fock_dim, r1) * &up) * &down) * &damping(fock_dim, r2)
}

/// `exp(-r1 N) H exp(-r2 N) - (w/2) exp(-(r1 + r2) N)`.
pub fn hamiltonian_sandwich_defect(config: &OscillatorConfig, r1: f64, r2: f64) -> Element {
    let n = config.fock_dim;
    let sandwich = &(&damping(n, r1) * &hamiltonian(config)) * &damping(n, r2);
    &sandwich - &(&damping(n, r1 + r2) * (0.5 * config.omega))
}

/// Heisenberg-picture position operator.
pub fn position(config: &OscillatorConfig, t: f64) -> Element {
    let n = config.fock_dim;
    let phase = C64::from_polar(1.0, -config.omega * t);
    let s = 1.0 / (2.0 * config.omega).sqrt();
    let m = (lowering(n).matrix() * phase + raising(n).matrix() * phase.conj()) * c64(s, 0.0);
    Element::new(m).expect("square")
}

/// `T(X(t1)...X(tn))`: later times to the left. Coincident times carry the
/// same operator, so their order is immaterial and equals the symmetric
/// product.
pub fn time_ordered_product(config: &OscillatorConfig, times: &[f64]) -> Element {
    let mut sorted = times.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted
        .iter()
        .fold(Element::identity(config.fock_dim), |acc, &t| {
            &acc * &position(config, t)
        })
}

/// `G(t1, ..., tn)` from `p0 T(...) p0 = G p0`.
pub fn green_function(config: &OscillatorConfig, times: &[f64]) -> Result<C64> {
    config.validate()?;
    theta_functional(
        &ground_projector(config.fock_dim),
        &time_ordered_product(config, times),
    )
}

pub fn oscillator_green(t1: f64, t2: f64, config: &OscillatorConfig) -> Result<C64> {
    green_function(config, &[t1, t2])
}

/// Closed form `e^{-i w |t|} / (2 w)` of the two-point function.
pub fn feynman_propagator(t: f64, omega: f64) -> C64 {
    C64::from_polar(1.0 / (2.0 * omega), -omega * t.abs())
}

/// Prefactor of `D^c(t) = c * int dE e^{-itE} / (w^2 - E^2 - i0)` for which
/// the Gaussian generating functional `Z(j)` reproduces the two-point
/// function.
pub const DC_PREFACTOR: f64 = 1.0 / std::f64::consts::TAU;

/// `D^c(t)` with a given prefactor. Closing the contour around the pole at
/// `E = w - i0` gives `int dE ... = (pi i / w) e^{-i w |t|}`.
pub fn causal_kernel(t: f64, omega: f64, prefactor: f64) -> C64 {
    c64(0.0, prefactor * std::f64::consts::PI / omega) * C64::from_polar(1.0, -omega * t.abs())
}

/// Two-point function from `Z(j) = exp((i/2) j D^c j)`:
/// `(1/i)^2 d^2 Z / dj dj = -i D^c`.
pub fn generating_functional_two_point(t: f64, omega: f64, prefactor: f64) -> C64 {
    c64(0.0, -1.0) * causal_kernel(t, omega, prefactor)
}

/// Sum over all pairings of `times` of products of `two_point` values.
pub fn wick_pairing_sum<F>(times: &[f64], two_point: &F) -> C64
where
    F: Fn(f64, f64) -> C64,
{
    match times {
        [] => c64(1.0, 0.0),
        [_] => c64(0.0, 0.0),
        [first, rest @ ..] => (0..rest.len())
            .map(|k| {
                let mut remaining = rest.to_vec();
                let partner = remaining.remove(k);
                two_point(*first, partner) * wick_pairing_sum(&remaining, two_point)
            })
            .sum(),
    }
}
