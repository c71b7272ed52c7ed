//! Two-level system with `H = diag(E0, -E0)` and ground class `p0 = diag(0, 1)`.
//!
//! Elementary states of the ground class are sign fields `f` with
//! `f(e_3) = -1`, so every one of them assigns `-E0` to `H`. On the dephased
//! observable `A~ = p0 A p0 + p1 A p1` the ground field returns `Psi_0(A) =
//! A_22` without any averaging.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{c64, CMatrix, Element, Observable};
use crate::elementary::{
    bloch_decompose, time_average_observable, two_level_value, Bloch, TwoLevelSignField,
};
use crate::error::{Error, Result};
use crate::experiments::Check;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoLevelConfig {
    pub seed: u64,
    pub n_states: u64,
    pub e0: f64,
    /// Random observables used for the ensemble and dephasing checks.
    pub n_observables: usize,
    pub n_directions: usize,
}

impl Default for TwoLevelConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            n_states: 1_000_000,
            e0: 1.0,
            n_observables: 100,
            n_directions: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleLine {
    /// `[A_11, A_22, Re A_12, Im A_12]`.
    pub observable: [f64; 4],
    pub mean: f64,
    pub expected: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoLevelReport {
    pub config: TwoLevelConfig,
    /// Sampled states with `f(H) != -E0`, i.e. `f(e_3) != -1`.
    pub ground_energy_violations: u64,
    /// (state, observable) values not equal to `r0 +- r`.
    pub spectrum_violations: u64,
    pub antisymmetry_violations: u64,
    /// Largest `|phi0(A~) - Psi_0(A)|` over the random observables.
    pub dephasing_max_error: f64,
    pub ensemble: Vec<EnsembleLine>,
    pub checks: Vec<Check>,
}

impl TwoLevelReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Random 2x2 Hermitian with entries of order one.
pub fn random_observable<R: Rng>(rng: &mut R) -> Observable {
    let mut u = || rng.random_range(-1.0..1.0);
    let (a, d, br, bi) = (u(), u(), u(), u());
    let m = CMatrix::from_row_slice(2, 2, &[c64(a, 0.0), c64(br, bi), c64(br, -bi), c64(d, 0.0)]);
    Observable::new(Element::new(m).expect("square")).expect("Hermitian by construction")
}

/// Uniform direction on the unit sphere.
pub fn random_direction<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn flat(a: &Observable) -> [f64; 4] {
    let m = a.matrix();
    [m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)].re, m[(0, 1)].im]
}

/// Ground-class field of state number `i`.
pub fn ground_field(seed: u64, i: u64) -> TwoLevelSignField {
    TwoLevelSignField::ground(par::item_seed(seed, i))
}

pub fn two_level_scenario(config: &TwoLevelConfig) -> Result<TwoLevelReport> {
    if config.n_states == 0 {
        return Err(Error::ZeroSamples);
    }
    if !config.e0.is_finite() || config.e0 <= 0.0 {
        return Err(Error::InvalidConfig("E0 must be positive".into()));
    }
    let h = Observable::real_diagonal(&[config.e0, -config.e0]);
    let h_bloch = bloch_decompose(&h)?;
    let mut rng = par::keyed_rng(config.seed, 0x2_1e7e1);
    let observables: Vec<Observable> = (0..config.n_observables)
        .map(|_| random_observable(&mut rng))
        .collect();
    let blochs: Vec<Bloch> = observables
        .iter()
        .map(bloch_decompose)
        .collect::<Result<_>>()?;
    let expected: Vec<f64> = observables.iter().map(|a| a.matrix()[(1, 1)].re).collect();

    struct Partial {
        ground: u64,
        spectrum: u64,
        sums: Vec<f64>,
        squares: Vec<f64>,
    }
    let k = blochs.len();
    let partials = par::map_chunks(config.n_states, |_, range| {
        let mut p = Partial {
            ground: 0,
            spectrum: 0,
            sums: vec![0.0; k],
            squares: vec![0.0; k],
        };
        for i in range {
            let f = ground_field(config.seed, i);
            if f.sign(h_bloch.xi) != -1.0 {
                p.ground += 1;
            }
            for (j, b) in blochs.iter().enumerate() {
                let s = f.sign(b.xi);
                if s != 1.0 && s != -1.0 {
                    p.spectrum += 1;
                }
                let v = b.r0 + b.r * s;
                p.sums[j] += v;
                p.squares[j] += v * v;
            }
        }
        p
    });
    let mut ground_energy_violations = 0;
    let mut spectrum_violations = 0;
    let mut sums = vec![0.0; k];
    let mut squares = vec![0.0; k];
    for p in partials {
        ground_energy_violations += p.ground;
        spectrum_violations += p.spectrum;
        for j in 0..k {
            sums[j] += p.sums[j];
            squares[j] += p.squares[j];
        }
    }
    let n = config.n_states as f64;
    let ensemble: Vec<EnsembleLine> = (0..k)
        .map(|j| {
            let mean = sums[j] / n;
            let var = if n > 1.0 {
                ((squares[j] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            EnsembleLine {
                observable: flat(&observables[j]),
                mean,
                expected: expected[j],
                std_error: (var / n).sqrt(),
            }
        })
        .collect();

    let phi0 = TwoLevelSignField::ground(config.seed);
    let mut dephasing_max_error: f64 = 0.0;
    for (a, &psi0) in observables.iter().zip(&expected) {
        let dephased = time_average_observable(a, &h)?;
        dephasing_max_error =
            dephasing_max_error.max((two_level_value(&phi0, &dephased)? - psi0).abs());
    }

    let mut antisymmetry_violations = 0;
    for i in 0..config.n_directions {
        let f = ground_field(config.seed, i as u64);
        let xi = random_direction(&mut rng);
        if f.sign(xi.map(|x| -x)) != -f.sign(xi) {
            antisymmetry_violations += 1;
        }
    }

    let within_4_sigma = ensemble
        .iter()
        .filter(|l| (l.mean - l.expected).abs() <= 4.0 * l.std_error.max(f64::MIN_POSITIVE))
        .count();
    let mut checks = vec![
        Check::close(
            "ground energy on every state",
            ground_energy_violations as f64,
            0.0,
            0.0,
        ),
        Check::close("spectrum-valued", spectrum_violations as f64, 0.0, 0.0),
        Check::close(
            "antisymmetric sign field",
            antisymmetry_violations as f64,
            0.0,
            0.0,
        ),
        Check::close(
            "dephased value equals ground expectation",
            dephasing_max_error,
            0.0,
            1e-12,
        ),
    ];
    if k > 0 {
        // a 4-sigma band fails for about 6e-5 of observables
        checks.push(Check::at_most(
            "ensemble means outside 4 sigma",
            (k - within_4_sigma) as f64,
            (k as f64 * 0.01).floor(),
            0.0,
        ));
    }
    Ok(TwoLevelReport {
        config: *config,
        ground_energy_violations,
        spectrum_violations,
        antisymmetry_violations,
        dephasing_max_error,
        ensemble,
        checks,
    })
}
