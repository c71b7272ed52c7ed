//! CHSH combination for the spin-1/2 singlet.
//!
//! Outcomes are `+-1/2`, so the local deterministic bound is `1/2` and the
//! quantum maximum is `1/sqrt 2`. Directions are given as angles in the x-z
//! plane; the correlation depends only on the angle between two directions,
//! `E(a, b) = -cos(b - a) / 4`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Observable;
use crate::contexts::joint_eigenbasis;
use crate::error::{Error, Result};
use crate::experiments::{in_plane, singlet, spin_half};
use crate::par;
use crate::statistics::{expectation, sample_mean_tagged, EnsembleEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChshConfig {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl Default for ChshConfig {
    /// Angles at which the spin-1/2 combination reaches `1/sqrt 2`.
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            a: 0.0,
            a_prime: PI / 2.0,
            b: PI / 4.0,
            b_prime: 3.0 * PI / 4.0,
            n_samples: 1_000_000,
            seed: 2024,
        }
    }
}

impl ChshConfig {
    /// Settings `a = 0, b = pi/8, a' = pi/4, b' = 3pi/8`.
    pub fn eighth_turn_angles() -> Self {
        use std::f64::consts::PI;
        Self {
            a: 0.0,
            b: PI / 8.0,
            a_prime: PI / 4.0,
            b_prime: 3.0 * PI / 8.0,
            ..Self::default()
        }
    }

    /// Measurement pairs in the order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChshMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshResult {
    pub e_table: [f64; 4],
    pub e_sampled: Option<[f64; 4]>,
    pub e_std_errors: Option<[f64; 4]>,
    pub n_exact: f64,
    pub n_sampled: Option<f64>,
    /// Propagated standard error of `n_sampled`.
    pub n_std_error: Option<f64>,
    pub classical_max: f64,
}

/// `N = |E1 - E2| + |E3 + E4|` for correlations in pair order.
pub fn chsh_combination(e: [f64; 4]) -> f64 {
    (e[0] - e[1]).abs() + (e[2] + e[3]).abs()
}

fn product_observable(a: f64, b: f64) -> Observable {
    spin_half(in_plane(a)).kron(&spin_half(in_plane(b)))
}

/// `E(a, b)` on the singlet for spins along angles `a` and `b`.
pub fn correlation(a: f64, b: f64) -> f64 {
    expectation(&singlet(), &product_observable(a, b)).expect("4x4")
}

/// Singlet correlation for directions at relative angle `theta`.
pub fn chsh_quantum_correlation(theta: f64) -> f64 {
    correlation(0.0, theta)
}

/// `N` of every deterministic local strategy
/// `(A_a, A_a', B_b, B_b') in {+-1/2}^4`.
pub fn classical_strategy_values() -> Vec<f64> {
    (0..16u32)
        .map(|bits| {
            let v = |i: u32| if bits >> i & 1 == 1 { 0.5 } else { -0.5 };
            let (aa, aa2, bb, bb2) = (v(0), v(1), v(2), v(3));
            chsh_combination([aa * bb, aa * bb2, aa2 * bb, aa2 * bb2])
        })
        .collect()
}

/// Maximum of `N` over deterministic local strategies. Mixtures of
/// deterministic strategies cannot exceed it.
pub fn chsh_classical_bound_exhaustive() -> f64 {
    classical_strategy_values()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn chsh_n(config: &ChshConfig, mode: ChshMode) -> Result<ChshResult> {
    let pairs = config.pairs();
    let e_table = pairs.map(|(a, b)| correlation(a, b));
    let n_exact = chsh_combination(e_table);
    let classical_max = chsh_classical_bound_exhaustive();
    let mut result = ChshResult {
        e_table,
        e_sampled: None,
        e_std_errors: None,
        n_exact,
        n_sampled: None,
        n_std_error: None,
        classical_max,
    };
    if mode == ChshMode::Sampled {
        if config.n_samples == 0 {
            return Err(Error::ZeroSamples);
        }
        let estimates = sample_pairs(config)?;
        let means = estimates.map(|e| e.mean);
        let errors = estimates.map(|e| e.std_error);
        result.n_sampled = Some(chsh_combination(means));
        result.n_std_error = Some(errors.iter().map(|s| s * s).sum::<f64>().sqrt());
        result.e_sampled = Some(means);
        result.e_std_errors = Some(errors);
    }
    Ok(result)
}

/// Four disjoint sample sets, one probability space per measurement pair.
fn sample_pairs(config: &ChshConfig) -> Result<[EnsembleEstimate; 4]> {
    let psi = singlet();
    let identity = Observable::identity(2);
    let mut out = Vec::with_capacity(4);
    for (k, (a, b)) in config.pairs().into_iter().enumerate() {
        let left = spin_half(in_plane(a)).kron(&identity);
        let right = identity.kron(&spin_half(in_plane(b)));
        let context = joint_eigenbasis(&[left, right])?;
        let tag = context.label().stream_id() ^ par::splitmix64(k as u64 + 1);
        out.push(sample_mean_tagged(
            &psi,
            &context,
            &product_observable(a, b),
            config.n_samples,
            config.seed,
            tag,
        )?);
    }
    Ok(out.try_into().expect("four pairs"))
}

/// Local hidden-variable simulation with one joint assignment per sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSimulation {
    pub e: [f64; 4],
    pub n: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Each sample draws a hidden angle `lambda` uniformly on the circle and
/// fixes all four outcomes at once: `A_x = sign(cos(lambda - x)) / 2`,
/// `B_y = -sign(cos(lambda - y)) / 2`. The same sample enters all four
/// correlations.
pub fn chsh_local_simulation(config: &ChshConfig) -> Result<LocalSimulation> {
    if config.n_samples == 0 {
        return Err(Error::ZeroSamples);
    }
    const TAG: u64 = 0x10ca1;
    let pairs = config.pairs();
    let half = |x: f64| if x >= 0.0 { 0.5 } else { -0.5 };
    // counts of products equal to +1/4, per pair
    let partials = par::map_chunks(config.n_samples, |chunk, range| {
        let mut rng = par::stream_rng(config.seed, TAG, chunk);
        let mut positive = [0u64; 4];
        for _ in range {
            let lambda = rng.random::<f64>() * std::f64::consts::TAU;
            for (k, (a, b)) in pairs.iter().enumerate() {
                let prod = half((lambda - a).cos()) * -half((lambda - b).cos());
                if prod > 0.0 {
                    positive[k] += 1;
                }
            }
        }
        positive
    });
    let mut positive = [0u64; 4];
    for p in partials {
        for k in 0..4 {
            positive[k] += p[k];
        }
    }
    let n = config.n_samples as f64;
    let e = positive.map(|c| 0.25 * (2.0 * c as f64 - n) / n);
    let se = e.map(|m| {
        let var = if n > 1.0 {
            (0.0625 - m * m).max(0.0) * n / (n - 1.0)
        } else {
            0.0
        };
        (var / n).sqrt()
    });
    Ok(LocalSimulation {
        e,
        n: chsh_combination(e),
        std_error: se.iter().map(|s| s * s).sum::<f64>().sqrt(),
        n_samples: config.n_samples,
    })
}
