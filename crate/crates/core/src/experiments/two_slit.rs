//! Two-slit scattering on a periodic position lattice.
//!
//! Sites sit at `x_j = j dx` with `dx = pi / momentum_cutoff`. A slit is the
//! set of sites within half a width of its centre, and `p_a`, `p_b` are the
//! diagonal projectors onto those sets. The incident beam is the constant
//! lattice vector; after the screen the state is `(p_a + p_b)` applied to it
//! and normalized. Momentum outcomes are the discrete Fourier modes.
//!
//! With `alpha_k = <k|p_a psi>` and `beta_k = <k|p_b psi>` the momentum
//! distribution splits as `|alpha_k|^2 + |beta_k|^2 + 2 Re(conj(alpha_k) beta_k)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::algebra::{c64, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TwoSlitConfig {
    pub slit_a: f64,
    pub slit_b: f64,
    pub slit_width: f64,
    pub lattice_size: usize,
    pub momentum_cutoff: f64,
}

impl Default for TwoSlitConfig {
    /// Two 7-site slits placed symmetrically about the lattice centre.
    fn default() -> Self {
        Self {
            slit_a: 112.0,
            slit_b: 144.0,
            slit_width: 6.0,
            lattice_size: 256,
            momentum_cutoff: std::f64::consts::PI,
        }
    }
}

impl TwoSlitConfig {
    pub fn spacing(&self) -> f64 {
        std::f64::consts::PI / self.momentum_cutoff
    }

    fn validate(&self) -> Result<()> {
        if self.lattice_size < 16 {
            return Err(Error::LatticeTooSmall {
                size: self.lattice_size,
            });
        }
        if !(self.slit_width > 0.0 && self.momentum_cutoff > 0.0) {
            return Err(Error::InvalidConfig(
                "slit width and momentum cutoff must be positive".into(),
            ));
        }
        if (self.slit_a - self.slit_b).abs() <= self.slit_width {
            return Err(Error::SlitsOverlap);
        }
        Ok(())
    }

    /// Lattice sites inside the slit centred at `centre`.
    pub fn slit_sites(&self, centre: f64) -> Vec<usize> {
        let dx = self.spacing();
        let half = 0.5 * self.slit_width + 1e-9 * dx;
        (0..self.lattice_size)
            .filter(|&j| (j as f64 * dx - centre).abs() <= half)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slits {
    Both,
    AOnly,
    BOnly,
}

/// One row per momentum mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumRow {
    pub k_index: usize,
    pub momentum: f64,
    /// `Psi(p_a F_k p_a)`.
    pub p_slit_a: f64,
    /// `Psi(p_b F_k p_b)`.
    pub p_slit_b: f64,
    /// `Psi(p_a F_k p_b + p_b F_k p_a)`.
    pub interference: f64,
    pub total: f64,
    /// Mixture of the normalized single-slit distributions weighted by the
    /// probability of passing each slit.
    pub classical_mixture: f64,
}

/// `<K> = Psi(p_a K p_a) + Psi(p_b K p_b) + Psi(p_a K p_b + p_b K p_a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanMomentum {
    pub slit_a: f64,
    pub slit_b: f64,
    pub interference: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSlitDistribution {
    pub slits: Slits,
    pub rows: Vec<MomentumRow>,
    pub mean_momentum: MeanMomentum,
    /// Probability of passing slit a, resp. b, in the post-screen state.
    pub weight_a: f64,
    pub weight_b: f64,
}

impl TwoSlitDistribution {
    pub fn total_probability(&self) -> f64 {
        self.rows.iter().map(|r| r.total).sum()
    }

    pub fn max_interference(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.interference.abs())
            .fold(0.0, f64::max)
    }

    /// Largest pointwise gap between the distribution and the classical mixture.
    pub fn max_deviation_from_mixture(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.total - r.classical_mixture).abs())
            .fold(0.0, f64::max)
    }

    pub fn totals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.total).collect()
    }
}

/// Amplitudes `<k|v>` of a vector supported on `sites` with constant value
/// `amp`, for every Fourier mode `k`.
fn fourier(n: usize, sites: &[usize], amp: f64) -> Vec<C64> {
    let scale = amp / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            sites.iter().fold(c64(0.0, 0.0), |acc, &j| {
                // <k|j> = exp(-2 pi i j k / n) / sqrt n
                let phase = -TAU * ((j * k) % n) as f64 / n as f64;
                acc + C64::from_polar(scale, phase)
            })
        })
        .collect()
}

pub fn two_slit_distribution(config: &TwoSlitConfig, slits: Slits) -> Result<TwoSlitDistribution> {
    config.validate()?;
    let n = config.lattice_size;
    let sites_a = config.slit_sites(config.slit_a);
    let sites_b = config.slit_sites(config.slit_b);
    if sites_a.is_empty() || sites_b.is_empty() {
        return Err(Error::InvalidConfig(
            "a slit contains no lattice site".into(),
        ));
    }
    let (open_a, open_b) = match slits {
        Slits::Both => (true, true),
        Slits::AOnly => (true, false),
        Slits::BOnly => (false, true),
    };
    let count_a = if open_a { sites_a.len() } else { 0 };
    let count_b = if open_b { sites_b.len() } else { 0 };
    let total_sites = (count_a + count_b) as f64;
    let amp = 1.0 / total_sites.sqrt();
    let weight_a = count_a as f64 / total_sites;
    let weight_b = count_b as f64 / total_sites;
    let zero = vec![c64(0.0, 0.0); n];
    let alpha = if open_a {
        fourier(n, &sites_a, amp)
    } else {
        zero.clone()
    };
    let beta = if open_b {
        fourier(n, &sites_b, amp)
    } else {
        zero
    };

    let dk = TAU / (n as f64 * config.spacing());
    let mut mean = MeanMomentum {
        slit_a: 0.0,
        slit_b: 0.0,
        interference: 0.0,
        total: 0.0,
    };
    let rows = (0..n)
        .map(|k| {
            let signed = if 2 * k > n {
                k as f64 - n as f64
            } else {
                k as f64
            };
            let momentum = signed * dk;
            let pa = alpha[k].norm_sqr();
            let pb = beta[k].norm_sqr();
            let interference = 2.0 * (alpha[k].conj() * beta[k]).re;
            let total = (alpha[k] + beta[k]).norm_sqr();
            // weight_a * (pa / weight_a) + weight_b * (pb / weight_b)
            let classical_mixture = pa + pb;
            mean.slit_a += momentum * pa;
            mean.slit_b += momentum * pb;
            mean.interference += momentum * interference;
            mean.total += momentum * total;
            MomentumRow {
                k_index: k,
                momentum,
                p_slit_a: pa,
                p_slit_b: pb,
                interference,
                total,
                classical_mixture,
            }
        })
        .collect();
    Ok(TwoSlitDistribution {
        slits,
        rows,
        mean_momentum: mean,
        weight_a,
        weight_b,
    })
}

/// Pointwise `both - (w_a * a_only + w_b * b_only)` minus the reported
/// interference term, maximized over `k`.
pub fn closure_residual(config: &TwoSlitConfig) -> Result<f64> {
    let both = two_slit_distribution(config, Slits::Both)?;
    let a = two_slit_distribution(config, Slits::AOnly)?;
    let b = two_slit_distribution(config, Slits::BOnly)?;
    Ok(both
        .rows
        .iter()
        .zip(a.rows.iter().zip(&b.rows))
        .map(|(r, (ra, rb))| {
            let mixture = both.weight_a * ra.total + both.weight_b * rb.total;
            (r.total - mixture - r.interference).abs()
        })
        .fold(0.0, f64::max))
}
