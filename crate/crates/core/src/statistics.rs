//! Quantum states as positive normalized functionals, stored as density
//! matrices via trace duality, and the per-context probability spaces they
//! induce.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{c64, eigh, CMatrix, CVector, Element, Observable, Projector, Tolerances};
use crate::contexts::{contains, evaluate_unchecked, Character, Context};
use crate::error::{Error, Result};
use crate::par;

const STATE_TOL: f64 = 1e-10;

/// A state `Psi(U) = tr(rho U)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    rho: CMatrix,
    pure_projector: Option<Projector>,
}

impl QuantumState {
    /// Validates a density matrix: Hermitian, unit trace, nonnegative spectrum.
    /// States with `tr(rho^2) >= 1 - 1e-10` are snapped to the rank-one
    /// projector onto their top eigenvector.
    pub fn from_density(rho: CMatrix) -> Result<Self> {
        let element = Element::new(rho)?;
        let obs = Observable::with_tolerance(element, STATE_TOL)
            .map_err(|_| Error::InvalidState("density matrix is not Hermitian".into()))?;
        let tr = obs.element().trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let e = eigh(&obs, &Tolerances::default());
        if let Some(&min) = e.values.last() {
            if min < -STATE_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        let rho = obs.into_element().into_matrix();
        let purity = (&rho * &rho).trace().re;
        if purity >= 1.0 - STATE_TOL {
            return Self::pure(&e.vectors.column(0).into_owned());
        }
        Ok(Self {
            rho,
            pure_projector: None,
        })
    }

    /// Vector state `|v><v| / <v|v>`.
    pub fn pure(v: &CVector) -> Result<Self> {
        let p = Projector::onto_vector(v)?;
        Ok(Self {
            rho: p.matrix().clone(),
            pure_projector: Some(p),
        })
    }

    pub fn from_projector(p: &Projector) -> Result<Self> {
        if p.rank() != 1 {
            return Err(Error::NotRankOne { rank: p.rank() });
        }
        Ok(Self {
            rho: p.matrix().clone(),
            pure_projector: Some(p.clone()),
        })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            rho: CMatrix::identity(n, n) * c64(1.0 / n as f64, 0.0),
            pure_projector: if n == 1 {
                Some(Projector::onto_columns(&CMatrix::identity(1, 1)))
            } else {
                None
            },
        }
    }

    /// Convex combination with weights normalized to sum to one.
    pub fn mixture(components: &[(f64, QuantumState)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        let n = first.dim();
        if components.iter().any(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidState(
                "mixture weights must be nonnegative".into(),
            ));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("mixture weights sum to zero".into()));
        }
        let mut rho = CMatrix::zeros(n, n);
        for (w, s) in components {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: s.dim(),
                });
            }
            rho += &s.rho * c64(w / total, 0.0);
        }
        Self::from_density(rho)
    }

    /// The pure state concentrated on one character of a context.
    pub fn concentrated(character: &Character) -> Self {
        Self::pure(&character.context().basis_vector(character.index())).expect("unit basis vector")
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn pure_projector(&self) -> Option<&Projector> {
        self.pure_projector.as_ref()
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// `Psi(U)` for an arbitrary element.
    pub fn functional(&self, u: &Element) -> Result<crate::algebra::C64> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: u.dim(),
            });
        }
        Ok((&self.rho * u.matrix()).trace())
    }
}

/// Finite probability space of a context under a state.
#[derive(Debug, Clone)]
pub struct ProbabilitySpace {
    context: Context,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ProbabilitySpace {
    fn new(context: Context, weights: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self {
            context,
            weights,
            cumulative,
        }
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Character index for a uniform draw `u` in `[0, 1)`. Zero-weight
    /// characters are never returned.
    pub fn sample_index(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .zip(&self.weights)
            .position(|(&c, &w)| w > 0.0 && u < c)
            .unwrap_or_else(|| {
                self.weights
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("weights sum to one")
            })
    }

    /// Distribution of the values of `a` (an element of this context):
    /// `(value, probability)` pairs, one per distinct value, descending.
    pub fn marginal(&self, a: &Observable) -> Result<Vec<(f64, f64)>> {
        if !contains(&self.context, a)? {
            return Err(Error::NotInContext {
                label: self.context.label().to_string(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = self
            .context
            .characters()
            .iter()
            .zip(&self.weights)
            .map(|(c, &w)| (evaluate_unchecked(c, a), w))
            .collect();
        pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
        let scale = pairs.iter().fold(1.0_f64, |m, p| m.max(p.0.abs()));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (v, w) in pairs {
            match out.last_mut() {
                Some(last) if (last.0 - v).abs() < 1e-8 * scale => last.1 += w,
                _ => out.push((v, w)),
            }
        }
        Ok(out)
    }
}

/// Monte Carlo estimate of an expectation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl EnsembleEstimate {
    /// Estimate from outcome counts over discrete values. Counts are exact
    /// integers, so the result does not depend on how they were accumulated.
    pub(crate) fn from_counts(values: &[f64], counts: &[u64], seed: u64) -> Self {
        let n: u64 = counts.iter().sum();
        let nf = n as f64;
        let mean = values
            .iter()
            .zip(counts)
            .map(|(v, &c)| v * c as f64)
            .sum::<f64>()
            / nf;
        let ss: f64 = values
            .iter()
            .zip(counts)
            .map(|(v, &c)| c as f64 * (v - mean) * (v - mean))
            .sum();
        let var = if n > 1 { ss / (nf - 1.0) } else { 0.0 };
        Self {
            mean,
            std_error: (var / nf).sqrt(),
            n_samples: n,
            seed,
        }
    }
}

/// `theta(B)` defined by `p0 B p0 = theta(B) p0`, computed as `tr(p0 B)`.
pub fn theta_functional(p0: &Projector, b: &Element) -> Result<crate::algebra::C64> {
    if p0.rank() != 1 {
        return Err(Error::NotRankOne { rank: p0.rank() });
    }
    if p0.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: p0.dim(),
            right: b.dim(),
        });
    }
    Ok((p0.matrix() * b.matrix()).trace())
}

/// `Psi(A) = tr(rho A)`.
pub fn expectation(psi: &QuantumState, a: &Observable) -> Result<f64> {
    Ok(psi.functional(a.element())?.re)
}

/// Born weights `Psi(|b_k><b_k|)` of the characters of a context.
pub fn born_weights(psi: &QuantumState, context: &Context) -> Result<ProbabilitySpace> {
    if psi.dim() != context.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: context.dim(),
        });
    }
    let basis = context.basis();
    let mut weights: Vec<f64> = (0..context.dim())
        .map(|k| {
            let b = basis.column(k);
            (b.adjoint() * &psi.rho * b)[(0, 0)].re.clamp(0.0, 1.0)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("Born weights sum to {total}")));
        }
        weights.iter_mut().for_each(|w| *w /= total);
    }
    Ok(ProbabilitySpace::new(context.clone(), weights))
}

/// Mean of `a` over `n` characters of `context` drawn with Born weights.
/// Reproducible per seed and independent of the number of worker threads.
pub fn sample_mean(
    psi: &QuantumState,
    context: &Context,
    a: &Observable,
    n: u64,
    seed: u64,
) -> Result<EnsembleEstimate> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    if !contains(context, a)? {
        return Err(Error::NotInContext {
            label: context.label().to_string(),
        });
    }
    sample_mean_tagged(psi, context, a, n, seed, context.label().stream_id())
}

/// As [`sample_mean`] with an explicit random-stream tag, for callers that
/// need disjoint sample sets on the same context.
pub(crate) fn sample_mean_tagged(
    psi: &QuantumState,
    context: &Context,
    a: &Observable,
    n: u64,
    seed: u64,
    tag: u64,
) -> Result<EnsembleEstimate> {
    let space = born_weights(psi, context)?;
    let values: Vec<f64> = context
        .characters()
        .iter()
        .map(|c| evaluate_unchecked(c, a))
        .collect();
    let counts = sample_counts(&space, n, seed, tag);
    Ok(EnsembleEstimate::from_counts(&values, &counts, seed))
}

/// Histogram of `n` Born draws from `space`.
pub(crate) fn sample_counts(space: &ProbabilitySpace, n: u64, seed: u64, tag: u64) -> Vec<u64> {
    let dim = space.weights.len();
    let partials = par::map_chunks(n, |chunk, range| {
        let mut rng = par::stream_rng(seed, tag, chunk);
        let mut counts = vec![0u64; dim];
        for _ in range {
            counts[space.sample_index(rng.random::<f64>())] += 1;
        }
        counts
    });
    partials.into_iter().fold(vec![0u64; dim], |mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    })
}

/// `tr(rho^2) >= 1 - 1e-10`.
pub fn is_pure(psi: &QuantumState) -> bool {
    psi.purity() >= 1.0 - STATE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contexts::masa_from_observable;

    fn ground() -> QuantumState {
        QuantumState::pure(&CVector::from_vec(vec![c64(0.0, 0.0), c64(1.0, 0.0)])).unwrap()
    }

    #[test]
    fn theta_picks_lower_right_entry() {
        let p0 = ground().pure_projector().unwrap().clone();
        let b = Element::from_rows(&[
            vec![c64(1.0, 2.0), c64(3.0, -1.0)],
            vec![c64(0.5, 0.0), c64(-4.0, 0.25)],
        ])
        .unwrap();
        assert_eq!(theta_functional(&p0, &b).unwrap(), c64(-4.0, 0.25));
        assert_eq!(
            theta_functional(&p0, &Element::identity(2)).unwrap(),
            c64(1.0, 0.0)
        );
        let p2 = Projector::new(Element::identity(2)).unwrap();
        assert_eq!(
            theta_functional(&p2, &b).unwrap_err(),
            Error::NotRankOne { rank: 2 }
        );
    }

    #[test]
    fn expectation_of_identity() {
        let psi =
            QuantumState::mixture(&[(0.3, ground()), (0.7, QuantumState::maximally_mixed(2))])
                .unwrap();
        assert!((expectation(&psi, &Observable::identity(2)).unwrap() - 1.0).abs() < 1e-14);
        assert!(expectation(&psi, &Observable::identity(3)).is_err());
    }

    #[test]
    fn born_weights_trivial_cases() {
        let ctx = masa_from_observable(&Observable::pauli_z());
        let w = born_weights(&QuantumState::concentrated(&ctx.characters()[1]), &ctx).unwrap();
        assert_eq!(w.weights(), &[0.0, 1.0]);
        let w = born_weights(&QuantumState::maximally_mixed(2), &ctx).unwrap();
        assert_eq!(w.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn zero_weight_outcomes_never_sampled() {
        let ctx = Context::standard(3);
        let psi = QuantumState::concentrated(&ctx.characters()[2]);
        let space = born_weights(&psi, &ctx).unwrap();
        for u in [0.0, 0.3, 0.999_999, 1.0 - f64::EPSILON] {
            assert_eq!(space.sample_index(u), 2);
        }
    }

    #[test]
    fn sample_mean_zero_variance_and_determinism() {
        let ctx = masa_from_observable(&Observable::pauli_z());
        let est = sample_mean(&ground(), &ctx, &Observable::pauli_z(), 1000, 3).unwrap();
        assert_eq!(est.mean, -1.0);
        assert_eq!(est.std_error, 0.0);
        let mixed = QuantumState::maximally_mixed(2);
        let a = sample_mean(&mixed, &ctx, &Observable::pauli_z(), 50_000, 9).unwrap();
        let b = sample_mean(&mixed, &ctx, &Observable::pauli_z(), 50_000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            sample_mean(&mixed, &ctx, &Observable::pauli_z(), 0, 9).unwrap_err(),
            Error::ZeroSamples
        );
        assert!(matches!(
            sample_mean(&mixed, &ctx, &Observable::pauli_x(), 10, 9),
            Err(Error::NotInContext { .. })
        ));
    }

    #[test]
    fn maximally_mixed_mean_within_binomial_bound() {
        let ctx = masa_from_observable(&Observable::pauli_z());
        let est = sample_mean(
            &QuantumState::maximally_mixed(2),
            &ctx,
            &Observable::pauli_z(),
            1_000_000,
            2024,
        )
        .unwrap();
        assert!(est.mean.abs() <= 4e-3, "mean {}", est.mean);
    }

    #[test]
    fn purity() {
        assert!(is_pure(&ground()));
        assert!(!is_pure(&QuantumState::maximally_mixed(2)));
    }

    /// Brute-force search for a nontrivial decomposition of a qubit state:
    /// a direction `d` on a (polar, azimuth) grid such that the Bloch vectors
    /// `s +- eps d` are both admissible states.
    fn decomposable_on_grid(s: [f64; 3]) -> bool {
        let eps = 1e-3;
        for i in 0..=40 {
            let theta = std::f64::consts::PI * i as f64 / 40.0;
            for j in 0..80 {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / 80.0;
                let d = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                let ok = |sign: f64| {
                    let v: Vec<f64> = (0..3).map(|k| s[k] + sign * eps * d[k]).collect();
                    v.iter().map(|x| x * x).sum::<f64>() <= 1.0
                };
                if ok(1.0) && ok(-1.0) {
                    return true;
                }
            }
        }
        false
    }

    fn bloch_state(s: [f64; 3]) -> QuantumState {
        let m = (Element::identity(2) + Observable::pauli_along(s).element().clone())
            .scale(c64(0.5, 0.0));
        QuantumState::from_density(m.into_matrix()).unwrap()
    }

    #[test]
    fn purity_agrees_with_decomposition_search() {
        for s in [
            [0.0, 0.0, 1.0],
            [0.6, 0.0, 0.8],
            [0.0, 0.0, 0.99],
            [0.3, 0.1, 0.2],
            [0.0, 0.0, 0.0],
        ] {
            let psi = bloch_state(s);
            assert_eq!(is_pure(&psi), !decomposable_on_grid(s), "{s:?}");
        }
    }

    #[test]
    fn invalid_densities_rejected() {
        let bad_trace = CMatrix::identity(2, 2);
        assert!(QuantumState::from_density(bad_trace).is_err());
        let negative =
            CMatrix::from_diagonal(&CVector::from_vec(vec![c64(1.5, 0.0), c64(-0.5, 0.0)]));
        assert!(QuantumState::from_density(negative).is_err());
    }

    #[test]
    fn marginal_sums_equal_projector_traces() {
        // A = diag(1,0,0) sits in two contexts of C^3
        let a = Observable::real_diagonal(&[1.0, 0.0, 0.0]);
        let swap = Observable::from_real_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ])
        .unwrap();
        let c1 = Context::standard(3);
        let c2 = crate::contexts::joint_eigenbasis(&[a.clone(), swap]).unwrap();
        let v = CVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.48), c64(0.64, 0.0)]);
        let psi = QuantumState::pure(&v).unwrap();
        let m1 = born_weights(&psi, &c1).unwrap().marginal(&a).unwrap();
        let m2 = born_weights(&psi, &c2).unwrap().marginal(&a).unwrap();
        let p_one = 0.36;
        assert!((m1[0].1 - p_one).abs() < 1e-12 && (m2[0].1 - p_one).abs() < 1e-12);
        assert!((m1[1].1 - m2[1].1).abs() < 1e-12);
    }
}
