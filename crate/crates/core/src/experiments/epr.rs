//! Singlet collapse after a spin measurement on particle B.

use crate::algebra::{c64, CMatrix, CVector, Element, Observable, Projector};
use crate::error::{Error, Result};
use crate::experiments::{singlet, spin_half};
use crate::statistics::{expectation, QuantumState};

#[derive(Debug, Clone)]
pub struct EprOutcome {
    pub direction: [f64; 3],
    /// Outcome `+-1/2` recorded for B along `direction`.
    pub outcome: f64,
    pub pre_state: QuantumState,
    pub post_state: QuantumState,
    /// Reduced density matrix of A before the measurement.
    pub pre_reduced: CMatrix,
    /// Reduced density matrix of A after the measurement.
    pub post_reduced: CMatrix,
    /// `|A_n^(-outcome)><A_n^(-outcome)|`, the expected collapsed state of A.
    pub expected_post_reduced: CMatrix,
    /// Probability `<Psi|p|Psi>` of the recorded outcome.
    pub outcome_probability: f64,
    /// Spin of A along `direction`, fixed by the collapsed state.
    pub partner_value: f64,
    /// Probability that A reads `partner_value` along `direction`.
    pub partner_probability: f64,
}

/// Partial trace over the second factor of `C^2 (x) C^2`.
pub fn reduce_first(rho: &CMatrix) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| {
        (0..2).map(|k| rho[(2 * i + k, 2 * j + k)]).sum()
    })
}

/// Eigenvector of `n . tau / 2` with eigenvalue `value` (`+-1/2`).
pub fn spin_eigenvector(n: [f64; 3], value: f64) -> Result<CVector> {
    let s = spin_half(n);
    let shifted = s.matrix() - CMatrix::identity(2, 2) * c64(value, 0.0);
    // a null vector of the 2x2 singular matrix [[p, q], [r, s]]
    let (p, q) = (shifted[(0, 0)], shifted[(0, 1)]);
    let (r, t) = (shifted[(1, 0)], shifted[(1, 1)]);
    let v = if p.norm() + q.norm() >= r.norm() + t.norm() {
        CVector::from_vec(vec![q, -p])
    } else {
        CVector::from_vec(vec![t, -r])
    };
    let norm = v.norm();
    if norm < 1e-12 {
        return Err(Error::InvalidConfig("degenerate spin direction".into()));
    }
    Ok(v / c64(norm, 0.0))
}

fn unit(n: [f64; 3]) -> Result<[f64; 3]> {
    let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !len.is_finite() || len < 1e-12 {
        return Err(Error::InvalidConfig(
            "direction must be a nonzero vector".into(),
        ));
    }
    Ok(n.map(|x| x / len))
}

pub fn epr_scenario(direction: [f64; 3], outcome: f64) -> Result<EprOutcome> {
    if outcome != 0.5 && outcome != -0.5 {
        return Err(Error::InvalidConfig(format!(
            "outcome {outcome} is not +-1/2"
        )));
    }
    let n = unit(direction)?;
    let pre_state = singlet();
    let b_vec = spin_eigenvector(n, outcome)?;
    let p_b = Element::outer(&b_vec);
    let p = Projector::new(Element::identity(2).kron(&p_b))?;
    let outcome_probability = expectation(&pre_state, &p.as_observable())?;
    let collapsed = p.matrix() * pre_state.rho() * p.matrix() / c64(outcome_probability, 0.0);
    let post_state = QuantumState::from_density(collapsed)?;

    let pre_reduced = reduce_first(pre_state.rho());
    let post_reduced = reduce_first(post_state.rho());
    let a_vec = spin_eigenvector(n, -outcome)?;
    let expected_post_reduced = Element::outer(&a_vec).into_matrix();

    let a_spin = spin_half(n).kron(&Observable::identity(2));
    let mean = expectation(&post_state, &a_spin)?;
    let partner_value = if mean < 0.0 { -0.5 } else { 0.5 };
    let a_partner = Projector::new(
        Element::outer(&spin_eigenvector(n, partner_value)?).kron(&Element::identity(2)),
    )?;
    let partner_probability = expectation(&post_state, &a_partner.as_observable())?;

    Ok(EprOutcome {
        direction: n,
        outcome,
        pre_state,
        post_state,
        pre_reduced,
        post_reduced,
        expected_post_reduced,
        outcome_probability,
        partner_value,
        partner_probability,
    })
}
