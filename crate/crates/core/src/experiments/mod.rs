//! Worked scenarios: two-level system, CHSH, Kochen-Specker, two-slit
//! interference, oscillator Green's functions and the EPR singlet.

pub mod chsh;
pub mod epr;
pub mod ks;
pub mod oscillator;
pub mod two_level;
pub mod two_slit;

use serde::Serialize;

use crate::algebra::{c64, CVector, Observable};
use crate::statistics::QuantumState;

/// One pass/fail line of a scenario report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `|value - expected| <= tolerance`.
    pub fn close(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            pass: (value - expected).abs() <= tolerance,
        }
    }

    /// Passes iff `value <= bound + tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance,
            pass: value <= bound + tolerance,
        }
    }

    /// Passes iff `value > bound`.
    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            pass: value > bound,
        }
    }
}

/// Spin-1/2 projection `n . tau / 2` onto a 3-vector `n`; eigenvalues `+-1/2`.
pub fn spin_half(n: [f64; 3]) -> Observable {
    let t = Observable::pauli_along(n);
    t.combine(0.5, &Observable::zeros(2), 0.0)
        .expect("same dim")
}

/// Unit vector at angle `theta` from the z axis in the x-z plane.
pub fn in_plane(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

/// Singlet `(|+z>|-z> - |-z>|+z>) / sqrt 2` on `C^2 (x) C^2`, particle A first.
pub fn singlet() -> QuantumState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_vec(vec![
        c64(0.0, 0.0),
        c64(s, 0.0),
        c64(-s, 0.0),
        c64(0.0, 0.0),
    ]);
    QuantumState::pure(&v).expect("unit vector")
}
