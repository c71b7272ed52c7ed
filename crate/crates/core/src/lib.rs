//! Finite-dimensional algebraic quantum mechanics.
//!
//! Observables are Hermitian elements of `M_n(C)`, measurement contexts are
//! maximal commutative subalgebras given by a joint eigenbasis, and an
//! elementary state assigns one character per context. Quantum states are
//! density matrices, read as positive normalized functionals on the algebra.

pub mod algebra;
pub mod contexts;
pub mod elementary;
pub mod error;
pub mod experiments;
pub mod gns;
pub mod par;
pub mod statistics;

pub use error::{Error, Result};
