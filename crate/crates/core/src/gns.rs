//! Gelfand-Naimark-Segal representation of `M_n(C)` from a state.
//!
//! The algebra basis is the matrix units `E_ij` in row-major order
//! (index `i * n + j`). The Gram matrix `G[U, V] = Psi(U* V)` on that basis
//! is quotiented by its null space (the left ideal `Psi(U* U) = 0`), and the
//! surviving eigenvectors, rescaled to be orthonormal for `G`, form the basis
//! of the representation space.

use nalgebra::SymmetricEigen;

use crate::algebra::{c64, commutant_dimension, matrix_rank, CMatrix, CVector, Element, C64};
use crate::error::{Error, Result};
use crate::statistics::QuantumState;

/// Null-space threshold relative to the largest Gram eigenvalue.
pub const NULL_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GnsRepresentation {
    source_dim: usize,
    rep_dim: usize,
    /// Representation basis over the `n^2` algebra coefficients, one column
    /// per basis vector. Empty for representations assembled from parts.
    basis_coeffs: CMatrix,
    gram: CMatrix,
    /// `Pi(E_k)` for each matrix unit, row-major.
    operator_images: Vec<CMatrix>,
    cyclic_vector: CVector,
}

/// Row-major coefficient vector of an element over the matrix units.
fn coefficients(u: &Element) -> CVector {
    let n = u.dim();
    CVector::from_fn(n * n, |k, _| u.matrix()[(k / n, k % n)])
}

/// Left multiplication `V -> U V` on row-major coefficient vectors.
fn left_multiplication(u: &CMatrix) -> CMatrix {
    let n = u.nrows();
    // (UV)_{ij} = sum_k U_{ik} V_{kj}
    CMatrix::from_fn(n * n, n * n, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        if l == j {
            u[(i, k)]
        } else {
            c64(0.0, 0.0)
        }
    })
}

fn unit(n: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(k / n, k % n)] = c64(1.0, 0.0);
    m
}

/// Builds the GNS representation of `M_n` for `psi0`.
pub fn gns_construct(n: usize, psi0: &QuantumState) -> Result<GnsRepresentation> {
    gns_construct_with(n, psi0, NULL_THRESHOLD)
}

pub fn gns_construct_with(
    n: usize,
    psi0: &QuantumState,
    null_threshold: f64,
) -> Result<GnsRepresentation> {
    if psi0.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: psi0.dim(),
        });
    }
    let rho = psi0.rho();
    let nn = n * n;
    // G[(ij),(kl)] = Psi(E_ji E_kl) = delta_ik rho_lj
    let gram = CMatrix::from_fn(nn, nn, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        if i == k {
            rho[(l, j)]
        } else {
            c64(0.0, 0.0)
        }
    });
    let asym = (&gram - gram.adjoint()).norm();
    if asym > 1e-10 * gram.norm().max(1.0) {
        return Err(Error::InvalidState(format!(
            "Gram matrix asymmetry {asym:e}"
        )));
    }

    let eig = SymmetricEigen::new(gram.clone());
    let top = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let mut kept: Vec<usize> = (0..nn)
        .filter(|&k| eig.eigenvalues[k] > null_threshold * top)
        .collect();
    kept.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let rep_dim = kept.len();
    let mut basis_coeffs = CMatrix::zeros(nn, rep_dim);
    for (m, &k) in kept.iter().enumerate() {
        let scale = c64(1.0 / eig.eigenvalues[k].sqrt(), 0.0);
        basis_coeffs.set_column(m, &(eig.eigenvectors.column(k) * scale));
    }

    // coordinates of a class: V^dagger G c
    let project = basis_coeffs.adjoint() * &gram;
    let operator_images = (0..nn)
        .map(|k| &project * left_multiplication(&unit(n, k)) * &basis_coeffs)
        .collect();
    let cyclic_vector = &project * coefficients(&Element::identity(n));

    Ok(GnsRepresentation {
        source_dim: n,
        rep_dim,
        basis_coeffs,
        gram,
        operator_images,
        cyclic_vector,
    })
}

impl GnsRepresentation {
    /// Representation assembled from explicit operator images (one per matrix
    /// unit of `M_n`, row-major) and a distinguished vector.
    pub fn from_parts(
        source_dim: usize,
        operator_images: Vec<CMatrix>,
        cyclic_vector: CVector,
    ) -> Result<Self> {
        if operator_images.len() != source_dim * source_dim {
            return Err(Error::InvalidConfig(format!(
                "expected {} operator images, got {}",
                source_dim * source_dim,
                operator_images.len()
            )));
        }
        let rep_dim = cyclic_vector.len();
        if operator_images
            .iter()
            .any(|m| m.nrows() != rep_dim || m.ncols() != rep_dim)
        {
            return Err(Error::InvalidConfig("operator image size mismatch".into()));
        }
        Ok(Self {
            source_dim,
            rep_dim,
            basis_coeffs: CMatrix::zeros(0, 0),
            gram: CMatrix::zeros(0, 0),
            operator_images,
            cyclic_vector,
        })
    }

    /// Finite direct sum of representations of the same algebra. The
    /// distinguished vector is the concatenation of the summands' vectors.
    pub fn direct_sum(reps: &[GnsRepresentation]) -> Result<Self> {
        let Some(first) = reps.first() else {
            return Err(Error::InvalidConfig("empty direct sum".into()));
        };
        let n = first.source_dim;
        if reps.iter().any(|r| r.source_dim != n) {
            return Err(Error::InvalidConfig(
                "summands represent different algebras".into(),
            ));
        }
        let total: usize = reps.iter().map(|r| r.rep_dim).sum();
        let mut images = vec![CMatrix::zeros(total, total); n * n];
        let mut vector = CVector::zeros(total);
        let mut offset = 0;
        for r in reps {
            for (dst, src) in images.iter_mut().zip(&r.operator_images) {
                dst.view_mut((offset, offset), (r.rep_dim, r.rep_dim))
                    .copy_from(src);
            }
            vector
                .rows_mut(offset, r.rep_dim)
                .copy_from(&r.cyclic_vector);
            offset += r.rep_dim;
        }
        Self::from_parts(n, images, vector)
    }

    pub fn with_cyclic_vector(mut self, v: CVector) -> Result<Self> {
        if v.len() != self.rep_dim {
            return Err(Error::DimensionMismatch {
                left: self.rep_dim,
                right: v.len(),
            });
        }
        self.cyclic_vector = v;
        Ok(self)
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn basis_coeffs(&self) -> &CMatrix {
        &self.basis_coeffs
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn operator_images(&self) -> &[CMatrix] {
        &self.operator_images
    }

    pub fn cyclic_vector(&self) -> &CVector {
        &self.cyclic_vector
    }

    /// `Pi(U) = sum_ij U_ij Pi(E_ij)`.
    pub fn image(&self, u: &Element) -> Result<CMatrix> {
        if u.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                left: self.source_dim,
                right: u.dim(),
            });
        }
        let mut acc = CMatrix::zeros(self.rep_dim, self.rep_dim);
        for (c, img) in coefficients(u).iter().zip(&self.operator_images) {
            if *c != c64(0.0, 0.0) {
                acc += img * *c;
            }
        }
        Ok(acc)
    }

    /// Coordinates of the class `Phi(U)`. Only available for constructed
    /// representations.
    pub fn class_of(&self, u: &Element) -> Result<CVector> {
        if self.gram.nrows() == 0 {
            return Err(Error::InvalidConfig(
                "representation has no Gram data".into(),
            ));
        }
        if u.dim() != self.source_dim {
            return Err(Error::DimensionMismatch {
                left: self.source_dim,
                right: u.dim(),
            });
        }
        Ok(self.basis_coeffs.adjoint() * &self.gram * coefficients(u))
    }

    /// `(Phi(I), Pi(B) Phi(I))`.
    pub fn vacuum_expectation(&self, b: &Element) -> Result<C64> {
        let v = self.image(b)? * &self.cyclic_vector;
        Ok(self.cyclic_vector.dotc(&v))
    }
}

/// Irreducible iff the commutant of the image is one-dimensional.
pub fn is_irreducible(rep: &GnsRepresentation) -> bool {
    commutant_dimension(&rep.operator_images, 1e-9) == 1
}

/// Cyclic iff the images of the distinguished vector span the space.
pub fn is_cyclic(rep: &GnsRepresentation) -> bool {
    let mut span = CMatrix::zeros(rep.rep_dim, rep.operator_images.len());
    for (k, img) in rep.operator_images.iter().enumerate() {
        span.set_column(k, &(img * &rep.cyclic_vector));
    }
    matrix_rank(&span, 1e-9) == rep.rep_dim
}

/// Exact iff `U -> Pi(U)` has trivial kernel on `M_n`.
pub fn is_exact(rep: &GnsRepresentation) -> bool {
    let d = rep.rep_dim;
    let nn = rep.operator_images.len();
    let mut map = CMatrix::zeros(d * d, nn);
    for (k, img) in rep.operator_images.iter().enumerate() {
        map.set_column(k, &CVector::from_iterator(d * d, img.iter().copied()));
    }
    matrix_rank(&map, 1e-9) == nn
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pure(n: usize, k: usize) -> QuantumState {
        let mut v = CVector::zeros(n);
        v[k] = c64(1.0, 0.0);
        QuantumState::pure(&v).unwrap()
    }

    #[test]
    fn pure_state_on_m2() {
        let rep = gns_construct(2, &pure(2, 1)).unwrap();
        assert_eq!(rep.rep_dim(), 2);
        assert!(is_irreducible(&rep));
        assert!(is_cyclic(&rep));
        assert!(is_exact(&rep));
        assert!((rep.cyclic_vector().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_on_m2() {
        let rep = gns_construct(2, &QuantumState::maximally_mixed(2)).unwrap();
        assert_eq!(rep.rep_dim(), 4);
        assert!(!is_irreducible(&rep));
        assert!(is_cyclic(&rep));
        assert!(is_exact(&rep));
    }

    #[test]
    fn scalar_algebra() {
        let rep = gns_construct(1, &QuantumState::maximally_mixed(1)).unwrap();
        assert_eq!(rep.rep_dim(), 1);
        assert!(is_irreducible(&rep));
        assert!(is_cyclic(&rep));
    }

    #[test]
    fn padded_vector_is_not_cyclic() {
        let rep = gns_construct(2, &pure(2, 0)).unwrap();
        let sum = GnsRepresentation::direct_sum(&[rep.clone(), rep.clone()]).unwrap();
        let mut v = CVector::zeros(4);
        v.rows_mut(0, 2).copy_from(rep.cyclic_vector());
        let padded = sum.with_cyclic_vector(v).unwrap();
        assert!(!is_cyclic(&padded));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(gns_construct(3, &pure(2, 0)).is_err());
    }
}
