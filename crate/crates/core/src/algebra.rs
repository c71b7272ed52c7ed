//! Dense finite-dimensional *-algebra arithmetic.
//!
//! The abstract algebra of dynamical quantities is realized as the full
//! matrix algebra `M_n(C)`. Elements carry no units. The involution is the
//! conjugate transpose and the C*-norm is `sqrt(r(U* U))`, with `r` the
//! spectral radius.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Relative tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub projector: f64,
    pub arithmetic: f64,
    /// Relative eigenvalue gap below which two eigenvalues are clustered.
    pub degeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            projector: 1e-10,
            arithmetic: 1e-10,
            degeneracy: 1e-8,
        }
    }
}

/// Scale used to turn a relative tolerance into an absolute one.
pub(crate) fn scale_of(m: &CMatrix) -> f64 {
    m.norm().max(1.0)
}

/// A dynamical quantity: an element of `M_n(C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Element(CMatrix);

impl Element {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::InvalidConfig("zero-dimensional element".into()));
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(CMatrix::zeros(n, n))
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&x| c64(x, 0.0)));
        Self(CMatrix::from_diagonal(&d))
    }

    /// Rank-one operator `|v><v|`.
    pub fn outer(v: &CVector) -> Self {
        Self(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self(&self.0 * &other.0 - &other.0 * &self.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.norm()
    }

    /// `|U - U*|` in the Frobenius norm, an upper bound on the C*-norm.
    pub fn hermitian_deviation(&self) -> f64 {
        (&self.0 - self.0.adjoint()).norm()
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_deviation() <= rel_tol * scale_of(&self.0)
    }

    /// `|A - B|` in the Frobenius norm.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).norm()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        for _ in 0..k {
            acc = &acc * &self.0;
        }
        Self(acc)
    }
}

fn check_dims(a: &Element, b: &Element) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                Element(&self.0 $op &rhs.0)
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                Element(self.0 $op rhs.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element(-&self.0)
    }
}

impl Mul<C64> for &Element {
    type Output = Element;
    fn mul(self, rhs: C64) -> Element {
        Element(&self.0 * rhs)
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, rhs: f64) -> Element {
        Element(&self.0 * c64(rhs, 0.0))
    }
}

/// A Hermitian element. Stored exactly Hermitian: the input is symmetrized
/// after passing the tolerance check.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(Element);

impl Observable {
    pub fn new(element: Element) -> Result<Self> {
        Self::with_tolerance(element, Tolerances::default().hermitian)
    }

    pub fn with_tolerance(element: Element, rel_tol: f64) -> Result<Self> {
        let deviation = element.hermitian_deviation();
        if deviation > rel_tol * scale_of(element.matrix()) {
            return Err(Error::NotHermitian { deviation });
        }
        let m = element.matrix();
        let sym = (m + m.adjoint()) * c64(0.5, 0.0);
        Ok(Self(Element(sym)))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Element::from_real_rows(rows)?)
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        Self(Element::real_diagonal(values))
    }

    pub fn identity(n: usize) -> Self {
        Self(Element::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(Element::zeros(n))
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("static")
    }

    pub fn pauli_y() -> Self {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        );
        Self(Element(m))
    }

    pub fn pauli_z() -> Self {
        Self::real_diagonal(&[1.0, -1.0])
    }

    /// `tau(xi) = xi . (tau_1, tau_2, tau_3)` for a 3-vector `xi`.
    pub fn pauli_along(xi: [f64; 3]) -> Self {
        let m = Self::pauli_x().0.matrix() * c64(xi[0], 0.0)
            + Self::pauli_y().0.matrix() * c64(xi[1], 0.0)
            + Self::pauli_z().0.matrix() * c64(xi[2], 0.0);
        Self(Element(m))
    }

    pub fn element(&self) -> &Element {
        &self.0
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn into_element(self) -> Element {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Real linear combination `a*self + b*other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_dims(&self.0, &other.0)?;
        Ok(Self(Element(
            self.matrix() * c64(a, 0.0) + other.matrix() * c64(b, 0.0),
        )))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kron(&other.0))
    }

    /// `p A p` for a Hermitian `p`.
    pub fn sandwich(&self, p: &Element) -> Self {
        let m = p.matrix() * self.matrix() * p.matrix();
        let sym = (&m + m.adjoint()) * c64(0.5, 0.0);
        Self(Element(sym))
    }
}

/// An orthogonal projector `p = p* = p^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    element: Element,
    rank: usize,
}

impl Projector {
    pub fn new(element: Element) -> Result<Self> {
        Self::with_tolerance(element, Tolerances::default().projector)
    }

    pub fn with_tolerance(element: Element, rel_tol: f64) -> Result<Self> {
        let m = element.matrix();
        let scale = scale_of(m);
        let idem = (m * m - m).norm();
        if idem > rel_tol * scale {
            return Err(Error::NotProjector(format!("|p^2 - p| = {idem:e}")));
        }
        let herm = element.hermitian_deviation();
        if herm > rel_tol * scale {
            return Err(Error::NotProjector(format!("|p* - p| = {herm:e}")));
        }
        let tr = element.trace().re;
        let rank = tr.round();
        if (tr - rank).abs() > rel_tol * scale {
            return Err(Error::NotProjector(format!("non-integer trace {tr}")));
        }
        Ok(Self {
            element,
            rank: rank as usize,
        })
    }

    /// Projector onto the span of orthonormal columns.
    pub fn onto_columns(columns: &CMatrix) -> Self {
        let m = columns * columns.adjoint();
        Self {
            rank: columns.ncols(),
            element: Element(m),
        }
    }

    /// Rank-one projector onto `v / |v|`.
    pub fn onto_vector(v: &CVector) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let u = v / c64(n, 0.0);
        Ok(Self {
            element: Element::outer(&u),
            rank: 1,
        })
    }

    pub fn element(&self) -> &Element {
        &self.element
    }

    pub fn matrix(&self) -> &CMatrix {
        self.element.matrix()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.element.dim()
    }

    pub fn as_observable(&self) -> Observable {
        Observable(self.element.clone())
    }
}

pub fn involution(u: &Element) -> Element {
    u.adjoint()
}

/// Jordan product `((A+B)^2 - A^2 - B^2) / 2`.
pub fn jordan_product(a: &Observable, b: &Observable) -> Result<Observable> {
    check_dims(a.element(), b.element())?;
    let s = a.matrix() + b.matrix();
    let m = (&s * &s - a.matrix() * a.matrix() - b.matrix() * b.matrix()) * c64(0.5, 0.0);
    Ok(Observable(Element((&m + m.adjoint()) * c64(0.5, 0.0))))
}

fn canonical_cmp(a: &C64, b: &C64) -> Ordering {
    b.re.total_cmp(&a.re).then_with(|| b.im.total_cmp(&a.im))
}

/// Eigenvalues with multiplicity, descending by real part then by imaginary part.
pub fn spectrum(u: &Element) -> Result<Vec<C64>> {
    let mut values: Vec<C64> = if u.is_hermitian(Tolerances::default().hermitian) {
        let h = Observable(Element((u.matrix() + u.matrix().adjoint()) * c64(0.5, 0.0)));
        hermitian_eigenvalues(&h)
            .into_iter()
            .map(|x| c64(x, 0.0))
            .collect()
    } else {
        let schur = Schur::try_new(u.matrix().clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigensolver("Schur iteration did not converge".into()))?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::Eigensolver("Schur form is not triangular".into()))?;
        ev.iter().copied().collect()
    };
    values.sort_by(canonical_cmp);
    Ok(values)
}

pub fn spectral_radius(u: &Element) -> Result<f64> {
    Ok(spectrum(u)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// C*-norm `sqrt(r(U* U))`.
pub fn norm(u: &Element) -> Result<f64> {
    let gram = Observable(Element(u.matrix().adjoint() * u.matrix()));
    let top = hermitian_eigenvalues(&gram)
        .into_iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()));
    Ok(top.sqrt())
}

/// `U = A + iB` with `A = (U + U*)/2`, `B = (U - U*)/(2i)`.
pub fn hermitian_split(u: &Element) -> (Observable, Observable) {
    let m = u.matrix();
    let adj = m.adjoint();
    let a = (m + &adj) * c64(0.5, 0.0);
    let b = (m - &adj) * c64(0.0, -0.5);
    (Observable(Element(a)), Observable(Element(b)))
}

/// True iff `|AB - BA| <= tol` in the C*-norm.
pub fn commutes(a: &Element, b: &Element, tol: f64) -> Result<bool> {
    let c = a.commutator(b)?;
    Ok(norm(&c)? <= tol)
}

fn hermitian_eigenvalues(h: &Observable) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(h.matrix().clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Canonical eigendecomposition of a Hermitian element.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
    /// Index ranges of clustered (degenerate) eigenvalues.
    pub clusters: Vec<std::ops::Range<usize>>,
}

/// Eigendecomposition with canonical ordering and phases. Degenerate
/// eigenspaces get the canonical basis of [`canonical_subspace_basis`].
pub fn eigh(h: &Observable, tol: &Tolerances) -> Eigh {
    let n = h.dim();
    let se = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }

    let clusters = cluster(&values, tol.degeneracy);
    for range in &clusters {
        let block = vectors.columns(range.start, range.len()).into_owned();
        let canon = if range.len() == 1 {
            let mut v = block;
            fix_phase(&mut v);
            v
        } else {
            canonical_subspace_basis(&(&block * block.adjoint()), range.len())
        };
        vectors
            .columns_mut(range.start, range.len())
            .copy_from(&canon);
    }
    Eigh {
        values,
        vectors,
        clusters,
    }
}

/// Groups sorted (descending) values whose consecutive gaps are below
/// `rel_gap * max(1, max|value|)`.
pub(crate) fn cluster(values: &[f64], rel_gap: f64) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() >= rel_gap * scale {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Rotates each column so its largest-magnitude component is real positive.
/// Ties are broken toward the lowest index.
pub(crate) fn fix_phase(columns: &mut CMatrix) {
    for mut col in columns.column_iter_mut() {
        let max = col.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if max == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .position(|z| z.norm() >= max * (1.0 - 1e-9))
            .expect("max exists");
        let z = col[pivot];
        let phase = z.conj() / z.norm();
        col *= phase;
        // exact zero imaginary part on the pivot
        col[pivot] = c64(col[pivot].re, 0.0);
    }
}

/// Orthonormal basis of the range of the projector `p` (of rank `k`) built
/// from projected standard-basis vectors by pivoted Gram-Schmidt. Depends
/// only on the subspace, not on any basis used to describe it.
pub fn canonical_subspace_basis(p: &CMatrix, k: usize) -> CMatrix {
    let n = p.nrows();
    let mut accepted: Vec<CVector> = Vec::with_capacity(k);
    let mut residuals: Vec<CVector> = (0..n).map(|i| p.column(i).into_owned()).collect();
    while accepted.len() < k {
        let norms: Vec<f64> = residuals.iter().map(|r| r.norm()).collect();
        let best = norms.iter().cloned().fold(0.0_f64, f64::max);
        if best <= 1e-12 {
            break;
        }
        let pivot = norms
            .iter()
            .position(|&x| x >= best * (1.0 - 1e-9))
            .expect("max exists");
        let mut v = residuals[pivot].clone();
        // second pass for numerical orthogonality
        for q in &accepted {
            let overlap = q.dotc(&v);
            v -= q * overlap;
        }
        let nv = v.norm();
        let q = v / c64(nv, 0.0);
        for r in residuals.iter_mut() {
            let overlap = q.dotc(r);
            *r -= &q * overlap;
        }
        accepted.push(q);
    }
    let mut out = CMatrix::zeros(n, accepted.len());
    for (j, q) in accepted.iter().enumerate() {
        out.set_column(j, q);
    }
    fix_phase(&mut out);
    out
}

/// Spectral projectors of a Hermitian element, one per eigenvalue cluster,
/// in descending eigenvalue order.
pub fn spectral_projectors(h: &Observable, tol: &Tolerances) -> Vec<(f64, Projector)> {
    let e = eigh(h, tol);
    e.clusters
        .iter()
        .map(|r| {
            let mean = e.values[r.clone()].iter().sum::<f64>() / r.len() as f64;
            let cols = e.vectors.columns(r.start, r.len()).into_owned();
            (mean, Projector::onto_columns(&cols))
        })
        .collect()
}

/// Numerical rank: singular values above `rel_tol * max(1, sigma_max)`.
pub fn matrix_rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = SVD::new(m.clone(), false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Dimension of the commutant `{X : XM = MX for all M}` inside `M_d`.
pub fn commutant_dimension(generators: &[CMatrix], rel_tol: f64) -> usize {
    let Some(first) = generators.first() else {
        return 0;
    };
    let d = first.nrows();
    let eye = CMatrix::identity(d, d);
    let dd = d * d;
    let mut system = CMatrix::zeros(dd * generators.len(), dd);
    for (k, m) in generators.iter().enumerate() {
        // vec(MX - XM) = (I (x) M - M^T (x) I) vec(X), column-major vec
        let block = eye.kronecker(m) - m.transpose().kronecker(&eye);
        system.view_mut((k * dd, 0), (dd, dd)).copy_from(&block);
    }
    dd - matrix_rank(&system, rel_tol)
}
