//! Measurement contexts: maximal commutative subalgebras of `M_n(C)`.
//!
//! A context is stored as an orthonormal joint eigenbasis. Its algebra is the
//! set of operators diagonal in that basis, and its characters are the
//! evaluations at the basis vectors.

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::algebra::{
    c64, canonical_subspace_basis, eigh, fix_phase, norm, CMatrix, CVector, Element, Observable,
    Projector, Tolerances,
};
use crate::error::{Error, Result};

/// Off-diagonal threshold (relative to the observable's norm) for membership.
pub const CONTAINS_TOL: f64 = 1e-8;

/// Canonical identifier of a context, invariant under phases and ordering of
/// the basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContextLabel([u8; 16]);

impl ContextLabel {
    fn of_basis(basis: &CMatrix) -> Self {
        const GRID: f64 = 1e6;
        let n = basis.nrows();
        let mut keys: Vec<Vec<i64>> = basis
            .column_iter()
            .map(|b| {
                let mut key = Vec::with_capacity(2 * n * n);
                for i in 0..n {
                    for j in 0..n {
                        let z = b[i] * b[j].conj();
                        key.push((z.re * GRID).round() as i64);
                        key.push((z.im * GRID).round() as i64);
                    }
                }
                key
            })
            .collect();
        keys.sort();
        let mut hasher = Sha256::new();
        hasher.update((n as u64).to_le_bytes());
        for key in &keys {
            for v in key {
                hasher.update(v.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        let mut out = [0u8; 16];
        out.copy_from_slice(&digest[..16]);
        Self(out)
    }

    /// 64-bit stream identifier derived from the label.
    pub fn stream_id(&self) -> u64 {
        u64::from_le_bytes(self.0[..8].try_into().expect("16 bytes"))
    }
}

impl fmt::Display for ContextLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Debug)]
struct ContextData {
    label: ContextLabel,
    basis: CMatrix,
    generators: Vec<Observable>,
}

/// A maximal commutative subalgebra, cheap to clone.
#[derive(Debug, Clone)]
pub struct Context(Arc<ContextData>);

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.0.label == other.0.label
    }
}

impl Context {
    fn from_basis(basis: CMatrix, generators: Vec<Observable>) -> Self {
        let label = ContextLabel::of_basis(&basis);
        Self(Arc::new(ContextData {
            label,
            basis,
            generators,
        }))
    }

    /// The context of operators diagonal in the standard basis.
    pub fn standard(n: usize) -> Self {
        Self::from_basis(CMatrix::identity(n, n), Vec::new())
    }

    pub fn label(&self) -> ContextLabel {
        self.0.label
    }

    pub fn dim(&self) -> usize {
        self.0.basis.nrows()
    }

    /// Joint eigenbasis, one vector per column.
    pub fn basis(&self) -> &CMatrix {
        &self.0.basis
    }

    pub fn basis_vector(&self, k: usize) -> CVector {
        self.0.basis.column(k).into_owned()
    }

    pub fn generators(&self) -> &[Observable] {
        &self.0.generators
    }

    /// Minimal projector `|b_k><b_k|` of the context.
    pub fn projector(&self, k: usize) -> Projector {
        Projector::onto_columns(&self.0.basis.columns(k, 1).into_owned())
    }

    /// Matrix of `a` in the context basis.
    pub fn in_basis(&self, a: &Element) -> CMatrix {
        self.0.basis.adjoint() * a.matrix() * &self.0.basis
    }

    /// Diagonal operator `sum_k values[k] |b_k><b_k|` of this context.
    pub fn diagonal_observable(&self, values: &[f64]) -> Result<Observable> {
        if values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: self.dim(),
            });
        }
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&x| c64(x, 0.0)),
        ));
        let m = &self.0.basis * d * self.0.basis.adjoint();
        Observable::new(Element::new(m)?)
    }

    pub fn characters(&self) -> Vec<Character> {
        characters(self)
    }
}

/// A character of a context: evaluation at basis vector `index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    context: Context,
    index: usize,
}

impl Character {
    pub fn new(context: &Context, index: usize) -> Result<Self> {
        if index >= context.dim() {
            return Err(Error::InvalidConfig(format!(
                "character index {index} out of range for dimension {}",
                context.dim()
            )));
        }
        Ok(Self {
            context: context.clone(),
            index,
        })
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// Builds the context that jointly diagonalizes pairwise commuting observables.
/// Degenerate joint eigenspaces are completed canonically.
pub fn joint_eigenbasis(observables: &[Observable]) -> Result<Context> {
    let tol = Tolerances::default();
    let Some(first) = observables.first() else {
        return Err(Error::InvalidConfig("no observables given".into()));
    };
    let n = first.dim();
    for (i, a) in observables.iter().enumerate() {
        if a.dim() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: a.dim(),
            });
        }
        for (j, b) in observables.iter().enumerate().skip(i + 1) {
            let scale = a.element().frobenius().max(1.0) * b.element().frobenius().max(1.0);
            let c = a.element().commutator(b.element())?;
            if norm(&c)? > tol.degeneracy * scale {
                return Err(Error::NonCommuting {
                    first: i,
                    second: j,
                });
            }
        }
    }

    let mut blocks: Vec<CMatrix> = vec![CMatrix::identity(n, n)];
    for a in observables {
        let mut refined = Vec::with_capacity(blocks.len());
        for v in blocks {
            if v.ncols() == 1 {
                refined.push(v);
                continue;
            }
            let local = v.adjoint() * a.matrix() * &v;
            let local = Observable::with_tolerance(Element::new(local)?, 1e-6)?;
            let e = eigh(&local, &tol);
            for r in &e.clusters {
                let w = e.vectors.columns(r.start, r.len()).into_owned();
                refined.push(&v * w);
            }
        }
        blocks = refined;
    }

    let mut basis = CMatrix::zeros(n, n);
    let mut col = 0;
    for v in blocks {
        let k = v.ncols();
        let canon = if k == 1 {
            let mut v = v;
            fix_phase(&mut v);
            v
        } else {
            canonical_subspace_basis(&(&v * v.adjoint()), k)
        };
        basis.columns_mut(col, k).copy_from(&canon);
        col += k;
    }
    Ok(Context::from_basis(basis, observables.to_vec()))
}

/// The context generated by a single observable.
pub fn masa_from_observable(a: &Observable) -> Context {
    joint_eigenbasis(std::slice::from_ref(a))
        .expect("a single observable always commutes with itself")
}

pub fn characters(context: &Context) -> Vec<Character> {
    (0..context.dim())
        .map(|index| Character {
            context: context.clone(),
            index,
        })
        .collect()
}

/// True iff `a` is diagonal in the context basis up to
/// `CONTAINS_TOL * |a|`.
pub fn contains(context: &Context, a: &Observable) -> Result<bool> {
    if a.dim() != context.dim() {
        return Err(Error::DimensionMismatch {
            left: context.dim(),
            right: a.dim(),
        });
    }
    let d = context.in_basis(a.element());
    let threshold = CONTAINS_TOL * norm(a.element())?;
    let n = d.nrows();
    for i in 0..n {
        for j in 0..n {
            if i != j && d[(i, j)].norm() > threshold {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Value of the character on an observable of its context.
pub fn evaluate(character: &Character, a: &Observable) -> Result<f64> {
    if !contains(&character.context, a)? {
        return Err(Error::NotInContext {
            label: character.context.label().to_string(),
        });
    }
    Ok(evaluate_unchecked(character, a))
}

pub(crate) fn evaluate_unchecked(character: &Character, a: &Observable) -> f64 {
    let b = character.context.0.basis.column(character.index);
    (b.adjoint() * a.matrix() * b)[(0, 0)].re
}

/// Connected components of the overlap graph between two bases. Basis vectors
/// in the same component span the minimal projectors of the intersection
/// algebra `Q_a ∩ Q_b`. Returns the component id of each basis vector of `a`
/// and of `b`.
pub fn shared_blocks(a: &Context, b: &Context, tol: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.dim(),
        });
    }
    let overlap = a.basis().adjoint() * b.basis();
    // union-find over 2n nodes: a-vectors 0..n, b-vectors n..2n
    let mut parent: Vec<usize> = (0..2 * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..n {
            if overlap[(i, j)].norm() > tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, n + j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut ids = std::collections::BTreeMap::new();
    let mut component = |parent: &mut Vec<usize>, x: usize| {
        let root = find(parent, x);
        let next = ids.len();
        *ids.entry(root).or_insert(next)
    };
    let ca: Vec<usize> = (0..n).map(|i| component(&mut parent, i)).collect();
    let cb: Vec<usize> = (0..n).map(|j| component(&mut parent, n + j)).collect();
    Ok((ca, cb))
}
