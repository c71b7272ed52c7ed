//! Elementary states: one character per measurement context.
//!
//! An elementary state is stable on one context (the stabilized context) and
//! carries a lazily filled table of characters for every other context it
//! has been asked about. A fresh context gets a character drawn with the Born
//! weights of the state's class, from a random stream keyed by the state's
//! seed and the context label. The draw therefore does not depend on the
//! order in which contexts are queried (under [`OverlapPolicy::Independent`]).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{c64, spectral_projectors, CMatrix, Element, Observable, Tolerances};
use crate::contexts::{
    contains, evaluate_unchecked, masa_from_observable, shared_blocks, Character, Context,
    ContextLabel,
};
use crate::error::{Error, Result};
use crate::par;
use crate::statistics::{born_weights, EnsembleEstimate, QuantumState};

const CLASS_TOL: f64 = 1e-10;

/// How a fresh context's character relates to characters already assigned
/// on overlapping contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OverlapPolicy {
    /// Contexts are sampled independently; an observable shared by two
    /// non-stabilized contexts may take different values in each.
    #[default]
    Independent,
    /// Sampling is conditioned so that observables in the intersection with
    /// every already-assigned context keep their values.
    Consistent,
}

#[derive(Debug, Clone)]
pub struct ElementaryState {
    stabilized: Character,
    assignments: BTreeMap<ContextLabel, Character>,
    seed: u64,
    class_state: Arc<QuantumState>,
    policy: OverlapPolicy,
}

/// Elementary state stable on `eta` with character `chi`, in the class of
/// `class_state`. The class state must give the stabilized character weight one.
pub fn construct_elementary_state(
    eta: &Context,
    chi: &Character,
    class_state: Arc<QuantumState>,
    seed: u64,
) -> Result<ElementaryState> {
    if chi.context().label() != eta.label() {
        return Err(Error::CharacterContextMismatch {
            character: chi.context().label().to_string(),
            context: eta.label().to_string(),
        });
    }
    let weight = born_weights(&class_state, eta)?.weights()[chi.index()];
    if weight < 1.0 - CLASS_TOL {
        return Err(Error::ClassInconsistency { weight });
    }
    let mut assignments = BTreeMap::new();
    assignments.insert(eta.label(), chi.clone());
    Ok(ElementaryState {
        stabilized: chi.clone(),
        assignments,
        seed,
        class_state,
        policy: OverlapPolicy::default(),
    })
}

impl ElementaryState {
    /// Elementary state of a pure class, stabilized on the context generated
    /// by the state's projector.
    pub fn for_pure_state(class_state: Arc<QuantumState>, seed: u64) -> Result<Self> {
        let p0 = class_state
            .pure_projector()
            .ok_or_else(|| Error::InvalidState("class state is not pure".into()))?;
        let eta = masa_from_observable(&p0.as_observable());
        let weights = born_weights(&class_state, &eta)?;
        let index = weights
            .weights()
            .iter()
            .position(|&w| w >= 1.0 - CLASS_TOL)
            .ok_or(Error::ClassInconsistency {
                weight: weights.weights().iter().cloned().fold(0.0, f64::max),
            })?;
        let chi = Character::new(&eta, index)?;
        construct_elementary_state(&eta, &chi, class_state, seed)
    }

    pub fn with_policy(mut self, policy: OverlapPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn stabilized_context(&self) -> &Context {
        self.stabilized.context()
    }

    pub fn stabilized_character(&self) -> &Character {
        &self.stabilized
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn class_state(&self) -> &QuantumState {
        &self.class_state
    }

    pub fn assignment(&self, context: &Context) -> Option<&Character> {
        self.assignments.get(&context.label())
    }

    pub fn assigned_count(&self) -> usize {
        self.assignments.len()
    }

    /// Value of `a` in `context`, assigning the context's character first if
    /// it has none yet.
    pub fn value(&mut self, context: &Context, a: &Observable) -> Result<f64> {
        if !contains(context, a)? {
            return Err(Error::NotInContext {
                label: context.label().to_string(),
            });
        }
        let character = self.character_for(context)?;
        Ok(evaluate_unchecked(&character, a))
    }

    /// The character on `context`, assigning it if needed.
    pub fn character_for(&mut self, context: &Context) -> Result<Character> {
        if let Some(c) = self.assignments.get(&context.label()) {
            return Ok(c.clone());
        }
        let space = born_weights(&self.class_state, context)?;
        let mut weights = space.weights().to_vec();
        if self.policy == OverlapPolicy::Consistent {
            for assigned in self.assignments.values() {
                let (mine, theirs) = shared_blocks(context, assigned.context(), 1e-8)?;
                let block = theirs[assigned.index()];
                for (w, b) in weights.iter_mut().zip(&mine) {
                    if *b != block {
                        *w = 0.0;
                    }
                }
            }
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(Error::ClassInconsistency { weight: 0.0 });
            }
            weights.iter_mut().for_each(|w| *w /= total);
        }
        let u: f64 = par::keyed_rng(self.seed, context.label().stream_id()).random();
        let index = draw(&weights, u);
        let character = Character::new(context, index)?;
        self.assignments.insert(context.label(), character.clone());
        Ok(character)
    }
}

fn draw(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if w > 0.0 && u < acc {
            return k;
        }
    }
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("positive total weight")
}

/// True iff both states carry the same character on `context`.
pub fn is_equivalent(
    phi: &ElementaryState,
    other: &ElementaryState,
    context: &Context,
) -> Result<bool> {
    let unassigned = || Error::Unassigned {
        label: context.label().to_string(),
    };
    let a = phi.assignment(context).ok_or_else(unassigned)?;
    let b = other.assignment(context).ok_or_else(unassigned)?;
    Ok(a.index() == b.index())
}

/// Mean of `value(., context, a)` over `n` fresh elementary states of a pure
/// class. State `i` uses seed `par::item_seed(seed, i)`.
pub fn ensemble_value_mean(
    class_state: Arc<QuantumState>,
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
    let template = ElementaryState::for_pure_state(class_state, 0)?;
    let dim = context.dim();
    let partials = par::map_chunks(n, |_, range| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; dim];
        for i in range {
            let mut phi = template.clone();
            phi.seed = par::item_seed(seed, i);
            counts[phi.character_for(context)?.index()] += 1;
        }
        Ok(counts)
    });
    let mut counts = vec![0u64; dim];
    for p in partials {
        counts.iter_mut().zip(p?).for_each(|(a, b)| *a += b);
    }
    let values: Vec<f64> = context
        .characters()
        .iter()
        .map(|c| evaluate_unchecked(c, a))
        .collect();
    Ok(EnsembleEstimate::from_counts(&values, &counts, seed))
}

/// `A = r0 I + r tau(xi)` for a 2x2 Hermitian `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bloch {
    pub r0: f64,
    pub r: f64,
    pub xi: [f64; 3],
}

fn check_two_level(a: &Observable) -> Result<()> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: a.dim(),
        });
    }
    Ok(())
}

fn bloch_parts(a: &Observable) -> (f64, f64, crate::algebra::C64, f64) {
    let m = a.matrix();
    let (aa, dd, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
    let r = ((aa - dd) * (aa - dd) / 4.0 + b.norm_sqr()).sqrt();
    ((aa + dd) / 2.0, r, b, aa - dd)
}

/// Decomposes a 2x2 observable as `r0 I + r tau(xi)` with the standard Pauli
/// matrices, so `xi_2 = -Im(A_12) / r`.
pub fn bloch_decompose(a: &Observable) -> Result<Bloch> {
    check_two_level(a)?;
    let (r0, r, b, diff) = bloch_parts(a);
    if r < 1e-12 {
        return Err(Error::DegenerateDirection { r });
    }
    Ok(Bloch {
        r0,
        r,
        xi: [b.re / r, -b.im / r, diff / (2.0 * r)],
    })
}

/// Deterministic sign field `f(xi)` on unit 3-vectors with `f(-xi) = -f(xi)`.
///
/// Directions are quantized and mapped to the hemisphere representative
/// (`xi_3 > 0`, ties on `xi_1` then `xi_2`). The representative's sign is
/// `+1` when a seeded hash, read as a uniform number, falls below
/// `(1 + s . rep) / 2`, where `s` is the Bloch vector of the class state. An
/// ensemble of fields over seeds thus reproduces the Born statistics of that
/// state, and the ground-state field (`s = -e_3`) always has `f(e_3) = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelSignField {
    pub seed: u64,
    pub class_bloch: [f64; 3],
}

const QUANT: f64 = (1u64 << 40) as f64;

impl TwoLevelSignField {
    pub fn new(seed: u64, class_bloch: [f64; 3]) -> Self {
        Self { seed, class_bloch }
    }

    /// Field of the ground class of `H = diag(E0, -E0)`, `E0 > 0`.
    pub fn ground(seed: u64) -> Self {
        Self::new(seed, [0.0, 0.0, -1.0])
    }

    /// Field of the class of a pure 2x2 state.
    pub fn for_state(seed: u64, psi: &QuantumState) -> Result<Self> {
        if psi.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: 2,
                right: psi.dim(),
            });
        }
        if psi.pure_projector().is_none() {
            return Err(Error::InvalidState(
                "sign fields need a pure class state".into(),
            ));
        }
        let s = [
            Observable::pauli_x(),
            Observable::pauli_y(),
            Observable::pauli_z(),
        ]
        .map(|t| psi.functional(t.element()).expect("dim 2").re);
        Ok(Self::new(seed, s))
    }

    pub fn sign(&self, xi: [f64; 3]) -> f64 {
        let q = xi.map(|x| (x * QUANT).round() as i64);
        let upper = (q[2], q[0], q[1]) > (0, 0, 0);
        let (rep_q, rep, orient) = if upper {
            (q, xi, 1.0)
        } else {
            (q.map(|v| -v), xi.map(|v| -v), -1.0)
        };
        let mut h = par::splitmix64(self.seed);
        for v in rep_q {
            h = par::splitmix64(h ^ v as u64);
        }
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        let len = rep.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = rep
            .iter()
            .zip(&self.class_bloch)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / len;
        let rep_sign = if u < (1.0 + dot) / 2.0 { 1.0 } else { -1.0 };
        orient * rep_sign
    }
}

/// `r0(A) + r(A) f(xi(A))`, or `r0` when `A` is a multiple of the identity.
pub fn two_level_value(f: &TwoLevelSignField, a: &Observable) -> Result<f64> {
    match bloch_decompose(a) {
        Ok(b) => Ok(b.r0 + b.r * f.sign(b.xi)),
        Err(Error::DegenerateDirection { .. }) => Ok(bloch_parts(a).0),
        Err(e) => Err(e),
    }
}

/// `sum_l p_l A p_l` over the spectral projectors of `H`: the weak time
/// average of `A(t) = exp(-iHt) A exp(iHt)`. Degenerate eigenspaces of `H`
/// are kept as whole blocks.
pub fn time_average_observable(a: &Observable, h: &Observable) -> Result<Observable> {
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: h.dim(),
        });
    }
    let n = a.dim();
    let mut acc = CMatrix::zeros(n, n);
    for (_, p) in spectral_projectors(h, &Tolerances::default()) {
        acc += p.matrix() * a.matrix() * p.matrix();
    }
    let sym = (&acc + acc.adjoint()) * c64(0.5, 0.0);
    Observable::new(Element::new(sym)?)
}
