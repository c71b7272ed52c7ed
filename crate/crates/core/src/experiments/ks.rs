//! Kochen-Specker colouring of orthogonal direction sets.
//!
//! Each context is a complete set of mutually orthogonal directions in `R^d`.
//! For spin 1 in three dimensions the squared spin projections along an
//! orthogonal triple commute and take the values `(0, 1, 1)` in some order,
//! so a noncontextual value map must put exactly one `0` in every context.
//! The same rule is applied in any dimension `d`.

use serde::{Deserialize, Serialize};

use crate::algebra::{c64, CVector, Projector};
use crate::error::{Error, Result};

const ORTHOGONALITY_TOL: f64 = 1e-8;
const BUNDLED: &str = include_str!("../../data/ks_cabello_18.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsInstance {
    pub directions: Vec<Vec<f64>>,
    pub contexts: Vec<Vec<usize>>,
}

impl KsInstance {
    /// Validates and normalizes the directions.
    pub fn new(directions: Vec<Vec<f64>>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedInstance(msg));
        let Some(d) = directions.first().map(Vec::len) else {
            return bad("no directions".into());
        };
        if d < 2 {
            return bad(format!("dimension {d} is too small"));
        }
        let mut unit = Vec::with_capacity(directions.len());
        for (i, v) in directions.iter().enumerate() {
            if v.len() != d {
                return bad(format!(
                    "direction {i} has {} components, expected {d}",
                    v.len()
                ));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm < 1e-12 {
                return bad(format!("direction {i} is zero or not finite"));
            }
            unit.push(v.iter().map(|x| x / norm).collect::<Vec<_>>());
        }
        for (c, ctx) in contexts.iter().enumerate() {
            if ctx.len() != d {
                return bad(format!(
                    "context {c} has {} directions, expected {d}",
                    ctx.len()
                ));
            }
            for (p, &i) in ctx.iter().enumerate() {
                if i >= unit.len() {
                    return bad(format!("context {c} refers to missing direction {i}"));
                }
                for &j in &ctx[..p] {
                    if i == j {
                        return bad(format!("context {c} repeats direction {i}"));
                    }
                    let dot: f64 = unit[i].iter().zip(&unit[j]).map(|(x, y)| x * y).sum();
                    if dot.abs() > ORTHOGONALITY_TOL {
                        return bad(format!(
                            "directions {i} and {j} in context {c} are not orthogonal ({dot:e})"
                        ));
                    }
                }
            }
        }
        Ok(Self {
            directions: unit,
            contexts,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            directions: Vec<Vec<f64>>,
            contexts: Vec<Vec<usize>>,
        }
        let raw: Raw =
            serde_json::from_str(text).map_err(|e| Error::MalformedInstance(e.to_string()))?;
        Self::new(raw.directions, raw.contexts)
    }

    /// The 18-direction, 9-context uncolourable set in `R^4`. Every direction
    /// lies in exactly two contexts, so the number of zeros would have to be
    /// both 9 and even.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled instance is valid")
    }

    /// The coordinate axes of `R^3` as one context.
    pub fn single_triple() -> Self {
        Self::new(
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![vec![0, 1, 2]],
        )
        .expect("axes are orthogonal")
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }

    /// Rank-one projectors onto the directions of one context. They commute
    /// pairwise and sum to the identity.
    pub fn context_projectors(&self, context: usize) -> Vec<Projector> {
        self.contexts[context]
            .iter()
            .map(|&i| {
                let v = CVector::from_iterator(
                    self.dim(),
                    self.directions[i].iter().map(|&x| c64(x, 0.0)),
                );
                Projector::onto_vector(&v).expect("unit vector")
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KsMode {
    Noncontextual,
    Contextual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KsAssignment {
    /// One value per direction.
    Noncontextual(Vec<u8>),
    /// One value per (context, slot); a direction may read differently in
    /// different contexts.
    Contextual(Vec<Vec<u8>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KsOutcome {
    pub mode: KsMode,
    /// `None` means no assignment exists.
    pub assignment: Option<KsAssignment>,
    /// Search nodes visited.
    pub nodes: u64,
}

impl KsOutcome {
    pub fn is_sat(&self) -> bool {
        self.assignment.is_some()
    }
}

pub fn ks_search(instance: &KsInstance, mode: KsMode) -> KsOutcome {
    match mode {
        KsMode::Contextual => {
            let witness = instance
                .contexts
                .iter()
                .map(|ctx| (0..ctx.len()).map(|slot| u8::from(slot != 0)).collect())
                .collect();
            KsOutcome {
                mode,
                assignment: Some(KsAssignment::Contextual(witness)),
                nodes: instance.contexts.len() as u64,
            }
        }
        KsMode::Noncontextual => {
            let mut solver = Solver::new(instance);
            let found = solver.search();
            KsOutcome {
                mode,
                assignment: found.then(|| {
                    KsAssignment::Noncontextual(
                        solver.values.iter().map(|v| v.unwrap_or(1)).collect(),
                    )
                }),
                nodes: solver.nodes,
            }
        }
    }
}

/// True iff every context contains exactly one zero.
pub fn verify_noncontextual(instance: &KsInstance, values: &[u8]) -> bool {
    values.len() == instance.directions.len()
        && values.iter().all(|&v| v <= 1)
        && instance
            .contexts
            .iter()
            .all(|ctx| ctx.iter().filter(|&&i| values[i] == 0).count() == 1)
}

pub fn verify_contextual(instance: &KsInstance, values: &[Vec<u8>]) -> bool {
    values.len() == instance.contexts.len()
        && values.iter().zip(&instance.contexts).all(|(vals, ctx)| {
            vals.len() == ctx.len()
                && vals.iter().all(|&v| v <= 1)
                && vals.iter().filter(|&&v| v == 0).count() == 1
        })
}

pub fn verify(instance: &KsInstance, assignment: &KsAssignment) -> bool {
    match assignment {
        KsAssignment::Noncontextual(v) => verify_noncontextual(instance, v),
        KsAssignment::Contextual(v) => verify_contextual(instance, v),
    }
}

/// Backtracking with unit propagation over the per-context "one zero" rule.
struct Solver<'a> {
    instance: &'a KsInstance,
    values: Vec<Option<u8>>,
    /// Contexts containing each direction.
    membership: Vec<Vec<usize>>,
    trail: Vec<usize>,
    nodes: u64,
}

impl<'a> Solver<'a> {
    fn new(instance: &'a KsInstance) -> Self {
        let mut membership = vec![Vec::new(); instance.directions.len()];
        for (c, ctx) in instance.contexts.iter().enumerate() {
            for &i in ctx {
                membership[i].push(c);
            }
        }
        Self {
            instance,
            values: vec![None; instance.directions.len()],
            membership,
            trail: Vec::new(),
            nodes: 0,
        }
    }

    fn assign(&mut self, i: usize, v: u8) {
        self.values[i] = Some(v);
        self.trail.push(i);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let i = self.trail.pop().expect("non-empty");
            self.values[i] = None;
        }
    }

    /// Forces implied values; false on contradiction.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for ctx in &self.instance.contexts {
                let zeros = ctx.iter().filter(|&&i| self.values[i] == Some(0)).count();
                let free: Vec<usize> = ctx
                    .iter()
                    .copied()
                    .filter(|&i| self.values[i].is_none())
                    .collect();
                match (zeros, free.len()) {
                    (z, _) if z > 1 => return false,
                    (0, 0) => return false,
                    (1, n) if n > 0 => {
                        for i in free {
                            self.values[i] = Some(1);
                            self.trail.push(i);
                        }
                        changed = true;
                    }
                    (0, 1) => {
                        self.values[free[0]] = Some(0);
                        self.trail.push(free[0]);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn search(&mut self) -> bool {
        self.nodes += 1;
        if !self.propagate() {
            return false;
        }
        // branch on the free direction touching the most undecided contexts
        let pick = (0..self.values.len())
            .filter(|&i| self.values[i].is_none())
            .max_by_key(|&i| {
                self.membership[i]
                    .iter()
                    .filter(|&&c| {
                        !self.instance.contexts[c]
                            .iter()
                            .any(|&j| self.values[j] == Some(0))
                    })
                    .count()
            });
        let Some(i) = pick else {
            return true;
        };
        for v in [0, 1] {
            let mark = self.trail.len();
            self.assign(i, v);
            if self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}
