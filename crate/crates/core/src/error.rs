use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("element is not Hermitian (|U - U*| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("element is not a projector: {0}")]
    NotProjector(String),

    #[error("projector has rank {rank}, expected rank 1")]
    NotRankOne { rank: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("observables {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },

    #[error("observable is not contained in context {label}")]
    NotInContext { label: String },

    #[error("character belongs to context {character}, not {context}")]
    CharacterContextMismatch { character: String, context: String },

    #[error("class state gives weight {weight} to the stabilized character")]
    ClassInconsistency { weight: f64 },

    #[error("context {label} has no assigned character")]
    Unassigned { label: String },

    #[error("direction undefined: observable is a multiple of the identity (r = {r:e})")]
    DegenerateDirection { r: f64 },

    #[error("at least one sample is required")]
    ZeroSamples,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("malformed Kochen-Specker instance: {0}")]
    MalformedInstance(String),

    #[error("slits overlap")]
    SlitsOverlap,

    #[error("lattice of {size} points is too small (minimum 16)")]
    LatticeTooSmall { size: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
