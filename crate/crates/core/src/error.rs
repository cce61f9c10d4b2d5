use thiserror::Error;

use crate::spectrum::Kind;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spectrum needs at least two energies, got {0}")]
    TooFewLevels(usize),

    #[error("energies violate the {kind} ordering at index {index}")]
    OrderingViolation { kind: Kind, index: usize },

    #[error("degenerate spectrum: theta[{i}] == theta[{j}]")]
    DegenerateSpectrum { i: usize, j: usize },

    #[error("inverse temperature must be positive and finite, got {0}")]
    NonPositiveRho(f64),

    #[error("expected a {expected} object, got {found}")]
    KindMismatch { expected: Kind, found: Kind },

    #[error("point lies outside the chart: |xi|^2 = {norm_sq}")]
    OutOfChart { norm_sq: f64 },

    #[error("point too close to the boundary for finite differences: |xi|^2 = {norm_sq}")]
    NearBoundary { norm_sq: f64 },

    #[error("finite-difference step {h} leaves the unit ball")]
    StepTooLarge { h: f64 },

    #[error("trace diverges: |exp(-i mu_{mode} T)| = {modulus} >= 1")]
    DivergentRegime { mode: usize, modulus: f64 },

    #[error("phi = {0} makes sin(phi/2) vanish")]
    SingularPhi(f64),

    #[error("{q} nodes per angle cannot resolve occupations up to {m_max} (need q > 2 m_max)")]
    InsufficientNodes { q: u64, m_max: u64 },

    #[error("evaluation budget of {budget} exhausted ({needed} required)")]
    BudgetExhausted { budget: u64, needed: u64 },

    #[error("importance weights have infinite variance: proposal rate 1 vs target rate {rate} in mode {mode}")]
    WeightOverflow { mode: usize, rate: f64 },

    #[error("contour tail bound {bound:e} exceeds tolerance {tol:e}; raise the cutoff")]
    TailDominates { bound: f64, tol: f64 },

    #[error("{what}: {lhs} vs {rhs}")]
    CrossCheckFailed { what: &'static str, lhs: f64, rhs: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
