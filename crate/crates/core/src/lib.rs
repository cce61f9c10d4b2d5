//! Numerical verification of exactly solvable phase-space integrals on
//! complex projective space CP^N and its non-compact dual CQ^N.
//!
//! Every closed form in [`closed_forms`] has at least one independent
//! numerical route elsewhere in the crate: quadrature, Monte-Carlo and
//! contour integration in [`integrators`], finite differences of the
//! projector in [`geometry`], truncated tensor towers in [`embedding`], and
//! truncated Fock sums in [`quantum`].

pub mod closed_forms;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod integrators;
pub mod quantum;
pub mod spectrum;

mod linalg;

pub use error::{Error, Result};
pub use spectrum::{
    mu_vector, validate_spectrum, ChartPoint, Kind, Method, ParamFile, PartitionEstimate,
    QuantumParams, Spectrum,
};
