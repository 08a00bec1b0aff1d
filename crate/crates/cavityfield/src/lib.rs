//! Stress and displacement fields around a shallow, arbitrarily shaped cavity
//! (over-/under-break tunnel) in a gravitational elastic half-plane whose
//! far-field ground surface is fixed.
//!
//! The solution chain:
//!
//! 1. [`geometry`] — cavity boundary, initial geostatic stresses, excavation
//!    tractions and their resultant.
//! 2. [`csm`] — first mapping step: a Charge Simulation Method conformal map
//!    between the cavity exterior and the exterior of the unit circle, plus a
//!    fitted Laurent series for the backward direction.
//! 3. [`annulus`] — second mapping step: the Möbius map between the quasi
//!    half-plane and a unit annulus, composition of both steps, and the
//!    geomaterial simulation that snaps the quasi annulus to an exact one.
//! 4. [`series`] — kernel coefficients of the homogeneous Riemann–Hilbert
//!    problem on the annulus, sampled ring expansions, and the cavity-side
//!    right-hand-side coefficients.
//! 5. [`solver`] — the truncated linear systems and the iteration that yields
//!    the complex-potential coefficients.
//! 6. [`field`] — reconstruction of curvilinear/rectangular stresses and
//!    displacements, with optional Lanczos filtering of the truncated series.
//! 7. [`pipeline`] — one-call case driver plus boundary-residual metrics and
//!    convergence sweeps.
//!
//! Units are meters, kPa and kN/m throughout; the unit weight gradient is in
//! kPa per meter of depth. All geomaterial points have `Im z <= 0`.
//!
//! Every constructed object is immutable and safe to evaluate from multiple
//! threads; construction itself is single-threaded.
//!
//! See the crate examples for runnable studies (mapping diagnostics, a full
//! solve, Lanczos comparison, convergence sweeps, an axisymmetric
//! cross-check) and `src/main.rs` for the batch CLI.

// Validations use negated float comparisons (`!(x > 0.0)`) so NaN inputs
// fail closed; the positive form would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus;
pub mod config;
pub mod csm;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod solver;

pub use annulus::{compose, CompositeMap, MapOptions, VerruijtMap};
pub use field::{lanczos_weights, FieldSample, LanczosWeights};
pub use geometry::{CavitySpec, MaterialParams, PlaneMode, StressTriple};
pub use pipeline::CaseSolution;
pub use series::{AnnulusCoeffs, CavityRhs, RingExpansion, SeriesCoeffs};
pub use solver::{SolverConfig, SolverState};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("singular linear system in {context} (condition estimate {condition:.3e})")]
    SingularSystem {
        context: &'static str,
        condition: f64,
    },
    #[error("conformal map degenerate: {0}")]
    DegenerateMap(String),
    #[error("solver diverged after {iterations} reps (residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },
    #[error("invalid configuration: field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
