//! Numerical laboratory for a family of disk diffeomorphisms built from a
//! homoclinic loop: the base map (time-1 flow of an explicit vector field),
//! wiggle perturbations that create horseshoes, tangent-cocycle machinery for
//! Lyapunov exponents, separated-set entropy estimates, horseshoe
//! certificates, and a family of patched bi-Lipschitz models.
//!
//! The crate is pure computation: all operations are deterministic functions
//! of their inputs plus explicit seeds. Orchestration, configuration and file
//! output live in the companion CLI crate.

pub mod analysis;
pub mod entropy;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod lipschitz;
pub mod params;
pub mod perturbation;
pub mod sampling;
pub mod smooth;

pub use geometry::{DiskPoint, Mat2, Vec2};
pub use params::Params;

/// Errors surfaced by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("schedule rejected at n = {n}: {reason}")]
    ScheduleRejected { n: u32, reason: String },
    #[error("point ({0}, {1}) outside the disk")]
    OutOfDomain(f64, f64),
    #[error("integrator step size underflow")]
    StepUnderflow,
    #[error("iteration budget {0} exhausted")]
    IterationBudget(u32),
    #[error("tangent vector degenerated to zero norm")]
    DegenerateTangent,
    #[error("sample set exhausted: separated count saturated at {0}")]
    Saturated(usize),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
