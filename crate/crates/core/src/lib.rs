//! Computational tools for badly approximable subspaces.

pub mod constructions;
pub mod cover;
pub mod engine;
pub mod exponent;
pub mod geometry;
mod numeric;
pub mod parallel;
mod sieve;

pub use cover::{CoverError, CoverParams, CoverProfile, DecayFunction};
pub use constructions::{BKind, ExperimentScenario};
pub use engine::{Approximation, Engine, EngineError, NormConvention, Record, RecordTable, Subject};
pub use exponent::{ExponentEstimate, Method};
pub use geometry::{GeometryError, Subspace, ThetaMatrix};
pub use numeric::CompensatedSum;
pub use parallel::Execution;
