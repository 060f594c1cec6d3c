use thiserror::Error;

use crate::lattice::PrimitiveDirection;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice basis has non-positive determinant {det}")]
    NonPositiveDeterminant { det: f64 },

    #[error("zero lattice vector has no primitive decomposition")]
    ZeroVector,

    #[error("coefficient {value} at ({p}, {q}) differs from {mirror} at the opposite index")]
    SymmetryViolation {
        p: i32,
        q: i32,
        value: f64,
        mirror: f64,
    },

    #[error("mean magnetic field b0 is zero")]
    ZeroMeanField,

    #[error("potential has nonzero mean {mean}")]
    NonzeroMeanPotential { mean: f64 },

    #[error("change of variables along {dir} is not monotone (min derivative {min_derivative})")]
    NonMonotone {
        dir: PrimitiveDirection,
        min_derivative: f64,
    },

    #[error("cos(k a0.d0) at {dir}, k = {k} is {cosine}, not above the floor {floor}")]
    IllConditioned {
        dir: PrimitiveDirection,
        k: u32,
        cosine: f64,
        floor: f64,
    },

    #[error("no invariants for {dir}, k = {k}")]
    MissingEntry { dir: PrimitiveDirection, k: u32 },

    #[error("directions missing from the table: {missing:?}")]
    IncompleteCoverage { missing: Vec<PrimitiveDirection> },

    #[error("genericity condition fails: {reason}")]
    GenericityFailure { reason: String },

    #[error("recovered cosine {value} for {dir} lies outside [-1, 1] beyond the clamp tolerance")]
    ClampViolation { dir: PrimitiveDirection, value: f64 },

    #[error("flux over the cell is {flux}, expected 2*pi")]
    FluxNotQuantized { flux: f64 },

    #[error("eigensolver did not converge: {reason}")]
    ConvergenceFailure { reason: String },

    #[error("amplitude sum at {dir}, k = {k} depends on a0 beyond cos(k a0.d0) (defect {defect})")]
    AmplitudeAsymmetry {
        dir: PrimitiveDirection,
        k: u32,
        defect: f64,
    },

    #[error("hypothesis violated: {reason}")]
    HypothesisViolation { reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
