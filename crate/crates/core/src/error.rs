use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin quantum number: {0}")]
    InvalidSpin(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("coefficient vector has squared norm {norm_sq}, expected 1")]
    NormalizationError { norm_sq: f64 },

    #[error("operator is not traceless (trace {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("Cartan generator {index} is not diagonal")]
    NonDiagonalCartan { index: usize },

    #[error("invalid Cartan choice: {0}")]
    InvalidCartan(String),

    #[error("root space is degenerate: {multiplicity} ladder operators share root {root:?}")]
    DegenerateRootSpace { root: Vec<f64>, multiplicity: usize },

    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),

    #[error("every subspin is zero; the structure factor is undefined")]
    AllTrivialSubspins,

    #[error("operators do not form an su(2) triple (residual {residual:.3e})")]
    NotAnSu2Triple { residual: f64 },

    #[error("expected decomposition {expected}, found {found}")]
    WrongClass { expected: String, found: String },

    #[error("invalid coherent state: {0}")]
    InvalidCoherentState(String),

    #[error("mean spin vanishes (|<O_perp>| = {perp:.3e}); squeezing parameter undefined")]
    VanishingMeanSpin { perp: f64 },

    #[error("no squeezing found (minimum xi^2 = {xi2_min} at mu = {mu_min})")]
    NoSqueezingFound { xi2_min: f64, mu_min: f64 },

    #[error("symmetric basis of size {size} exceeds the limit {limit}")]
    SizeLimit { size: f64, limit: f64 },

    #[error("operator is not diagonal in the occupation basis (off-diagonal {magnitude:.3e})")]
    NotDiagonal { magnitude: f64 },

    #[error("fit did not converge after {iterations} iterations")]
    FitDiverged { iterations: usize },

    #[error("invalid fit input: {0}")]
    InvalidFitInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
