use thiserror::Error;

/// Errors produced by model construction and numerical routines.
///
/// Variants are split between configuration problems (bad lattice sizes,
/// malformed stencil configs) and numerical failures (singular retained
/// spectrum, degenerate marginals). The CLI maps the former to exit code 2
/// and the latter to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("node coordinates ({d}, {s}) out of range for {n1}x{n2} lattice")]
    IndexOutOfRange { d: usize, s: usize, n1: usize, n2: usize },

    #[error("increment set is empty")]
    EmptyIncrementSet,

    #[error("increment row {row} has fewer than 2 nonzero coefficients")]
    DegenerateIncrement { row: usize },

    #[error("increment row {row} references node {index}, outside dimension {dim}")]
    IncrementOutOfRange { row: usize, index: usize, dim: usize },

    #[error("invalid stencil config: {0}")]
    InvalidStencil(String),

    #[error(
        "matrix dimension {dim} exceeds the decomposition cap {cap}; \
         pass the long-running flag to lift it"
    )]
    DimensionOverCap { dim: usize, cap: usize },

    #[error("null_dim {null_dim} out of range for dimension {dim}")]
    NullDimOutOfRange { null_dim: usize, dim: usize },

    #[error("retained eigenvalue {index} is not positive ({value:.3e}); the spectrum is singular beyond null_dim")]
    SingularRetained { index: usize, value: f64 },

    #[error("variance entry {index} is negative beyond tolerance ({value:.3e})")]
    NegativeVariance { index: usize, value: f64 },

    #[error("marginal standard deviation {index} is zero; degenerate marginal")]
    DegenerateMarginal { index: usize },

    #[error("nonpositive input: {0}")]
    NonPositive(String),

    #[error("upper-limit formula undefined for this (alpha, mu): quantile {quantile:.6} is not positive")]
    NonPositiveQuantile { quantile: f64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("subdivision law undefined for model class {0}")]
    UnknownSubdivisionClass(String),

    #[error("sample count {0} too small: {1}")]
    SampleCountTooSmall(usize, String),

    #[error("oracle dimension {dim} exceeds the oracle cap {cap}")]
    OracleOverCap { dim: usize, cap: usize },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by invalid configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidLattice(_)
                | Error::IndexOutOfRange { .. }
                | Error::EmptyIncrementSet
                | Error::DegenerateIncrement { .. }
                | Error::IncrementOutOfRange { .. }
                | Error::InvalidStencil(_)
                | Error::DimensionOverCap { .. }
                | Error::NullDimOutOfRange { .. }
                | Error::EmptyInput(_)
                | Error::UnknownSubdivisionClass(_)
                | Error::OracleOverCap { .. }
        )
    }
}
