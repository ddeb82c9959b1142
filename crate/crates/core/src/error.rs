use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("singular matrix (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("sequence is not a frame (lower bound {lower:e}, upper bound {upper:e})")]
    NotAFrame { lower: f64, upper: f64 },

    #[error("sequences are not dual (residual {residual:e})")]
    NotADual { residual: f64 },

    #[error("sequence is not a Riesz basis")]
    NotRiesz,

    #[error("symbol is not semi-normalized (inf/sup = {ratio:e})")]
    NotSemiNormalized { ratio: f64 },

    #[error("operator is not invertible (min/max singular value = {ratio:e})")]
    NotInvertible { ratio: f64 },

    #[error("no factorization strategy applies to this multiplier")]
    NoFactorizationStrategy,

    #[error("symbol is not constant")]
    NonConstantSymbol,

    #[error("symbol is zero")]
    ZeroSymbol,

    #[error("operator does not commute with the time-frequency shifts (residual {residual:e})")]
    DoesNotCommute { residual: f64 },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
}

impl Error {
    /// True for failures of a mathematical property of valid input, as opposed
    /// to malformed input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix { .. }
                | Error::NotAFrame { .. }
                | Error::NotADual { .. }
                | Error::NotRiesz
                | Error::NotSemiNormalized { .. }
                | Error::NotInvertible { .. }
                | Error::NoFactorizationStrategy
                | Error::NonConstantSymbol
                | Error::ZeroSymbol
                | Error::DoesNotCommute { .. }
        )
    }
}
