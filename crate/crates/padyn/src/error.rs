use crate::field::Val;

/// Errors surfaced by the library.
///
/// Mathematical failure modes (obstructions, exhausted precision,
/// non-decomposable reductions) are distinct variants so that callers can
/// map them to exit codes without string matching.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("operands belong to different field specs")]
    SpecMismatch,
    #[error("element is not a unit (valuation {0})")]
    NotAUnit(Val),
    #[error("element is not a uniformizer (valuation {0})")]
    NotAUniformizer(Val),
    #[error("series is not invertible: linear coefficient is not a unit")]
    NotInvertible,
    #[error("all coefficients lie below the working precision")]
    AllCoefficientsBelowPrecision,
    #[error("series does not satisfy the Lubin-Tate congruences: {0}")]
    NotLubinTate(String),
    #[error("linear solve singular at degree {degree}: denominator exhausts precision")]
    SingularStep { degree: usize },
    #[error("no solution: obstruction at degree {degree} has valuation {found} < {required}")]
    NoSolution {
        degree: usize,
        found: i64,
        required: i64,
    },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("series do not commute: first offending coefficient index {index}")]
    DoesNotCommute { index: usize },
    #[error("pair has the wrong shape: {0}")]
    WrongShape(String),
    #[error("reduction does not decompose: {0}")]
    NonDecomposable(String),
    #[error("no commutant at this precision: obstruction at degree {degree}")]
    NoCommutantAtPrecision { degree: usize },
    #[error("normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("newton polygon is precision-limited: {0}")]
    PolygonAmbiguous(String),
    #[error("defining relation degenerate: {0}")]
    RelationDegenerate(String),
    #[error("irreducibility certificate missing at level {level}")]
    CertificateMissing { level: usize },
    #[error("element does not belong to this quotient tower")]
    TowerMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
