use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector {0} of the subspace is not contained in the larger span")]
    SubspaceNotContained(usize),
    #[error("invalid Lie algebra: {0}")]
    InvalidLieAlgebra(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
    #[error("flatness violated: d^2 != 0 starting in degree {degree}")]
    FlatnessViolated { degree: usize },
    #[error("not gauge equivalent: conjugation fails for basis vector {0}")]
    NotGaugeEquivalent(usize),
    #[error("not a cochain complex: d^2 != 0 in degree {0}")]
    NotAComplex(usize),
    #[error("short sequence not exact in degree {degree}: {reason}")]
    NotExact { degree: usize, reason: String },
    #[error("cochain lift failed in degree {0}")]
    LiftFailure(usize),
    #[error("wedge product lands in degree {degree}, above the top degree")]
    DegreeOverflow { degree: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}
