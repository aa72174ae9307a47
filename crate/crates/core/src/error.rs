use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("variable `{0}` has no value at the evaluation point")]
    MissingValue(String),
    #[error("substitution makes a denominator identically zero")]
    PoleAtSubstitution,
    #[error("objects live on different charts (`{0}` vs `{1}`)")]
    ChartMismatch(String, String),
    #[error("interior product of a 0-form")]
    DegreeZero,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: String, found: String },
    #[error("bad dimensions: {0}")]
    BadDimensions(String),
    #[error("linear solve failed: {0}")]
    SolveFailed(String),
    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),
    #[error("observable is not allowable: the structure equation is inconsistent")]
    NotAllowable,
    #[error("structure form is degenerate (kernel dimension {kernel_dim})")]
    SingularStructure { kernel_dim: usize },
    #[error("classification only characterized for n >= 2 and k >= 2 (got n={n}, k={k})")]
    OutOfCharacterizedRegime { n: usize, k: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("frame matrix is singular")]
    SingularFrame,
    #[error("bad degree: {0}")]
    BadDegree(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
