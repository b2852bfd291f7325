use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("vector is not in {0}")]
    NotInSubspace(String),

    #[error("subspace is not central")]
    NotCentral,

    #[error("subspace is not contained in the metric radical")]
    NotInRadical,

    #[error("matrix is singular")]
    Singular,

    #[error("tangent space Gram matrix is degenerate")]
    DegenerateTangent,

    #[error("ker D and ker(D^2 + Id) do not split the algebra: {0}")]
    DecompositionFailed(String),

    #[error(
        "fullness criteria disagree: [g+-, g--] = g-+ is {bracket_criterion}, [g^-, g^-] = g^+ is {eigen_criterion}"
    )]
    FullnessDisagreement {
        bracket_criterion: bool,
        eigen_criterion: bool,
    },

    #[error("normal space identity g- ∩ (g--)^⊥ = g-+ fails")]
    NormalSpaceMismatch,

    #[error("parameter is not finite: {0}")]
    NonFiniteParameter(f64),

    #[error("unknown catalog entry: {0}")]
    UnknownCatalog(String),

    #[error("precondition failed: {}", .0.join("; "))]
    Preconditions(Vec<String>),

    #[error("invalid triple: {}", .0.join("; "))]
    InvalidTriple(Vec<String>),

    #[error("induced action does not preserve {0}")]
    ActionNotDescending(String),

    #[error("{0} requires exactly computed orbit points")]
    InexactInput(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
