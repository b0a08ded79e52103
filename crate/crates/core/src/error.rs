use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian (residual {residual:.3e} exceeds {bound:.3e})")]
    NonHermitian { residual: f64, bound: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("map is not completely positive (min Choi eigenvalue {min_eig:.3e})")]
    NotCP { min_eig: f64 },

    #[error("map is not unital (residual {0:.3e})")]
    NotUnital(f64),

    #[error("operator is not in the algebra (off-block residual {0:.3e})")]
    NotInAlgebra(f64),

    #[error("multiplier is not of positive type")]
    NotPositiveType,

    #[error("operator is not in the crossed product: {0}")]
    NotInCrossedProduct(String),

    #[error("group element {0} out of range")]
    BadElement(usize),

    #[error("system mismatch: {0}")]
    SystemMismatch(String),

    #[error("certification routes disagree: {0}")]
    RoutesDisagree(String),

    #[error("Schur multiplier does not leave the crossed product invariant (residual {0:.3e})")]
    NotInvariant(f64),

    #[error("subset of the group is empty")]
    EmptySet,

    #[error("element is not central: {0}")]
    NotCentral(String),

    #[error("element is not positive: {0}")]
    NotPositive(String),

    #[error("no tracial state attached to the system")]
    NoTrace,

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("invalid dynamical system: {}", .0.join("; "))]
    InvalidSystem(Vec<String>),
}

impl Error {
    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NonSquare",
            Error::NonHermitian { .. } => "NonHermitian",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::AlgebraMismatch(_) => "AlgebraMismatch",
            Error::NotCP { .. } => "NotCP",
            Error::NotUnital(_) => "NotUnital",
            Error::NotInAlgebra(_) => "NotInAlgebra",
            Error::NotPositiveType => "NotPositiveType",
            Error::NotInCrossedProduct(_) => "NotInCrossedProduct",
            Error::BadElement(_) => "BadElement",
            Error::SystemMismatch(_) => "SystemMismatch",
            Error::RoutesDisagree(_) => "RoutesDisagree",
            Error::NotInvariant(_) => "NotInvariant",
            Error::EmptySet => "EmptySet",
            Error::NotCentral(_) => "NotCentral",
            Error::NotPositive(_) => "NotPositive",
            Error::NoTrace => "NoTrace",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::Invalid(_) => "Invalid",
            Error::InvalidSystem(_) => "InvalidSystem",
        }
    }
}
