use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("deformation matrix is not skew-symmetric: {0}")]
    NotSkew(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element is not self-adjoint (defect {0:e})")]
    NotSelfAdjoint(f64),
    #[error("support overflow: {0}")]
    SupportOverflow(String),
    #[error("value not representable in exact mode: {0}")]
    NotRepresentable(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid contraction: {0}")]
    InvalidContraction(String),
    #[error("no rule for {op} applied to {atom}")]
    RuleMissing { op: &'static str, atom: String },
    #[error("non-real coefficient after averaging: {0}")]
    NonRealCoefficient(String),
    #[error("incomplete substitution table: {0}")]
    IncompleteSubstitution(String),
    #[error("homogeneity violation: {0}")]
    Homogeneity(String),

    #[error("unsupported term signature: {0}")]
    UnsupportedSignature(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("k-power check failed: {0}")]
    KPower(String),
    #[error("factor outside the supported set: {0}")]
    Factor(String),
    #[error("series division failed: {0}")]
    Series(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    /// Pipeline stage the error belongs to, used for CLI diagnostics.
    pub fn stage(&self) -> &'static str {
        use Error::*;
        match self {
            NotSkew(_) | DimensionMismatch(_) | NotSelfAdjoint(_) | SupportOverflow(_)
            | NotRepresentable(_) => "theta_algebra",
            Parse(_) | Usage(_) => "input",
            InvalidContraction(_) | RuleMissing { .. } | Homogeneity(_) => "symbol_engine",
            NonRealCoefficient(_) | IncompleteSubstitution(_) => "cosphere_integrator",
            UnsupportedSignature(_) | Divergent(_) | KPower(_) | Factor(_) | Series(_) => {
                "modular_function_engine"
            }
            Precondition(_) | Quadrature(_) => "numeric_oracle",
        }
    }
}
