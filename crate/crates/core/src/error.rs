use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Error)]
pub enum HyplabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("carrier error: {0}")]
    Carrier(String),
    #[error("axiom violation: {0}")]
    Axiom(String),
    #[error("element {0} not generated within {1} convolution steps")]
    NotGenerated(String, usize),
    #[error("hypergroup has no generator set")]
    NoGenerator,
    #[error("group validation failed: {0}")]
    GroupValidation(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("not a conjugacy-class hypergroup")]
    NotAConjHypergroup,
    #[error("not a group weight: {0}")]
    GroupWeight(String),
    #[error("wrong carrier: {0}")]
    WrongCarrier(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("unbounded fiber: {0}")]
    UnboundedFiber(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("no decomposition: {0}")]
    NoDecomposition(String),
    #[error("route unavailable: {0}")]
    RouteUnavailable(String),
    #[error("missing constant: {0}")]
    MissingConstant(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HyplabError {
    /// Stable machine-readable kind used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            HyplabError::Domain(_) => "DomainError",
            HyplabError::Carrier(_) => "CarrierError",
            HyplabError::Axiom(_) => "AxiomError",
            HyplabError::NotGenerated(..) => "NotGeneratedError",
            HyplabError::NoGenerator => "NoGeneratorError",
            HyplabError::GroupValidation(_) => "GroupValidationError",
            HyplabError::InvalidParam(_) => "InvalidParam",
            HyplabError::NotAConjHypergroup => "NotAConjHypergroupError",
            HyplabError::GroupWeight(_) => "GroupWeightError",
            HyplabError::WrongCarrier(_) => "WrongCarrierError",
            HyplabError::Normalization(_) => "NormalizationError",
            HyplabError::UnboundedFiber(_) => "UnboundedFiberError",
            HyplabError::LengthMismatch(_) => "LengthMismatchError",
            HyplabError::NoDecomposition(_) => "NoDecompositionError",
            HyplabError::RouteUnavailable(_) => "RouteUnavailableError",
            HyplabError::MissingConstant(_) => "MissingConstantError",
            HyplabError::Config(_) => "ConfigError",
            HyplabError::Io(_) => "IoError",
            HyplabError::Json(_) => "JsonError",
        }
    }
}

pub type Result<T> = std::result::Result<T, HyplabError>;
