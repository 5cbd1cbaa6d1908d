use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:.3e} below tolerance {tolerance:.3e}")]
    SingularMatrix { pivot: f64, tolerance: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("matrix exponential overflow (norm of tA = {0:.3e})")]
    Overflow(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("t = {t} lies within {distance:.1e} of the imaginary-axis spectrum")]
    SpectrumHit { t: f64, distance: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("decay hypothesis violated: fitted theta = {theta:.4} <= 1/2")]
    DecayViolation { theta: f64 },

    #[error("separation error: {0}")]
    Separation(String),

    #[error("|t| = {0:.3e} is too close to the origin")]
    NearZero(f64),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("too few samples: {got} < {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("window h = {h} exceeds sampled span {span}")]
    WindowTooWide { h: f64, span: f64 },

    #[error("insufficient span: {0}")]
    InsufficientSpan(String),

    #[error("resonance: i*{frequency} lies within {distance:.2e} of the spectrum of A")]
    Resonance { frequency: f64, distance: f64 },

    #[error("semigroup not available for resolvent-oracle generators")]
    OracleUnavailable,

    #[error("non-resonance violated: input frequency {frequency} within {distance:.2e} of K")]
    NonResonanceViolation { frequency: f64, distance: f64 },

    #[error("precondition evidence failure: {0}")]
    PreconditionEvidenceFailure(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NoConvergence(_) => "NoConvergence",
            Error::Overflow(_) => "Overflow",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::SpectrumHit { .. } => "SpectrumHit",
            Error::Domain(_) => "DomainError",
            Error::DecayViolation { .. } => "DecayViolation",
            Error::Separation(_) => "SeparationError",
            Error::NearZero(_) => "NearZero",
            Error::Grid(_) => "GridError",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::WindowTooWide { .. } => "WindowTooWide",
            Error::InsufficientSpan(_) => "InsufficientSpan",
            Error::Resonance { .. } => "ResonanceError",
            Error::OracleUnavailable => "OracleUnavailable",
            Error::NonResonanceViolation { .. } => "NonResonanceViolation",
            Error::PreconditionEvidenceFailure(_) => "PreconditionEvidenceFailure",
            Error::Invalid(_) => "InvalidInput",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }
}
