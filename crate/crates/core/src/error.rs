use thiserror::Error;

use crate::expr::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Whether a failure was caused by bad input or by the physics of the request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad expression, unknown scenario, invalid file.
    User,
    /// Well-formed request that has no physical answer.
    Physics,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("basis label mismatch: [{left}] vs [{right}]")]
    LabelMismatch { left: String, right: String },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("{0} is the zero vector")]
    ZeroVector(String),
    #[error("channel `{0}` is not a projector (P*P != P or P != P^dagger)")]
    NotProjector(String),
    #[error("expression `{0}` does not evaluate to a projector")]
    ExprNotProjector(String),
    #[error("evolution operator is not unitary")]
    NotUnitary,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("malformed scenario: {0}")]
    MalformedScenario(String),
    #[error("duplicate channel name `{0}`")]
    DuplicateChannel(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("collapse onto a zero-probability outcome")]
    ZeroProbability,
    #[error("postselection impossible under this measurement (ABL denominator vanishes)")]
    PostselectionImpossible,
    #[error("postselection overlap <f|U|in> vanishes; no weak value exists")]
    VanishingOverlap,
    #[error("projectors `{0}` and `{1}` are not orthogonal")]
    NonOrthogonal(String, String),
    #[error("projectors `{0}` and `{1}` do not commute")]
    NonCommuting(String, String),
    #[error("product of `{0}` and `{1}` is the zero operator")]
    ZeroProduct(String, String),
    #[error("weak-value zero pattern ({0}) contradicts linearity")]
    ImpossiblePattern(String),
    #[error("probability {0} outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange(f64),
    #[error("postselection extinguished the meter state (norm {0:e})")]
    Extinguished(f64),
    #[error("meter grid too narrow: edge density {0:e}")]
    GridTooNarrow(f64),
    #[error("invalid meter configuration: {0}")]
    InvalidMeter(String),
    #[error("invalid coupling sweep: {0}")]
    InvalidSweep(String),
    #[error("weak-limit sweep does not converge (successive differences {0:e} -> {1:e})")]
    NonConvergent(f64, f64),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ZeroProbability
            | Error::PostselectionImpossible
            | Error::VanishingOverlap
            | Error::ExprNotProjector(_)
            | Error::NonOrthogonal(..)
            | Error::NonCommuting(..)
            | Error::ZeroProduct(..)
            | Error::ImpossiblePattern(_)
            | Error::ProbabilityOutOfRange(_)
            | Error::Extinguished(_)
            | Error::NonConvergent(..) => ErrorKind::Physics,
            _ => ErrorKind::User,
        }
    }
}
