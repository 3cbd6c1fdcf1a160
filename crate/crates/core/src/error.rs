use thiserror::Error;

/// Every failure the library can report.
///
/// Variants map one-to-one onto the precondition classes checked by the
/// individual modules; [`Error::exit_code`] gives the process status the
/// command-line front end uses for each class.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("system is not of disjoint type (central interval is empty)")]
    NotDisjointType,

    #[error("no root bracketed on [{lo}, {hi}]")]
    NoRootBracketed { lo: f64, hi: f64 },

    #[error("invalid regime: {0}")]
    InvalidRegime(String),

    #[error("t = {t} is outside the pressure domain (t must exceed t0 = {t0})")]
    OutsideDomain { t: f64, t0: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),

    #[error("insufficient mass: {0}")]
    InsufficientMass(String),

    #[error("mismatched resonance: ({0}:{1}) vs ({2}:{3})")]
    MismatchedResonance(u32, u32, u32, u32),

    #[error("iteration did not converge; last distance {last_distance:e}")]
    Nonconvergence { last_distance: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParameterOutOfRange(_) => "ParameterOutOfRange",
            Error::Domain(_) => "DomainError",
            Error::NotDisjointType => "NotDisjointType",
            Error::NoRootBracketed { .. } => "NoRootBracketed",
            Error::InvalidRegime(_) => "InvalidRegime",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::InsufficientData(_) => "InsufficientData",
            Error::InsufficientDepth(_) => "InsufficientDepth",
            Error::InsufficientMass(_) => "InsufficientMass",
            Error::MismatchedResonance(..) => "MismatchedResonance",
            Error::Nonconvergence { .. } => "NonconvergenceWarning",
            Error::Config(_) => "ConfigError",
            Error::Io(_) => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Nonconvergence { .. } => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(msg: impl Into<String>) -> Error {
    Error::ParameterOutOfRange(msg.into())
}
