use thiserror::Error;

/// Errors raised by the learners, the estimators and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("version space is empty")]
    EmptyVersionSpace,
    #[error("disagreement region has zero probability mass")]
    ZeroMassRegion,
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("wrong setting: {0}")]
    WrongSetting(String),
    #[error("round cap of {cap} rounds exceeded")]
    RoundCapExceeded { cap: usize },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable name used as a failure-category key in reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyVersionSpace => "empty_version_space",
            Error::ZeroMassRegion => "zero_mass_region",
            Error::Parameter(_) => "parameter",
            Error::Input(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::WrongSetting(_) => "wrong_setting",
            Error::RoundCapExceeded { .. } => "round_cap_exceeded",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    /// True for errors caused by bad parameters or inputs rather than by a
    /// run going wrong.
    pub fn is_parameter_like(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_)
                | Error::Input(_)
                | Error::Precondition(_)
                | Error::WrongSetting(_)
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
