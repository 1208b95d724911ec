use thiserror::Error;

/// Errors raised by the discovery pipeline and its supporting modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied parameter is out of range or inconsistent with the data.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data is malformed (unequal lengths, non-finite values, bad CSV rows...).
    #[error("data error: {0}")]
    Data(String),

    /// A statistic is undefined for the given input, e.g. a zero-variance series.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The conditioning series is (numerically) collinear with one of the correlated series.
    #[error("singular conditioning: {0}")]
    SingularConditioning(String),

    /// The simulator could not find a bounded trajectory.
    #[error("generation failed for preset `{preset}` after {attempts} attempts")]
    Generation { preset: String, attempts: usize },

    /// Simple-path enumeration exceeded its cap.
    #[error("path enumeration exceeded the cap of {0} paths")]
    PathLimit(usize),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// True for errors caused by numerically degenerate inputs rather than bad parameters or data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Degenerate(_) | Error::SingularConditioning(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
