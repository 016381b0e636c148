use thiserror::Error;

/// Errors raised by vocabulary construction, rule evaluation and input parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid endpoints: {0}")]
    InvalidEndpoints(String),

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid position vector: {0}")]
    InvalidPositions(String),

    #[error("no symmetric median positions for n = {n} agents and m = {m} endpoints (m odd requires n odd)")]
    ParityViolation { n: usize, m: usize },

    #[error("the multiset rule needs an odd number of agents, got {0}")]
    EvenAgentCount(usize),

    #[error("invalid phantom matrix: {0}")]
    InvalidPhantoms(String),

    #[error("unknown fixture rule `{0}`")]
    UnknownFixture(String),

    #[error("rule not applicable: {0}")]
    RuleNotApplicable(String),

    #[error("inconsistent labels: {0}")]
    InconsistentLabels(String),

    #[error("malformed gaps: {0}")]
    MalformedGaps(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
