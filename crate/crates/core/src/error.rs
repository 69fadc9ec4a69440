use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("site index {index} out of range for a chain of {n_spins} spins")]
    SiteOutOfRange { index: usize, n_spins: usize },

    #[error("configuration has {found} spins, chain has {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("periodic boundaries are only supported by the state-vector oracle")]
    PeriodicUnsupported,

    #[error("range {range} needs 2^{range} transfer states (limit is {limit})")]
    RangeTooLarge { range: usize, limit: usize },

    #[error("{n_spins} spins exceeds the cap of {cap}")]
    TooManySpins { n_spins: usize, cap: usize },

    #[error("no closed form for N = {n_spins}, r = {range}")]
    NoClosedForm { n_spins: usize, range: usize },

    #[error("correlator value {0} outside [0, 1/4]")]
    CorrelatorOutOfBounds(f64),

    #[error("no interior maximum of Q on the grid")]
    NoInteriorMaximum,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("{0} requires an even number of spins")]
    OddSpinCount(&'static str),

    #[error("{0} requires range >= 2")]
    RangeTooSmall(&'static str),

    #[error("snapshot count must be positive")]
    NoSnapshots,

    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
