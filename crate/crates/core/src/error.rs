use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} is outside the valid domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A domain violation inside a sequence, tagged with its position.
    #[error("element {index}: {source}")]
    AtIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("bet has no positive edge, so growth has no root above the Kelly fraction")]
    NoPositiveRoot,

    #[error("loss threshold {0} must be positive; the constraint is infeasible by construction")]
    InfeasibleThreshold(f64),

    #[error("Monte Carlo budget too small: {got} paths, need at least {min}")]
    BudgetTooSmall { got: usize, min: usize },

    #[error("no periods match the {0} filter")]
    EmptySelection(&'static str),

    #[error("supply of {supply} shares cannot clear against {buyers} buyers")]
    NoClear { supply: usize, buyers: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}
