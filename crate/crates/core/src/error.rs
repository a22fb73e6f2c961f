use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration ran out of budget before reaching tolerance.
    #[error("budget exhausted in {what}: limit {limit} reached (last bound {last_bound:e})")]
    Budget {
        what: &'static str,
        limit: usize,
        last_bound: f64,
    },

    /// The margin function does not change sign on the search interval.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// Two routes to the same quantity disagreed beyond the allowed gap.
    #[error("route mismatch for {what}: {lhs} vs {rhs} (|diff| = {diff:e})")]
    RouteMismatch {
        what: &'static str,
        lhs: f64,
        rhs: f64,
        diff: f64,
    },

    /// Error attached to one row of a parameter grid.
    #[error("row {row} ({label}): {source}")]
    Row {
        row: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by exhausting a numeric budget.
    pub fn is_budget(&self) -> bool {
        match self {
            Error::Budget { .. } => true,
            Error::Row { source, .. } => source.is_budget(),
            _ => false,
        }
    }
}
