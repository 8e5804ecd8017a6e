use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: `{field}` {reason}")]
    Config { field: &'static str, reason: String },

    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("election requires at least one alive node")]
    EmptyNetwork,

    #[error("{0:?} is a mobile strategy and has no static position")]
    NotStatic(crate::positioning::StrategyKind),

    #[error("run was truncated before milestone {milestone} was reached")]
    Truncated { milestone: usize },

    #[error("improvement undefined: baseline reached every milestone at round 0")]
    UndefinedRatio,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config_err(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Config {
        field,
        reason: reason.into(),
    }
}

pub(crate) fn domain_err(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
