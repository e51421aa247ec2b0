use thiserror::Error;

/// Errors surfaced by graph construction and the analysis operations.
#[derive(Debug, Error)]
pub enum HeatLabError {
    #[error("invalid vertex `{label}`: {reason}")]
    InvalidVertex { label: String, reason: String },

    #[error("vertex budget exceeded: needed more than {budget} vertices during {context}")]
    BudgetExceeded { budget: usize, context: String },

    #[error("format error at line {line}: {reason}")]
    FormatError { line: usize, reason: String },

    #[error("graph is disconnected ({components} components)")]
    DisconnectedError { components: usize },

    #[error("invalid generator spec: {0}")]
    SpecError(String),

    #[error("numerical error: {0}")]
    NumericalError(String),

    #[error("set has zero mass under the given measure")]
    ZeroMassError,

    #[error("support size {support} exceeds exhaustive search cap {cap}")]
    SearchCapExceeded { support: usize, cap: usize },

    #[error("no nonempty candidate set with mass at most 1/2 exists")]
    NoFeasibleSet,

    #[error("guard region too small: component {component} needed for the witness is not confirmed finite")]
    GuardTooSmall { component: String },

    #[error("degenerate partition: {0}")]
    DegeneratePartition(String),

    #[error("operation unsupported on this graph: {0}")]
    UnsupportedGraph(String),

    #[error("config error at `{field}`: {reason}")]
    ConfigError { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HeatLabError>;

impl HeatLabError {
    pub fn invalid_vertex(label: impl Into<String>, reason: impl Into<String>) -> Self {
        HeatLabError::InvalidVertex {
            label: label.into(),
            reason: reason.into(),
        }
    }
}
