use thiserror::Error;

/// Ill-formed terms rejected at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("variable {0} occurs more than once in a pattern")]
    NonLinearPattern(String),
    #[error("receive needs at least one clause")]
    EmptyReceive,
}

/// Failure to read concrete syntax.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unbound {name}")]
    Unbound { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {source}")]
    Term {
        line: usize,
        col: usize,
        source: SyntaxError,
    },
    #[error("not a value: {0}")]
    NotAValue(String),
}

/// Problems in a node configuration document.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("process {pid}: {source}")]
    Parse { pid: u64, source: ParseError },
    #[error("ether entry {src}->{dst}: {source}")]
    EtherValue {
        src: u64,
        dst: u64,
        source: ParseError,
    },
    #[error("pid {0} is defined more than once")]
    DuplicatePid(u64),
    #[error("process {0} must give either `expr` or `dead`")]
    MissingBody(u64),
}
