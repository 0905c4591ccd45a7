use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which side of a machine an alphabet check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::Input => f.write_str("input"),
            Side::Output => f.write_str("output"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no initial state")]
    NoInitialState,

    #[error("line {line}: unknown symbol `{name}`")]
    UnknownSymbol { line: usize, name: String },

    #[error("line {line}: state {state} declared final twice")]
    DuplicateFinal { line: usize, state: usize },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid machine: {0}")]
    InvalidFst(String),

    #[error("not an automaton: transition {src} -> {dst} carries {ilabel}|{olabel}")]
    NotAnAutomaton {
        src: usize,
        dst: usize,
        ilabel: String,
        olabel: String,
    },

    #[error("desired language is not prefix-closed: word `{0}` is a prefix of an accepted word but is rejected")]
    NotPrefixClosed(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
