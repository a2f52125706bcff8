use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("cycle graph needs at least 3 vertices, got {0}")]
    CycleTooSmall(usize),
    #[error("state {state} out of range for automaton with {states} states")]
    StateOutOfRange { state: usize, states: usize },
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("codewords must have equal length ({expected} vs {found})")]
    UnequalLengths { expected: usize, found: usize },
    #[error("duplicate codeword {0:?}")]
    DuplicateCodeword(Vec<usize>),
    #[error("codeword list is empty")]
    NoCodewords,
    #[error("codewords {0:?} and {1:?} are confusable")]
    ConfusableCodewords(Vec<usize>, Vec<usize>),
    #[error("automaton is not in simplified form: {0}")]
    NotSimplified(String),
    #[error("automaton recognizes a language of zero growth")]
    ZeroGrowth,
    #[error("automaton is not reversible")]
    NotReversible,
    #[error("alphabet size {alphabet} does not match graph on {graph} vertices")]
    AlphabetMismatch { alphabet: usize, graph: usize },
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("enumeration of {0} strings exceeds the budget")]
    BudgetExceeded(u128),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
