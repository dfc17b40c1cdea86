use crate::fstlib::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}, line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },
    #[error("duplicate piece {0:?}")]
    DuplicatePiece(String),
    #[error("piece {piece:?} has positive log-probability {logprob}")]
    PositiveLogprob { piece: String, logprob: f64 },
    #[error("cannot segment {0:?} with the vocabulary")]
    Unsegmentable(String),
    #[error("word {0:?} contains the word-boundary marker")]
    MarkerInWord(String),
    #[error("word {index}: {source}")]
    Word {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid fst: {0}")]
    InvalidFst(String),
    #[error("negative-weight epsilon cycle")]
    NegativeEpsilonCycle,
    #[error("epsilon-input arc with non-epsilon output at state {0}")]
    EpsilonOutput(usize),
    #[error("fst is not deterministic at state {0}")]
    NonDeterministic(usize),
    #[error("determinization exceeded {0} states")]
    DeterminizeLimit(usize),

    #[error("pattern corpus is empty")]
    EmptyCorpus,
    #[error("contact list is empty")]
    EmptyContactList,
    #[error("reserved symbol {0} cannot be used as input")]
    ReservedSymbol(Label),
    #[error("graph has no start state")]
    EmptyGraph,

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("scorer has no entry for frame {frame} with history {history:?}")]
    ScorerDomain { frame: usize, history: Vec<u32> },
    #[error("entity pool has {available} names, at least {needed} needed")]
    InsufficientPool { needed: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(what: &'static str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            what,
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn shape(expected: impl ToString, found: impl ToString) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
