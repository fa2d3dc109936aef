use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by corpus handling, training, evaluation and model IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("no sentences")]
    EmptyCorpus,

    #[error("empty vocabulary (no word reaches min_count {min_count})")]
    EmptyVocabulary { min_count: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("row {id} out of range for matrix with {rows} rows")]
    InvalidId { id: usize, rows: usize },

    #[error("non-finite value encountered during update: {0}")]
    NonFinite(String),

    #[error("undefined cosine: zero vector")]
    ZeroVector,

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("unknown word {word:?}{}", hint_suffix(.suggestions))]
    UnknownWord { word: String, suggestions: Vec<String> },

    #[error("no analysis recorded for {0:?}")]
    NoAnalysis(String),

    #[error("no coverage: none of the {0} triples is representable")]
    NoCoverage(usize),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("not a propvec model")]
    BadMagic,

    #[error("unsupported model format version {0}")]
    Version(u32),

    #[error("checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    Checksum { stored: u32, computed: u32 },

    #[error("malformed model file: {0}")]
    Format(String),

    #[error("synthetic language: {0}")]
    Synth(String),

    #[error("worker panicked: {0}")]
    WorkerPanic(String),

    /// The message already includes the underlying error, so it is not
    /// exposed as a separate source.
    #[error("{path}: {cause}")]
    Path { path: PathBuf, cause: io::Error },

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn hint_suffix(suggestions: &[String]) -> String {
    if suggestions.is_empty() {
        String::new()
    } else {
        format!(" (did you mean: {}?)", suggestions.join(", "))
    }
}

impl Error {
    pub(crate) fn at_path(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
        let path = path.into();
        move |cause| Error::Path { path, cause }
    }
}
