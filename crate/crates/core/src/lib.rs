//! Word embeddings composed from explicit linguistic properties (surface
//! form, lemma, morphological tag) or character n-grams, trained with
//! skip-gram negative sampling, plus semantic and morphological evaluation.

pub mod corpus;
pub mod embeddings;
pub mod error;
mod fsutil;
pub mod query;

pub use corpus::{MorphTag, Sentence, Token, Vocabulary};
pub use embeddings::{AnalysisChoice, Composition, Model, PropertyConfig, PropertySet};
pub use error::{Error, Result};
pub use fsutil::{commit_all, PendingFile};
pub use query::{cosine, NeighborList, WordVectors};
pub mod trainer;

pub use trainer::{train, train_sentences, TrainConfig, TrainStats};
pub mod eval;
pub mod synth;
