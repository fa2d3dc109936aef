//! Tagged-corpus parsing, vocabularies and sampling distributions.

mod ngrams;
mod sampling;
mod token;
mod vocab;

use smallvec::SmallVec;

pub use ngrams::{fnv1a32, ngram_strings, ngrams};
pub use sampling::{keep_probability, SamplingDist};
pub use token::{parse_corpus, parse_line, MorphTag, Sentence, SentenceReader, Token};
pub use vocab::{Analysis, PropertyKind, Vocabulary, WordEntry};

use crate::embeddings::PropertyConfig;

/// Property (or n-gram bucket) ids of a word.
pub type PropertyIds = SmallVec<[usize; 8]>;

/// Ids of the configured properties of `token` that are known to `vocab`,
/// sorted and deduplicated. In n-gram mode these are the surface's bucket
/// ids, which are always available.
pub fn extract_properties(token: &Token, config: &PropertyConfig, vocab: &Vocabulary) -> PropertyIds {
    let mut ids = PropertyIds::new();
    match config {
        PropertyConfig::Properties(set) => {
            for kind in set.kinds() {
                let found = match kind {
                    PropertyKind::Surface => vocab.property(kind, &token.surface),
                    PropertyKind::Lemma => vocab.property(kind, &token.lemma),
                    PropertyKind::Tag => vocab.property(kind, &token.tag.to_string()),
                };
                if let Some(id) = found {
                    ids.push(id);
                }
            }
        }
        PropertyConfig::NGrams { minn, maxn, buckets } => {
            // surfaces are non-empty and the config is validated, so this cannot fail
            ids.extend(ngrams(&token.surface, *minn, *maxn, *buckets).unwrap_or_default());
        }
    }
    ids.sort_unstable();
    ids.dedup();
    ids
}
