use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap};

use crate::corpus::token::{MorphTag, Sentence};
use crate::error::{Error, Result};

/// The three explicit linguistic properties a word vector can be built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertyKind {
    Surface,
    Lemma,
    Tag,
}

impl PropertyKind {
    pub fn prefix(self) -> &'static str {
        match self {
            PropertyKind::Surface => "W:",
            PropertyKind::Lemma => "L:",
            PropertyKind::Tag => "M:",
        }
    }

    /// Namespaced key, so that a surface and an identical lemma map to
    /// different rows.
    pub fn key(self, value: &str) -> String {
        let mut key = String::with_capacity(value.len() + 2);
        key.push_str(self.prefix());
        key.push_str(value);
        key
    }
}

/// One (lemma, tag) reading of a surface form, with its corpus count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub lemma: String,
    pub tag: MorphTag,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordEntry {
    pub surface: String,
    pub count: u64,
    /// Sorted by (lemma, tag); never empty.
    pub analyses: Vec<Analysis>,
}

impl WordEntry {
    /// The most frequent analysis; ties go to the smallest (lemma, tag).
    pub fn primary_analysis(&self) -> &Analysis {
        // analyses are sorted, so max_by_key on reversed order keeps the first maximum
        self.analyses
            .iter()
            .rev()
            .max_by_key(|a| a.count)
            .expect("word entry without analyses")
    }
}

/// Word and property tables built from a tagged corpus.
///
/// Word ids are assigned in descending count order with lexicographic
/// tie-breaking. Property ids are assigned in first-registration order while
/// walking the words by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<WordEntry>,
    word_index: HashMap<String, usize>,
    properties: Vec<String>,
    property_index: HashMap<String, usize>,
    total_tokens: u64,
    min_count: u64,
}

type AnalysisCounts = HashMap<(String, MorphTag), u64>;

impl Vocabulary {
    /// Counts every surface occurrence, drops surfaces seen fewer than
    /// `min_count` times and registers W/L/M property keys for the rest.
    pub fn build<I, S>(corpus: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Borrow<Sentence>,
    {
        if min_count == 0 {
            return Err(Error::Config("min_count must be at least 1".into()));
        }

        // surface -> (count, (lemma, tag) -> count)
        let mut counts: HashMap<String, (u64, AnalysisCounts)> = HashMap::new();
        let mut n_sentences = 0usize;
        for sentence in corpus {
            n_sentences += 1;
            for token in &sentence.borrow().tokens {
                let entry = match counts.get_mut(token.surface.as_str()) {
                    Some(entry) => entry,
                    None => counts.entry(token.surface.clone()).or_default(),
                };
                entry.0 += 1;
                *entry.1.entry((token.lemma.clone(), token.tag.clone())).or_insert(0) += 1;
            }
        }
        if n_sentences == 0 {
            return Err(Error::EmptyCorpus);
        }

        let words: Vec<WordEntry> = counts
            .into_iter()
            .filter(|(_, (count, _))| *count >= min_count)
            .map(|(surface, (count, analyses))| {
                let analyses: BTreeMap<_, _> = analyses.into_iter().collect();
                WordEntry {
                    surface,
                    count,
                    analyses: analyses
                        .into_iter()
                        .map(|((lemma, tag), count)| Analysis { lemma, tag, count })
                        .collect(),
                }
            })
            .collect();

        Self::from_words(words, min_count)
    }

    /// Assembles a vocabulary from word entries, sorting them and
    /// registering their property keys.
    pub fn from_words(mut words: Vec<WordEntry>, min_count: u64) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        for word in &mut words {
            if word.analyses.is_empty() {
                return Err(Error::NoAnalysis(word.surface.clone()));
            }
            word.analyses
                .sort_by(|a, b| (&a.lemma, &a.tag).cmp(&(&b.lemma, &b.tag)));
        }
        words.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.surface.cmp(&b.surface)));

        let mut properties = Vec::new();
        let mut property_index = HashMap::new();
        let mut register = |key: String| {
            if !property_index.contains_key(&key) {
                property_index.insert(key.clone(), properties.len());
                properties.push(key);
            }
        };
        for word in &words {
            register(PropertyKind::Surface.key(&word.surface));
            for analysis in &word.analyses {
                register(PropertyKind::Lemma.key(&analysis.lemma));
                register(PropertyKind::Tag.key(&analysis.tag.to_string()));
            }
        }

        Self::from_parts(words, properties, min_count)
    }

    /// Reassembles a vocabulary from its serialized tables, keeping ids as given.
    pub(crate) fn from_parts(words: Vec<WordEntry>, properties: Vec<String>, min_count: u64) -> Result<Self> {
        let mut word_index = HashMap::with_capacity(words.len());
        for (id, word) in words.iter().enumerate() {
            if word_index.insert(word.surface.clone(), id).is_some() {
                return Err(Error::Format(format!("duplicate word {:?}", word.surface)));
            }
        }
        let mut property_index = HashMap::with_capacity(properties.len());
        for (id, key) in properties.iter().enumerate() {
            if property_index.insert(key.clone(), id).is_some() {
                return Err(Error::Format(format!("duplicate property {key:?}")));
            }
        }
        let total_tokens = words.iter().map(|w| w.count).sum();
        Ok(Vocabulary {
            words,
            word_index,
            properties,
            property_index,
            total_tokens,
            min_count,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word_id(&self, surface: &str) -> Option<usize> {
        self.word_index.get(surface).copied()
    }

    pub fn word(&self, id: usize) -> &WordEntry {
        &self.words[id]
    }

    pub fn words(&self) -> &[WordEntry] {
        &self.words
    }

    pub fn get(&self, surface: &str) -> Option<&WordEntry> {
        self.word_id(surface).map(|id| &self.words[id])
    }

    pub fn property_id(&self, key: &str) -> Option<usize> {
        self.property_index.get(key).copied()
    }

    pub fn property(&self, kind: PropertyKind, value: &str) -> Option<usize> {
        self.property_id(&kind.key(value))
    }

    pub fn properties(&self) -> &[String] {
        &self.properties
    }

    pub fn n_properties(&self) -> usize {
        self.properties.len()
    }

    /// Sum of the counts of all retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().map(|w| w.count)
    }
}
