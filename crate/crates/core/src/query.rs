//! Cosine similarity and exhaustive nearest-neighbor search over word vectors.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::open_buffered;

/// Cosine similarity, accumulated in f64.
pub fn cosine<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimMismatch(a.len(), b.len()));
    }
    let (mut ab, mut aa, mut bb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.into(), y.into());
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0))
}

/// Words with vectors of a shared dimensionality.
#[derive(Clone, Debug, PartialEq)]
pub struct WordVectors {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    data: Vec<f32>,
    norms: Vec<f64>,
}

impl WordVectors {
    pub fn from_parts(words: Vec<String>, dim: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != words.len() * dim {
            return Err(Error::DimMismatch(data.len(), words.len() * dim));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate word {w:?}")));
            }
        }
        let norms = data
            .chunks(dim.max(1))
            .take(words.len())
            .map(|v| v.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt())
            .collect();
        Ok(WordVectors {
            words,
            index,
            dim,
            data,
            norms,
        })
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        let mut words = Vec::new();
        let mut data = Vec::new();
        let mut dim = None;
        for (word, vector) in pairs {
            let d = *dim.get_or_insert(vector.len());
            if d != vector.len() {
                return Err(Error::DimMismatch(d, vector.len()));
            }
            words.push(word.into());
            data.extend(vector);
        }
        WordVectors::from_parts(words, dim.unwrap_or(0), data)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, idx: usize) -> &[f32] {
        &self.data[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index(word).map(|i| self.vector(i))
    }

    /// Reads the `<count> <dim>` header text format.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty vector file".into()))??;
        let mut parts = header.split_whitespace();
        let parse_header = |p: Option<&str>| -> Result<usize> {
            p.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad header {header:?}")))
        };
        let count = parse_header(parts.next())?;
        let dim = parse_header(parts.next())?;

        let mut words = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(' ');
            let word = fields.next().unwrap_or_default();
            let before = data.len();
            for f in fields.filter(|f| !f.is_empty()) {
                data.push(f.parse::<f32>().map_err(|_| Error::Parse {
                    line: i + 2,
                    column: 0,
                    message: format!("invalid float {f:?}"),
                })?);
            }
            if data.len() - before != dim {
                return Err(Error::Parse {
                    line: i + 2,
                    column: 0,
                    message: format!("expected {dim} components, got {}", data.len() - before),
                });
            }
            words.push(word.to_owned());
        }
        if words.len() != count {
            return Err(Error::Format(format!(
                "header announces {count} words, found {}",
                words.len()
            )));
        }
        WordVectors::from_parts(words, dim, data)
    }

    pub fn load_text(path: impl AsRef<Path>) -> Result<Self> {
        WordVectors::read_text(open_buffered(path.as_ref())?)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (i, word) in self.words.iter().enumerate() {
            w.write_all(word.as_bytes())?;
            for v in self.vector(i) {
                write!(w, " {v}")?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    fn similar_words(&self, word: &str) -> Vec<String> {
        let mut scored: Vec<(usize, &String)> = self.words.iter().map(|w| (strsim::levenshtein(word, w), w)).collect();
        scored.sort();
        scored.into_iter().take(3).map(|(_, w)| w.clone()).collect()
    }

    /// The `k` most cosine-similar words to `word`, excluding itself, in
    /// descending order with lexicographic tie-breaking. Zero vectors have
    /// no defined cosine and are never returned.
    pub fn top_k(&self, word: &str, k: usize) -> Result<NeighborList> {
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let query = self.index(word).ok_or_else(|| Error::UnknownWord {
            word: word.to_owned(),
            suggestions: self.similar_words(word),
        })?;
        if self.norms[query] == 0.0 {
            return Err(Error::ZeroVector);
        }
        let q = self.vector(query);

        // min-heap of the best k seen so far
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        for idx in 0..self.len() {
            if idx == query || self.norms[idx] == 0.0 {
                continue;
            }
            let dot: f64 = q
                .iter()
                .zip(self.vector(idx))
                .map(|(&a, &b)| f64::from(a) * f64::from(b))
                .sum();
            let sim = (dot / (self.norms[query] * self.norms[idx])).clamp(-1.0, 1.0);
            let cand = Candidate {
                sim,
                word: &self.words[idx],
            };
            if heap.len() < k {
                heap.push(cand);
            } else if cand.better_than(heap.peek().unwrap()) {
                heap.pop();
                heap.push(cand);
            }
        }

        let mut neighbors: Vec<(String, f64)> = heap.into_iter().map(|c| (c.word.clone(), c.sim)).collect();
        neighbors.sort_by(|a, b| rank_order((a.1, &a.0), (b.1, &b.0)));
        Ok(NeighborList {
            query: word.to_owned(),
            neighbors,
        })
    }
}

/// Descending similarity, ascending word.
fn rank_order(a: (f64, &str), b: (f64, &str)) -> Ordering {
    b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

struct Candidate<'a> {
    sim: f64,
    word: &'a String,
}

impl Candidate<'_> {
    fn better_than(&self, other: &Candidate) -> bool {
        rank_order((self.sim, self.word), (other.sim, other.word)) == Ordering::Less
    }
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate<'_> {}

impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate<'_> {
    // the heap's maximum is the worst-ranked candidate
    fn cmp(&self, other: &Self) -> Ordering {
        rank_order((self.sim, self.word), (other.sim, other.word))
    }
}

/// Nearest neighbors of a query word.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborList {
    pub query: String,
    pub neighbors: Vec<(String, f64)>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.neighbors.iter().map(|(w, _)| w.as_str())
    }
}
