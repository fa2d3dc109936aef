use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{MorphTag, Vocabulary};
use crate::error::{Error, Result};
use crate::query::{NeighborList, WordVectors};

/// Positional Hamming distance; slots present in only one tag mismatch.
pub fn hamming(a: &MorphTag, b: &MorphTag) -> usize {
    let (a, b) = (a.slots(), b.slots());
    let shared = a.iter().zip(b).filter(|(x, y)| x != y).count();
    shared + a.len().abs_diff(b.len())
}

/// Summed minimal tag distance between `word` and its neighbors, together
/// with the arity `|m_w|` used to normalize it.
///
/// For every neighbor the minimum is taken over all (analysis of `word`,
/// analysis of neighbor) pairs. The arity is the largest slot count among
/// the analyses of `word` that realize those minima.
pub fn morpho_dist_with_arity<'a, I>(word: &str, neighbors: I, vocab: &Vocabulary) -> Result<(usize, usize)>
where
    I: IntoIterator<Item = &'a str>,
{
    let own = vocab.get(word).ok_or_else(|| Error::NoAnalysis(word.to_owned()))?;
    let mut total = 0;
    let mut arity = 0;
    for neighbor in neighbors {
        let other = vocab
            .get(neighbor)
            .ok_or_else(|| Error::NoAnalysis(neighbor.to_owned()))?;
        // (distance, -arity) so ties prefer the longer analysis of `word`
        let (dist, best_arity) = own
            .analyses
            .iter()
            .flat_map(|a| {
                other
                    .analyses
                    .iter()
                    .map(move |b| (hamming(&a.tag, &b.tag), a.tag.arity()))
            })
            .min_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)))
            .ok_or_else(|| Error::NoAnalysis(neighbor.to_owned()))?;
        total += dist;
        arity = arity.max(best_arity);
    }
    if arity == 0 {
        arity = own.analyses.iter().map(|a| a.tag.arity()).max().unwrap_or(1);
    }
    Ok((total, arity))
}

/// Total number of incompatible morphological slots between `word` and the
/// words of `neighbors`.
pub fn morpho_dist(word: &str, neighbors: &NeighborList, vocab: &Vocabulary) -> Result<usize> {
    morpho_dist_with_arity(word, neighbors.words(), vocab).map(|(d, _)| d)
}

/// MorphoSim of a single word.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorphoSim {
    pub value: f64,
    /// The raw value fell below 0 (a neighbor's tag is longer than `|m_w|`)
    /// and was clamped.
    pub clamped: bool,
}

/// `1 - dist / (k * |m_w|)` over the `k` nearest neighbors of `word`.
pub fn morpho_sim(word: &str, vectors: &WordVectors, k: usize, vocab: &Vocabulary) -> Result<MorphoSim> {
    let neighbors = vectors.top_k(word, k)?;
    if neighbors.is_empty() {
        return Err(Error::EmptySample(format!("{word:?} has no neighbors")));
    }
    let (dist, arity) = morpho_dist_with_arity(word, neighbors.words(), vocab)?;
    let raw = 1.0 - dist as f64 / (neighbors.len() * arity) as f64;
    Ok(MorphoSim {
        value: raw.clamp(0.0, 1.0),
        clamped: raw < 0.0,
    })
}

/// Words to average MorphoSim over.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    /// Explicit target list; words without a vector are dropped.
    Words(Vec<String>),
    /// `n` distinct words drawn uniformly from those with count at least
    /// `min_count`.
    Random { n: usize, min_count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphoResult {
    pub values: Vec<(String, f64)>,
    pub mean: f64,
    pub k: usize,
    pub sample: String,
    pub clamped: usize,
}

fn resolve_sample(vectors: &WordVectors, vocab: &Vocabulary, sample: &Sample) -> Vec<String> {
    let known = |w: &str| vectors.index(w).is_some() && vocab.get(w).is_some();
    match sample {
        Sample::Words(words) => words.iter().filter(|w| known(w)).cloned().collect(),
        Sample::Random { n, min_count, seed } => {
            let pool: Vec<&String> = vectors
                .words()
                .iter()
                .filter(|w| vocab.get(w).is_some_and(|e| e.count >= *min_count))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut picked = rand::seq::index::sample(&mut rng, pool.len(), (*n).min(pool.len())).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| pool[i].clone()).collect()
        }
    }
}

/// Mean MorphoSim over a sample of words.
pub fn morpho_sim_avg(vectors: &WordVectors, vocab: &Vocabulary, sample: &Sample, k: usize) -> Result<MorphoResult> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let words = resolve_sample(vectors, vocab, sample);
    if words.is_empty() {
        return Err(Error::EmptySample("no sampled word has a vector".into()));
    }
    let mut values = Vec::with_capacity(words.len());
    let mut clamped = 0;
    for word in words {
        let sim = morpho_sim(&word, vectors, k, vocab)?;
        clamped += usize::from(sim.clamped);
        values.push((word, sim.value));
    }
    if clamped > 0 {
        log::warn!("{clamped} MorphoSim values clamped to 0");
    }
    let mean = values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64;
    let sample = match sample {
        Sample::Words(w) => format!("targets ({} listed, {} known)", w.len(), values.len()),
        Sample::Random { n, min_count, seed } => {
            format!(
                "random n={n} min_count={min_count} seed={seed} ({} drawn)",
                values.len()
            )
        }
    };
    Ok(MorphoResult {
        values,
        mean,
        k,
        sample,
        clamped,
    })
}
