//! Multi-epoch, multi-worker skip-gram negative-sampling training.
//!
//! Workers share the model matrices Hogwild-style: no locking, lost updates
//! are tolerated. A single relaxed atomic token counter drives the linear
//! learning-rate decay. Runs are bit-reproducible only with one worker.

use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    extract_properties, keep_probability, parse_corpus, PropertyIds, SamplingDist, Sentence, Vocabulary,
};
use crate::embeddings::{sgns_step, Composition, HogwildMatrix, Model, PropertyConfig, Scratch};
use crate::error::{Error, Result};
use crate::fsutil::open_buffered;

/// Lower bound on the decayed learning rate, relative to the start rate.
pub const LR_FLOOR: f64 = 1e-6;

/// Negative draws that hit the true context are redrawn at most this often.
pub const MAX_NEGATIVE_ATTEMPTS: usize = 100;

const SHARD_SENTENCES: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub props: PropertyConfig,
    pub composition: Composition,
    /// Maximum context radius on each side of the focus word.
    pub window: usize,
    /// Always use the full radius instead of sampling it from `1..=window`.
    pub fixed_window: bool,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub min_count: u64,
    /// Subsampling threshold.
    pub t: f64,
    /// Exponent of the negative-sampling distribution.
    pub alpha: f64,
    pub dim: usize,
    pub seed: u64,
    pub workers: usize,
    /// Report progress on standard error.
    pub progress: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            props: PropertyConfig::Properties(crate::PropertySet::ALL),
            composition: Composition::Sum,
            window: 2,
            fixed_window: false,
            negatives: 5,
            epochs: 5,
            lr_start: 0.05,
            min_count: 5,
            t: 1e-4,
            alpha: 0.75,
            dim: 200,
            seed: 1,
            workers: 1,
            progress: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_owned()));
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.lr_start > 0.0 && self.lr_start.is_finite()) {
            return fail("learning rate must be positive");
        }
        if self.workers < 1 {
            return fail("workers must be at least 1");
        }
        if self.dim < 1 {
            return fail("dim must be at least 1");
        }
        if self.min_count < 1 {
            return fail("min_count must be at least 1");
        }
        if self.t.is_nan() || self.t <= 0.0 {
            return fail("subsampling threshold must be positive");
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return fail("alpha must be positive");
        }
        self.props.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainStats {
    /// Corpus tokens consumed (before subsampling), summed over epochs.
    pub tokens_processed: u64,
    /// Positive (focus, context) pairs trained.
    pub pairs: u64,
    /// Mean pair loss of each epoch.
    pub epoch_loss: Vec<f64>,
    pub wall_time: Duration,
    pub final_lr: f64,
    pub window: usize,
    pub dim: usize,
    pub epochs: usize,
    pub workers: usize,
}

/// Linearly decayed learning rate after `processed` of `total` tokens.
pub fn learning_rate(lr_start: f64, processed: u64, total: u64) -> f64 {
    let progress = if total == 0 {
        1.0
    } else {
        processed as f64 / total as f64
    };
    lr_start * (1.0 - progress).max(LR_FLOOR)
}

/// (focus, context) position pairs of a sentence with `len` kept positions.
/// For each focus position a radius `b` is drawn from `1..=window` (or fixed
/// at `window`), and every other position within `b` is a context.
pub fn contexts<R: Rng + ?Sized>(len: usize, window: usize, fixed_window: bool, rng: &mut R) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for focus in 0..len {
        let radius = if fixed_window {
            window
        } else {
            rng.gen_range(1..=window)
        };
        let lo = focus.saturating_sub(radius);
        let hi = (focus + radius).min(len - 1);
        pairs.extend((lo..=hi).filter(|&c| c != focus).map(|c| (focus, c)));
    }
    pairs
}

/// Draws up to `n` negatives, redrawing any that equal `context`. A slot is
/// left empty if every attempt hits the context.
pub fn draw_negatives<R: Rng + ?Sized>(
    dist: &SamplingDist,
    context: usize,
    n: usize,
    rng: &mut R,
    out: &mut Vec<usize>,
) {
    out.clear();
    for _ in 0..n {
        for _ in 0..MAX_NEGATIVE_ATTEMPTS {
            let id = dist.sample(rng);
            if id != context {
                out.push(id);
                break;
            }
        }
    }
}

#[derive(Clone, Copy)]
struct EncodedToken {
    word: u32,
    props: u32,
}

/// Corpus with surfaces mapped to word ids and each distinct analysis mapped
/// to its property ids. Out-of-vocabulary tokens are dropped.
struct EncodedCorpus {
    sentences: Vec<Vec<EncodedToken>>,
    props: Vec<PropertyIds>,
    n_tokens: u64,
}

impl EncodedCorpus {
    fn new(sentences: &[Sentence], vocab: &Vocabulary, config: &PropertyConfig) -> Self {
        let mut cache: HashMap<(&str, &str, String), u32> = HashMap::new();
        let mut props = Vec::new();
        let mut encoded = Vec::with_capacity(sentences.len());
        let mut n_tokens = 0;
        for sentence in sentences {
            let mut tokens = Vec::with_capacity(sentence.len());
            for token in &sentence.tokens {
                let Some(word) = vocab.word_id(&token.surface) else {
                    continue;
                };
                let key = (token.surface.as_str(), token.lemma.as_str(), token.tag.to_string());
                let props_idx = *cache.entry(key).or_insert_with(|| {
                    props.push(extract_properties(token, config, vocab));
                    (props.len() - 1) as u32
                });
                tokens.push(EncodedToken {
                    word: word as u32,
                    props: props_idx,
                });
            }
            if !tokens.is_empty() {
                n_tokens += tokens.len() as u64;
                encoded.push(tokens);
            }
        }
        EncodedCorpus {
            sentences: encoded,
            props,
            n_tokens,
        }
    }
}

fn mix_seed(seed: u64, epoch: u64, stream: u64) -> u64 {
    // splitmix64 finalizer over the combined inputs
    let mut z = seed
        .wrapping_add(epoch.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(stream.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-run state shared by all workers.
struct Shared<'a> {
    config: &'a TrainConfig,
    corpus: &'a EncodedCorpus,
    keep: Vec<f64>,
    dist: SamplingDist,
    shard_orders: Vec<Vec<usize>>,
    total_tokens: u64,
    processed: AtomicU64,
    pairs: AtomicU64,
    epoch_loss: Mutex<Vec<(f64, u64)>>,
}

impl Shared<'_> {
    fn run_worker(&self, worker: usize, mut input: HogwildMatrix<f32>, mut output: HogwildMatrix<f32>) -> Result<()> {
        let config = self.config;
        let lr_start = config.lr_start;
        let mut scratch = Scratch::new(config.dim);
        let mut negatives = Vec::with_capacity(config.negatives);
        let mut kept: Vec<EncodedToken> = Vec::new();

        for epoch in 0..config.epochs {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, epoch as u64, worker as u64 + 1));
            let (mut loss_sum, mut loss_n) = (0.0f64, 0u64);
            let mut pairs = 0u64;

            let order = &self.shard_orders[epoch];
            for &shard in order.iter().skip(worker).step_by(config.workers) {
                let start = shard * SHARD_SENTENCES;
                let end = (start + SHARD_SENTENCES).min(self.corpus.sentences.len());
                for sentence in &self.corpus.sentences[start..end] {
                    let processed = self.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
                    let lr = learning_rate(lr_start, processed, self.total_tokens) as f32;

                    kept.clear();
                    kept.extend(
                        sentence
                            .iter()
                            .filter(|tok| rng.gen::<f64>() < self.keep[tok.word as usize])
                            .copied(),
                    );
                    if kept.len() < 2 {
                        continue;
                    }
                    for (focus, ctx) in contexts(kept.len(), config.window, config.fixed_window, &mut rng) {
                        let context = kept[ctx].word as usize;
                        draw_negatives(&self.dist, context, config.negatives, &mut rng, &mut negatives);
                        let props = &self.corpus.props[kept[focus].props as usize];
                        let loss = sgns_step(
                            &mut input,
                            &mut output,
                            props,
                            context,
                            &negatives,
                            lr,
                            config.composition,
                            &mut scratch,
                        )?;
                        loss_sum += f64::from(loss);
                        loss_n += 1;
                        pairs += 1;
                    }
                }
            }

            self.pairs.fetch_add(pairs, Ordering::Relaxed);
            let mut log = self.epoch_loss.lock().unwrap();
            log[epoch].0 += loss_sum;
            log[epoch].1 += loss_n;
        }
        Ok(())
    }

    fn report_progress(&self, done: &AtomicBool, started: Instant) {
        let mut last = Instant::now();
        let mut last_tokens = 0u64;
        while !done.load(Ordering::Relaxed) {
            std::thread::sleep(Duration::from_millis(50));
            if last.elapsed() < Duration::from_secs(1) {
                continue;
            }
            let tokens = self.processed.load(Ordering::Relaxed).min(self.total_tokens);
            let rate = (tokens - last_tokens) as f64 / last.elapsed().as_secs_f64();
            let loss = self
                .epoch_loss
                .lock()
                .unwrap()
                .iter()
                .rev()
                .find(|(_, n)| *n > 0)
                .map(|(s, n)| s / *n as f64);
            eprintln!(
                "progress: {:5.1}%  {:>10.0} tokens/s  loss {}  elapsed {:.0}s",
                100.0 * tokens as f64 / self.total_tokens.max(1) as f64,
                rate,
                loss.map_or_else(|| "-".to_owned(), |l| format!("{l:.4}")),
                started.elapsed().as_secs_f64()
            );
            last = Instant::now();
            last_tokens = tokens;
        }
    }
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_owned())
}

/// Trains on an in-memory corpus.
pub fn train_sentences(sentences: &[Sentence], config: &TrainConfig) -> Result<(Model, TrainStats)> {
    config.validate()?;
    let started = Instant::now();

    let vocab = Vocabulary::build(sentences, config.min_count)?;
    let corpus = EncodedCorpus::new(sentences, &vocab, &config.props);
    let keep: Vec<f64> = vocab
        .counts()
        .map(|c| keep_probability(c, vocab.total_tokens(), config.t))
        .collect();
    let dist = SamplingDist::new(vocab.counts(), config.alpha)?;
    let model = Model::init(vocab, config.props, config.composition, config.dim, config.seed)?;

    let n_shards = corpus.sentences.len().div_ceil(SHARD_SENTENCES);
    let shard_orders = (0..config.epochs)
        .map(|epoch| {
            let mut order: Vec<usize> = (0..n_shards).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix_seed(config.seed, epoch as u64, 0)));
            order
        })
        .collect();

    let total_tokens = corpus.n_tokens * config.epochs as u64;
    let shared = Shared {
        config,
        corpus: &corpus,
        keep,
        dist,
        shard_orders,
        total_tokens,
        processed: AtomicU64::new(0),
        pairs: AtomicU64::new(0),
        epoch_loss: Mutex::new(vec![(0.0, 0); config.epochs]),
    };

    let (config_props, composition, vocab, input, output) = model.into_matrices();
    let input: HogwildMatrix<f32> = input.into();
    let output: HogwildMatrix<f32> = output.into();
    let done = AtomicBool::new(false);

    let results: Vec<Result<()>> = std::thread::scope(|scope| {
        let progress = config
            .progress
            .then(|| scope.spawn(|| shared.report_progress(&done, started)));
        let handles: Vec<_> = (0..config.workers)
            .map(|worker| {
                let (input, output) = (input.clone(), output.clone());
                let shared = &shared;
                scope.spawn(move || shared.run_worker(worker, input, output))
            })
            .collect();
        let results = handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| Err(Error::WorkerPanic(panic_message(p)))))
            .collect();
        done.store(true, Ordering::Relaxed);
        if let Some(p) = progress {
            let _ = p.join();
        }
        results
    });
    for result in results {
        result?;
    }

    let input = input.into_inner().expect("workers released the input matrix");
    let output = output.into_inner().expect("workers released the output matrix");
    let model = Model::from_parts(config_props, composition, vocab, input, output)?;
    if !model.is_finite() {
        return Err(Error::NonFinite("trained model contains non-finite parameters".into()));
    }

    let processed = shared.processed.load(Ordering::Relaxed);
    let stats = TrainStats {
        tokens_processed: processed,
        pairs: shared.pairs.load(Ordering::Relaxed),
        epoch_loss: shared
            .epoch_loss
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|(s, n)| if n == 0 { 0.0 } else { s / n as f64 })
            .collect(),
        wall_time: started.elapsed(),
        final_lr: learning_rate(config.lr_start, processed, total_tokens),
        window: config.window,
        dim: config.dim,
        epochs: config.epochs,
        workers: config.workers,
    };
    Ok((model, stats))
}

/// Reads a tagged corpus file and trains on it.
pub fn train(corpus: impl AsRef<Path>, config: &TrainConfig) -> Result<(Model, TrainStats)> {
    let sentences = parse_corpus(open_buffered(corpus.as_ref())?).collect::<Result<Vec<_>>>()?;
    train_sentences(&sentences, config)
}
