use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use propvec::eval::{ag_score, load_triples, morpho_sim_avg, Sample};
use propvec::synth::{synthesize, EvalSpec, LanguageSpec, Slot, SynthConfig};
use propvec::{commit_all, train, AnalysisChoice, Composition, Model, PendingFile, PropertyConfig, TrainConfig};

/// Train and evaluate word embeddings composed from surface forms, lemmas
/// and morphological tags (or character n-grams).
///
/// Every flag can also be set through an environment variable named
/// PROPVEC_<FLAG>, e.g. PROPVEC_DIM=100.
#[derive(Debug, Parser)]
#[command(name = "propvec", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on a tagged corpus; writes <output>.model and <output>.vec.
    Train(TrainArgs),
    /// Score a model on confidence-weighted similarity-ranking triples.
    EvalSem(EvalSemArgs),
    /// Average MorphoSim of a model over sampled or listed words.
    EvalMorph(EvalMorphArgs),
    /// Nearest neighbors of a word, with lemma and tag.
    Nn(NnArgs),
    /// Generate a synthetic tagged corpus and evaluation sets.
    Synth(SynthArgs),
}

fn parse_props(s: &str) -> std::result::Result<String, String> {
    s.parse::<PropertyConfig>().map(|_| s.to_owned()).map_err(|_| {
        format!(
            "invalid property set; valid values: {}",
            PropertyConfig::VALID.join(", ")
        )
    })
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Tagged corpus, one sentence per line, tokens as surface|lemma|tag.
    #[arg(long, env = "PROPVEC_INPUT")]
    pub input: PathBuf,

    /// Properties composing a word: any of W, L, M (e.g. WLM) or 'ngrams'.
    #[arg(long, env = "PROPVEC_PROPS", value_parser = parse_props)]
    pub props: String,

    /// Output prefix.
    #[arg(long, env = "PROPVEC_OUTPUT")]
    pub output: PathBuf,

    /// Vector dimensionality.
    #[arg(long, env = "PROPVEC_DIM", default_value_t = 200)]
    pub dim: usize,

    /// Context radius on each side of the focus word.
    #[arg(long, env = "PROPVEC_WINDOW", default_value_t = 2)]
    pub window: usize,

    /// Always use the full window instead of sampling a radius in 1..=window.
    #[arg(long, env = "PROPVEC_FIXED_WINDOW")]
    pub fixed_window: bool,

    /// Negative samples per positive pair.
    #[arg(long, env = "PROPVEC_NEG", default_value_t = 5)]
    pub neg: usize,

    /// Passes over the corpus.
    #[arg(long, env = "PROPVEC_EPOCHS", default_value_t = 5)]
    pub epochs: usize,

    /// Initial learning rate (decays linearly to zero).
    #[arg(long, env = "PROPVEC_LR", default_value_t = 0.05)]
    pub lr: f64,

    /// Discard surfaces seen fewer times than this.
    #[arg(long, env = "PROPVEC_MIN_COUNT", default_value_t = 5)]
    pub min_count: u64,

    /// Frequent-word subsampling threshold.
    #[arg(long, env = "PROPVEC_T", default_value_t = 1e-4)]
    pub t: f64,

    /// Exponent of the negative-sampling distribution.
    #[arg(long, env = "PROPVEC_ALPHA", default_value_t = 0.75)]
    pub alpha: f64,

    /// Worker threads (results are reproducible only with 1).
    #[arg(long, env = "PROPVEC_THREADS", default_value_t = 1)]
    pub threads: usize,

    /// Random seed.
    #[arg(long, env = "PROPVEC_SEED", default_value_t = 1)]
    pub seed: u64,

    /// How property vectors are combined: sum or mean.
    #[arg(long, env = "PROPVEC_COMPOSE", default_value = "sum")]
    pub compose: Composition,

    /// Shortest character n-gram (ngrams mode).
    #[arg(long, env = "PROPVEC_MINN", default_value_t = propvec::embeddings::DEFAULT_MINN)]
    pub minn: usize,

    /// Longest character n-gram (ngrams mode).
    #[arg(long, env = "PROPVEC_MAXN", default_value_t = propvec::embeddings::DEFAULT_MAXN)]
    pub maxn: usize,

    /// Number of n-gram hash buckets (ngrams mode).
    #[arg(long, env = "PROPVEC_BUCKETS", default_value_t = propvec::embeddings::DEFAULT_BUCKETS)]
    pub buckets: usize,

    /// Analysis behind the exported vector of an ambiguous surface:
    /// most-frequent or weighted.
    #[arg(long, env = "PROPVEC_ANALYSIS", default_value = "most-frequent")]
    pub analysis: AnalysisChoice,

    /// Suppress progress output.
    #[arg(long, env = "PROPVEC_QUIET")]
    pub quiet: bool,
}

impl TrainArgs {
    fn property_config(&self) -> Result<PropertyConfig> {
        Ok(match self.props.parse::<PropertyConfig>()? {
            PropertyConfig::NGrams { .. } => PropertyConfig::ngrams(self.minn, self.maxn, self.buckets)?,
            other => other,
        })
    }

    fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            props: self.property_config()?,
            composition: self.compose,
            window: self.window,
            fixed_window: self.fixed_window,
            negatives: self.neg,
            epochs: self.epochs,
            lr_start: self.lr,
            min_count: self.min_count,
            t: self.t,
            alpha: self.alpha,
            dim: self.dim,
            seed: self.seed,
            workers: self.threads,
            progress: !self.quiet,
        })
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = args.train_config()?;
    let (model, stats) =
        train(&args.input, &config).with_context(|| format!("training on {}", args.input.display()))?;

    let model_path = with_suffix(&args.output, ".model");
    let vec_path = with_suffix(&args.output, ".vec");
    let mut model_file = PendingFile::create(&model_path)?;
    model_file.write_all(&model.to_bytes())?;
    let mut vec_file = PendingFile::create(&vec_path)?;
    let words = model.write_word_vectors(&mut vec_file, args.analysis)?;
    commit_all(vec![model_file, vec_file])?;

    println!(
        "props={} dim={} window={} epochs={} words={} tokens={} pairs={} loss={:.4} seconds={:.1}",
        config.props,
        stats.dim,
        stats.window,
        stats.epochs,
        words,
        stats.tokens_processed,
        stats.pairs,
        stats.epoch_loss.last().copied().unwrap_or(0.0),
        stats.wall_time.as_secs_f64()
    );
    Ok(())
}

fn load_model(path: &Path) -> Result<Model> {
    Model::load(path).with_context(|| format!("loading model {}", path.display()))
}

#[derive(Debug, Args)]
pub struct EvalSemArgs {
    /// Binary model file written by `train`.
    #[arg(long, env = "PROPVEC_MODEL")]
    pub model: PathBuf,

    /// Triples TSV: target, better candidate, worse candidate (each
    /// surface|lemma|tag) and a confidence weight in (0, 1].
    #[arg(long, env = "PROPVEC_TRIPLES")]
    pub triples: PathBuf,
}

fn cmd_eval_sem(args: &EvalSemArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let triples = load_triples(&args.triples).with_context(|| format!("reading {}", args.triples.display()))?;
    let score = ag_score(&model, &triples)?;
    println!(
        "score={:.3} covered={} skipped={}",
        score.score, score.covered, score.skipped
    );
    Ok(())
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("words").required(true).args(["sample", "targets"])))]
pub struct EvalMorphArgs {
    /// Binary model file written by `train`.
    #[arg(long, env = "PROPVEC_MODEL")]
    pub model: PathBuf,

    /// Neighbors per word.
    #[arg(long, env = "PROPVEC_K", default_value_t = 10)]
    pub k: usize,

    /// Average over this many random words (`--sample` alone means 100).
    #[arg(long, env = "PROPVEC_SAMPLE", num_args = 0..=1, default_missing_value = "100")]
    pub sample: Option<usize>,

    /// Seed for `--sample`.
    #[arg(long, env = "PROPVEC_SEED", default_value_t = 1)]
    pub seed: u64,

    /// Only sample words seen at least this many times.
    #[arg(long, env = "PROPVEC_MIN_COUNT", default_value_t = 5)]
    pub min_count: u64,

    /// File with one target word per line, instead of a random sample.
    #[arg(long, env = "PROPVEC_TARGETS")]
    pub targets: Option<PathBuf>,

    /// Analysis behind the vector of an ambiguous surface.
    #[arg(long, env = "PROPVEC_ANALYSIS", default_value = "most-frequent")]
    pub analysis: AnalysisChoice,

    /// Also print per-word values as TSV after the summary line.
    #[arg(long, env = "PROPVEC_PER_WORD")]
    pub per_word: bool,
}

fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut words = Vec::new();
    for line in io::BufReader::new(file).lines() {
        let line = line?;
        let word = line.trim();
        if !word.is_empty() {
            words.push(word.to_owned());
        }
    }
    Ok(words)
}

fn cmd_eval_morph(args: &EvalMorphArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let sample = match (&args.targets, args.sample) {
        (Some(path), None) => Sample::Words(read_word_list(path)?),
        (None, Some(n)) => Sample::Random {
            n,
            min_count: args.min_count,
            seed: args.seed,
        },
        _ => unreachable!("clap enforces exactly one of --sample / --targets"),
    };
    let vectors = model.word_vectors(args.analysis);
    let result = morpho_sim_avg(&vectors, model.vocab(), &sample, args.k)?;
    println!("morphosim={:.3} k={} n={}", result.mean, result.k, result.values.len());
    if args.per_word {
        for (word, value) in &result.values {
            println!("{word}\t{value:.6}");
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct NnArgs {
    /// Binary model file written by `train`.
    #[arg(long, env = "PROPVEC_MODEL")]
    pub model: PathBuf,

    /// Query word (surface form).
    #[arg(long, env = "PROPVEC_WORD")]
    pub word: String,

    /// Number of neighbors.
    #[arg(long, env = "PROPVEC_K", default_value_t = 3)]
    pub k: usize,

    /// Analysis behind the vector of an ambiguous surface.
    #[arg(long, env = "PROPVEC_ANALYSIS", default_value = "most-frequent")]
    pub analysis: AnalysisChoice,
}

fn cmd_nn(args: &NnArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let vectors = model.word_vectors(args.analysis);
    let neighbors = vectors.top_k(&args.word, args.k)?;
    let mut out = io::stdout().lock();
    for (rank, (word, cos)) in neighbors.neighbors.iter().enumerate() {
        let analysis = model
            .vocab()
            .get(word)
            .map(|e| e.primary_analysis())
            .expect("neighbors come from the vocabulary");
        writeln!(
            out,
            "{}\t{word}\t{cos:.4}\t{}\t{}",
            rank + 1,
            analysis.lemma,
            analysis.tag
        )?;
    }
    Ok(())
}

/// Tag schema given on the command line.
#[derive(Clone, Debug)]
pub struct SlotSchema(Vec<Slot>);

fn parse_slots(s: &str) -> std::result::Result<SlotSchema, String> {
    s.split(';')
        .map(|slot| {
            let (name, values) = slot
                .split_once('=')
                .ok_or_else(|| format!("slot {slot:?} must look like name=V1,V2"))?;
            let values: Vec<&str> = values.split(',').map(str::trim).collect();
            if values
                .iter()
                .any(|v| v.is_empty() || v.contains('.') || v.contains('|'))
            {
                return Err(format!("invalid values in slot {slot:?}"));
            }
            Ok(Slot::new(name.trim(), &values))
        })
        .collect::<std::result::Result<_, _>>()
        .map(SlotSchema)
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Directory receiving corpus.txt, triples_{common,rare}.tsv and
    /// targets_{common,rare}.txt.
    #[arg(long, env = "PROPVEC_OUT_DIR")]
    pub out_dir: PathBuf,

    /// Semantic clusters.
    #[arg(long, env = "PROPVEC_CLUSTERS", default_value_t = 8)]
    pub clusters: usize,

    /// Lemmas per cluster.
    #[arg(long, env = "PROPVEC_LEMMAS", default_value_t = 50)]
    pub lemmas: usize,

    /// Tag schema as name=V1,V2;name=V1,...
    #[arg(long, env = "PROPVEC_SLOTS", default_value = "gender=M,F;number=S,P;tense=PAST,PRES,FUT", value_parser = parse_slots)]
    pub slots: SlotSchema,

    /// Zipf exponent of lemma frequencies within a cluster.
    #[arg(long, env = "PROPVEC_ZIPF", default_value_t = 1.0)]
    pub zipf: f64,

    /// Zipf exponent of tag frequencies (0 makes all tags equally likely).
    #[arg(long, env = "PROPVEC_TAG_ZIPF", default_value_t = 1.5)]
    pub tag_zipf: f64,

    /// Probability that a token comes from its sentence's cluster.
    #[arg(long, env = "PROPVEC_CLUSTER_PURITY", default_value_t = 0.3)]
    pub cluster_purity: f64,

    /// Root-and-template inflection: surfaces never contain their lemma.
    #[arg(long, env = "PROPVEC_FUSIONAL")]
    pub fusional: bool,

    /// Probability that a token takes its sentence's dominant tag.
    #[arg(long, env = "PROPVEC_TAG_PEAK", default_value_t = 0.3)]
    pub tag_peak: f64,

    /// Sentences to generate.
    #[arg(long, env = "PROPVEC_SENTENCES", default_value_t = 100_000)]
    pub sentences: usize,

    /// Tokens per sentence.
    #[arg(long, env = "PROPVEC_SENTENCE_LEN", default_value_t = 10)]
    pub sentence_len: usize,

    /// Common-word targets (MorphoSim / SemanticSim analogs).
    #[arg(long, env = "PROPVEC_COMMON_TARGETS", default_value_t = 100)]
    pub common_targets: usize,

    /// Rare-word targets.
    #[arg(long, env = "PROPVEC_RARE_TARGETS", default_value_t = 35)]
    pub rare_targets: usize,

    /// Triples generated per target.
    #[arg(long, env = "PROPVEC_TRIPLES_PER_TARGET", default_value_t = 5)]
    pub triples_per_target: usize,

    /// Rare targets occur fewer times than this.
    #[arg(long, env = "PROPVEC_RARE_THRESHOLD", default_value_t = 100)]
    pub rare_threshold: u64,

    /// Rare targets occur at least this many times.
    #[arg(long, env = "PROPVEC_MIN_TARGET_COUNT", default_value_t = 5)]
    pub min_target_count: u64,

    /// Random seed.
    #[arg(long, env = "PROPVEC_SEED", default_value_t = 1)]
    pub seed: u64,
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        language: LanguageSpec {
            n_clusters: args.clusters,
            lemmas_per_cluster: args.lemmas,
            slots: args.slots.0.clone(),
            zipf: args.zipf,
            fusional: args.fusional,
            tag_zipf: args.tag_zipf,
            tag_peak: args.tag_peak,
            cluster_purity: args.cluster_purity,
            seed: args.seed,
        },
        n_sentences: args.sentences,
        sentence_len: args.sentence_len,
        eval: EvalSpec {
            common_targets: args.common_targets,
            rare_targets: args.rare_targets,
            triples_per_target: args.triples_per_target,
            rare_threshold: args.rare_threshold,
            min_target_count: args.min_target_count,
            seed: args.seed,
        },
        seed: args.seed,
    }
    .with_seed(args.seed);
    let data = synthesize(&args.out_dir, &config).with_context(|| format!("writing to {}", args.out_dir.display()))?;
    println!(
        "lemmas={} tags={} tokens={} triples_common={} triples_rare={} targets_common={} targets_rare={}",
        data.lexicon.lemmas.len(),
        data.lexicon.tags.len(),
        data.counts.n_tokens,
        data.eval.common_triples.len(),
        data.eval.rare_triples.len(),
        data.eval.common_targets.len(),
        data.eval.rare_targets.len()
    );
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::EvalSem(args) => cmd_eval_sem(args),
        Command::EvalMorph(args) => cmd_eval_morph(args),
        Command::Nn(args) => cmd_nn(args),
        Command::Synth(args) => cmd_synth(args),
    }
}
