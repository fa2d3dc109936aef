use std::fs;
use std::io::BufReader;

use propvec::corpus::parse_corpus;
use propvec::eval::ag_score;
use propvec::synth::{gen_corpus, gen_language, synthesize, LanguageSpec, SynthConfig};
use propvec::{train, train_sentences, Sentence, TrainConfig};

fn synthetic(n_sentences: usize, seed: u64) -> (tempfile::TempDir, propvec::synth::Dataset) {
    let dir = tempfile::tempdir().unwrap();
    let mut config = SynthConfig::default().with_seed(seed);
    config.n_sentences = n_sentences;
    config.eval.common_targets = 40;
    config.eval.rare_targets = 10;
    let data = synthesize(dir.path(), &config).unwrap();
    (dir, data)
}

/// A corpus without evaluation sets, which small corpora cannot support.
fn corpus_only(n_sentences: usize, seed: u64) -> Vec<u8> {
    let lexicon = gen_language(&LanguageSpec {
        seed,
        ..LanguageSpec::default()
    })
    .unwrap();
    let mut text = Vec::new();
    gen_corpus(&lexicon, n_sentences, 10, seed, &mut text).unwrap();
    text
}

fn parse(text: &[u8]) -> Vec<Sentence> {
    parse_corpus(text).collect::<propvec::Result<_>>().unwrap()
}

fn sentences(data: &propvec::synth::Dataset) -> Vec<Sentence> {
    parse_corpus(BufReader::new(fs::File::open(&data.files[0]).unwrap()))
        .collect::<propvec::Result<_>>()
        .unwrap()
}

#[test]
fn fixed_window_without_subsampling_trains_every_pair() {
    let corpus = parse(&corpus_only(2_000, 3));
    let config = TrainConfig {
        window: 2,
        fixed_window: true,
        // keep probability saturates at 1 for every word
        t: 1.0,
        min_count: 1,
        dim: 8,
        epochs: 2,
        ..TrainConfig::default()
    };
    let (_, stats) = train_sentences(&corpus, &config).unwrap();
    let per_epoch: u64 = corpus
        .iter()
        .map(|s| {
            let n = s.tokens.len();
            (0..n).map(|t| (t.min(2) + (n - 1 - t).min(2)) as u64).sum::<u64>()
        })
        .sum();
    assert_eq!(stats.pairs, 2 * per_epoch);
}

#[test]
fn pairs_never_exceed_the_window_bound() {
    let corpus = parse(&corpus_only(2_000, 4));
    let config = TrainConfig {
        window: 3,
        dim: 8,
        epochs: 2,
        ..TrainConfig::default()
    };
    let (_, stats) = train_sentences(&corpus, &config).unwrap();
    let tokens: usize = corpus.iter().map(|s| s.tokens.len()).sum();
    assert!(stats.pairs <= (2 * 3 * tokens * 2) as u64);
    assert!(stats.pairs > 0);
    // words under min_count are dropped before training
    let retained = propvec::Vocabulary::build(&corpus, config.min_count)
        .unwrap()
        .total_tokens();
    assert_eq!(stats.tokens_processed, 2 * retained);
    assert!(stats.final_lr >= 1e-6 * config.lr_start);
}

#[test]
fn multiple_workers_stay_close_to_one() {
    let (_dir, data) = synthetic(30_000, 5);
    let corpus = sentences(&data);
    let base = TrainConfig {
        dim: 30,
        epochs: 3,
        ..TrainConfig::default()
    };
    let scores: Vec<f64> = [1, 4]
        .iter()
        .map(|&workers| {
            let (model, stats) = train_sentences(
                &corpus,
                &TrainConfig {
                    workers,
                    ..base.clone()
                },
            )
            .unwrap();
            assert_eq!(stats.workers, workers);
            assert!(model.is_finite());
            ag_score(&model, &data.eval.common_triples).unwrap().score
        })
        .collect();
    assert!((scores[0] - scores[1]).abs() < 0.05, "{scores:?}");
}

#[test]
fn training_from_a_file_matches_training_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.txt");
    let text = corpus_only(1_000, 6);
    fs::write(&path, &text).unwrap();
    let config = TrainConfig {
        dim: 10,
        epochs: 1,
        ..TrainConfig::default()
    };
    let (from_file, _) = train(&path, &config).unwrap();
    let (in_memory, _) = train_sentences(&parse(&text), &config).unwrap();
    assert_eq!(from_file.to_bytes(), in_memory.to_bytes());
}

#[test]
fn unreadable_corpus_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert!(train(&missing, &TrainConfig::default()).is_err());

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "ok|ok|X\nbroken|token\n").unwrap();
    let err = train(&bad, &TrainConfig::default()).unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
}
