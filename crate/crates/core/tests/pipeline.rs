use std::collections::HashMap;
use std::fs;
use std::io::BufReader;

use propvec::corpus::parse_corpus;
use propvec::eval::{ag_score, ag_score_with, load_triples, morpho_sim, morpho_sim_avg, Sample};
use propvec::synth::{synthesize, Dataset, SynthConfig};
use propvec::{AnalysisChoice, Model, Sentence, TrainConfig, Vocabulary, WordVectors};

fn small(seed: u64) -> SynthConfig {
    let mut config = SynthConfig::default().with_seed(seed);
    config.n_sentences = 20_000;
    config.eval.common_targets = 30;
    config.eval.rare_targets = 10;
    config
}

fn corpus(data: &Dataset) -> Vec<Sentence> {
    parse_corpus(BufReader::new(fs::File::open(&data.files[0]).unwrap()))
        .collect::<propvec::Result<_>>()
        .unwrap()
}

fn one_hot(i: usize, n: usize) -> Vec<f32> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

#[test]
fn gold_vectors_score_perfectly() {
    for fusional in [false, true] {
        let dir = tempfile::tempdir().unwrap();
        let mut config = small(2);
        config.language.fusional = fusional;
        let data = synthesize(dir.path(), &config).unwrap();
        let lex = &data.lexicon;

        let cluster: HashMap<&str, usize> = lex
            .lemmas
            .iter()
            .enumerate()
            .map(|(l, s)| (s.as_str(), lex.cluster[l]))
            .collect();
        let by_cluster = |w: &propvec::Token| cluster.get(w.lemma.as_str()).map(|&c| one_hot(c, lex.n_clusters));
        for triples in [&data.eval.common_triples, &data.eval.rare_triples] {
            assert_eq!(ag_score_with(by_cluster, triples).unwrap().score, 1.0);
        }

        let vocab = Vocabulary::build(corpus(&data), 1).unwrap();
        let tag_index: HashMap<String, usize> = lex.tags.iter().enumerate().map(|(i, t)| (t.to_string(), i)).collect();
        let by_tag = WordVectors::from_pairs(vocab.words().iter().map(|w| {
            let tag = w.primary_analysis().tag.to_string();
            (w.surface.clone(), one_hot(tag_index[&tag], lex.tags.len()))
        }))
        .unwrap();
        for target in data.eval.common_targets.iter().chain(&data.eval.rare_targets) {
            assert_eq!(morpho_sim(target, &by_tag, 10, &vocab).unwrap().value, 1.0, "{target}");
        }
    }
}

#[test]
fn evaluation_files_match_the_returned_sets() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthesize(dir.path(), &small(3)).unwrap();
    assert_eq!(
        load_triples(dir.path().join("triples_common.tsv")).unwrap(),
        data.eval.common_triples
    );
    assert_eq!(
        load_triples(dir.path().join("triples_rare.tsv")).unwrap(),
        data.eval.rare_triples
    );
    let rare = fs::read_to_string(dir.path().join("targets_rare.txt")).unwrap();
    assert_eq!(rare.lines().collect::<Vec<_>>(), data.eval.rare_targets);
    assert_eq!(data.eval.rare_triples.len(), 10 * 5);
}

#[test]
fn trained_model_survives_save_load_and_text_export() {
    let dir = tempfile::tempdir().unwrap();
    let data = synthesize(dir.path(), &small(4)).unwrap();
    let config = TrainConfig {
        dim: 24,
        epochs: 2,
        ..TrainConfig::default()
    };
    let (model, stats) = propvec::train(&data.files[0], &config).unwrap();
    assert_eq!(stats.epoch_loss.len(), 2);

    let model_path = dir.path().join("m.model");
    model.save(&model_path).unwrap();
    let loaded = Model::load(&model_path).unwrap();
    assert_eq!(
        ag_score(&loaded, &data.eval.common_triples).unwrap(),
        ag_score(&model, &data.eval.common_triples).unwrap()
    );

    let vec_path = dir.path().join("m.vec");
    let written = model
        .export_word_vectors(&vec_path, AnalysisChoice::MostFrequent)
        .unwrap();
    let text = WordVectors::load_text(&vec_path).unwrap();
    let direct = model.word_vectors(AnalysisChoice::MostFrequent);
    assert_eq!(text.len(), written);
    assert_eq!(text.words(), direct.words());
    for (i, _) in direct.words().iter().enumerate() {
        for (a, b) in text.vector(i).iter().zip(direct.vector(i)) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0));
        }
    }

    let sample = Sample::Words(data.eval.common_targets.clone());
    let from_text = morpho_sim_avg(&text, model.vocab(), &sample, 10).unwrap();
    let from_model = morpho_sim_avg(&direct, model.vocab(), &sample, 10).unwrap();
    assert!((from_text.mean - from_model.mean).abs() < 0.05);
    assert_eq!(from_model.values.len(), data.eval.common_targets.len());
}
