//! Synthetic tagged corpora with known semantic clusters and inflectional
//! paradigms, plus gold evaluation sets.
//!
//! Every sentence draws one cluster and one dominant tag, so the context of
//! a word is evidence of both its cluster (semantics) and its tag
//! (morphology). Tokens stray from the sentence cluster and tag with
//! configurable probability, and tags are Zipfian, so many rare surfaces
//! are rare inflections of frequent lemmas.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{MorphTag, Token};
use crate::error::{Error, Result};
use crate::eval::{write_triples, AnnotatedWord, Triple};
use crate::fsutil::{commit_all, PendingFile};

const CONSONANTS: &[u8] = b"bcdfghklmnprstvz";
const VOWELS: &[u8] = b"aeiou";
const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Slot {
    pub name: String,
    pub values: Vec<String>,
}

impl Slot {
    pub fn new(name: &str, values: &[&str]) -> Self {
        Slot {
            name: name.to_owned(),
            values: values.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LanguageSpec {
    pub n_clusters: usize,
    pub lemmas_per_cluster: usize,
    /// Tag schema; the tag set is the cartesian product of slot values.
    pub slots: Vec<Slot>,
    /// Zipf exponent of lemma frequencies within a cluster.
    pub zipf: f64,
    /// Root-and-template inflection instead of suffixation.
    pub fusional: bool,
    /// Zipf exponent of tag frequencies (0 makes all tags equally likely).
    pub tag_zipf: f64,
    /// Probability that a token carries its sentence's dominant tag.
    pub tag_peak: f64,
    /// Probability that a token comes from its sentence's cluster rather
    /// than a uniformly drawn one.
    pub cluster_purity: f64,
    pub seed: u64,
}

impl Default for LanguageSpec {
    fn default() -> Self {
        LanguageSpec {
            n_clusters: 8,
            lemmas_per_cluster: 50,
            slots: vec![
                Slot::new("gender", &["M", "F"]),
                Slot::new("number", &["S", "P"]),
                Slot::new("tense", &["PAST", "PRES", "FUT"]),
            ],
            zipf: 1.0,
            fusional: false,
            tag_zipf: 1.5,
            tag_peak: 0.3,
            cluster_purity: 0.3,
            seed: 1,
        }
    }
}

impl LanguageSpec {
    fn tags(&self) -> Result<Vec<MorphTag>> {
        let mut tags: Vec<Vec<String>> = vec![Vec::new()];
        for slot in &self.slots {
            tags = tags
                .into_iter()
                .flat_map(|prefix| {
                    slot.values.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        tags.into_iter().map(MorphTag::new).collect()
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Synth(m));
        if self.n_clusters < 2 {
            return fail("at least 2 clusters required".into());
        }
        if self.lemmas_per_cluster < 2 {
            return fail("at least 2 lemmas per cluster required".into());
        }
        if self.slots.is_empty() || self.slots.iter().any(|s| s.values.is_empty()) {
            return fail("every tag slot needs at least one value".into());
        }
        if self.slots.iter().map(|s| s.values.len()).product::<usize>() < 2 {
            return fail("at least 2 tags required".into());
        }
        if self.zipf.is_nan()
            || self.zipf < 0.0
            || self.tag_zipf.is_nan()
            || self.tag_zipf < 0.0
            || !(0.0..=1.0).contains(&self.tag_peak)
            || !(0.0..=1.0).contains(&self.cluster_purity)
        {
            return fail("zipf and tag_zipf must be >= 0, tag_peak and cluster_purity in [0, 1]".into());
        }
        Ok(())
    }
}

/// Lemmas, their clusters and full paradigms.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    pub lemmas: Vec<String>,
    pub cluster: Vec<usize>,
    pub tags: Vec<MorphTag>,
    /// `forms[lemma][tag]`
    pub forms: Vec<Vec<String>>,
    /// Relative frequency of each lemma within its cluster.
    pub weights: Vec<f64>,
    /// Relative frequency of each tag.
    pub tag_weights: Vec<f64>,
    pub n_clusters: usize,
    pub tag_peak: f64,
    pub cluster_purity: f64,
}

impl Lexicon {
    pub fn surface(&self, lemma: usize, tag: usize) -> &str {
        &self.forms[lemma][tag]
    }

    pub fn word(&self, lemma: usize, tag: usize) -> AnnotatedWord {
        Token {
            surface: self.forms[lemma][tag].clone(),
            lemma: self.lemmas[lemma].clone(),
            tag: self.tags[tag].clone(),
        }
    }

    fn cluster_lemmas(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.lemmas.len()).filter(move |&l| self.cluster[l] == cluster)
    }
}

fn random_string<R: Rng>(rng: &mut R, pattern: &str) -> String {
    pattern
        .chars()
        .map(|c| {
            let set = if c == 'C' { CONSONANTS } else { VOWELS };
            set[rng.gen_range(0..set.len())] as char
        })
        .collect()
}

/// Builds the lexicon: random distinct lemmas, each with a full paradigm.
///
/// Concatenative mode appends one fixed-length suffix per tag to a CVCVC
/// lemma. Fusional mode uses consonant roots as lemmas and interleaves a
/// per-tag vowel template, so no surface contains its lemma.
pub fn gen_language(spec: &LanguageSpec) -> Result<Lexicon> {
    spec.validate()?;
    let tags = spec.tags()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let n_lemmas = spec.n_clusters * spec.lemmas_per_cluster;
    let lemma_pattern = if spec.fusional { "CCCC" } else { "CVCVC" };
    let mut seen = HashSet::new();
    let mut lemmas = Vec::with_capacity(n_lemmas);
    let mut attempts = 0;
    while lemmas.len() < n_lemmas {
        let lemma = random_string(&mut rng, lemma_pattern);
        if seen.insert(lemma.clone()) {
            lemmas.push(lemma);
        } else {
            attempts += 1;
            if attempts > MAX_ATTEMPTS * n_lemmas {
                return Err(Error::Synth("could not draw enough distinct lemmas".into()));
            }
        }
    }

    // one affix pattern per tag, shared by all lemmas; distinct patterns
    // make every paradigm (and, with fixed lengths, every surface) unique
    let affix_pattern = if spec.fusional { "VVVV" } else { "VC" };
    let mut affixes = None;
    for _ in 0..MAX_ATTEMPTS {
        let candidate: Vec<String> = tags.iter().map(|_| random_string(&mut rng, affix_pattern)).collect();
        if candidate.iter().collect::<HashSet<_>>().len() == candidate.len() {
            affixes = Some(candidate);
            break;
        }
    }
    let affixes =
        affixes.ok_or_else(|| Error::Synth(format!("paradigm collision persisted after {MAX_ATTEMPTS} attempts")))?;

    let forms: Vec<Vec<String>> = lemmas
        .iter()
        .map(|lemma| {
            affixes
                .iter()
                .map(|affix| {
                    if spec.fusional {
                        lemma.chars().zip(affix.chars()).flat_map(|(c, v)| [c, v]).collect()
                    } else {
                        format!("{lemma}{affix}")
                    }
                })
                .collect()
        })
        .collect();

    let cluster: Vec<usize> = (0..n_lemmas).map(|l| l / spec.lemmas_per_cluster).collect();
    let weights = (0..n_lemmas)
        .map(|l| 1.0 / ((l % spec.lemmas_per_cluster + 1) as f64).powf(spec.zipf))
        .collect();
    let tag_weights = (0..tags.len())
        .map(|t| 1.0 / ((t + 1) as f64).powf(spec.tag_zipf))
        .collect();

    Ok(Lexicon {
        lemmas,
        cluster,
        tags,
        forms,
        weights,
        tag_weights,
        n_clusters: spec.n_clusters,
        tag_peak: spec.tag_peak,
        cluster_purity: spec.cluster_purity,
    })
}

/// Corpus occurrence counts of every (lemma, tag) form.
#[derive(Clone, Debug, PartialEq)]
pub struct FormCounts {
    /// `counts[lemma][tag]`
    pub counts: Vec<Vec<u64>>,
    pub n_tokens: u64,
}

impl FormCounts {
    pub fn surface_counts(&self, lexicon: &Lexicon) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for (l, row) in self.counts.iter().enumerate() {
            for (t, &c) in row.iter().enumerate() {
                *out.entry(lexicon.surface(l, t).to_owned()).or_insert(0) += c;
            }
        }
        out
    }
}

/// Writes `n_sentences` sentences of `sentence_len` tokens in
/// `surface|lemma|tag` format and returns the form counts.
pub fn gen_corpus<W: Write>(
    lexicon: &Lexicon,
    n_sentences: usize,
    sentence_len: usize,
    seed: u64,
    mut out: W,
) -> Result<FormCounts> {
    if n_sentences == 0 || sentence_len == 0 {
        return Err(Error::Synth("need at least one sentence of at least one token".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_cluster: Vec<(Vec<usize>, WeightedIndex<f64>)> = (0..lexicon.n_clusters)
        .map(|c| {
            let members: Vec<usize> = lexicon.cluster_lemmas(c).collect();
            let dist =
                WeightedIndex::new(members.iter().map(|&l| lexicon.weights[l])).expect("cluster weights are positive");
            (members, dist)
        })
        .collect();
    let tag_dist = WeightedIndex::new(&lexicon.tag_weights).expect("tag weights are positive");
    let tag_text: Vec<String> = lexicon.tags.iter().map(|t| t.to_string()).collect();

    let mut counts = vec![vec![0u64; lexicon.tags.len()]; lexicon.lemmas.len()];
    let mut line = String::new();
    for _ in 0..n_sentences {
        let cluster = rng.gen_range(0..lexicon.n_clusters);
        let peak = tag_dist.sample(&mut rng);
        line.clear();
        for i in 0..sentence_len {
            let c = if rng.gen::<f64>() < lexicon.cluster_purity {
                cluster
            } else {
                rng.gen_range(0..lexicon.n_clusters)
            };
            let (members, dist) = &per_cluster[c];
            let lemma = members[dist.sample(&mut rng)];
            let tag = if rng.gen::<f64>() < lexicon.tag_peak {
                peak
            } else {
                tag_dist.sample(&mut rng)
            };
            counts[lemma][tag] += 1;
            if i > 0 {
                line.push(' ');
            }
            line.push_str(lexicon.surface(lemma, tag));
            line.push('|');
            line.push_str(&lexicon.lemmas[lemma]);
            line.push('|');
            line.push_str(&tag_text[tag]);
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(FormCounts {
        counts,
        n_tokens: (n_sentences * sentence_len) as u64,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSpec {
    pub common_targets: usize,
    pub rare_targets: usize,
    pub triples_per_target: usize,
    /// Rare targets occur fewer than this many times; common targets and
    /// all candidates at least this many.
    pub rare_threshold: u64,
    /// Rare targets occur at least this many times.
    pub min_target_count: u64,
    pub seed: u64,
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec {
            common_targets: 100,
            rare_targets: 35,
            triples_per_target: 5,
            rare_threshold: 100,
            min_target_count: 5,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSets {
    pub common_triples: Vec<Triple>,
    pub rare_triples: Vec<Triple>,
    pub common_targets: Vec<String>,
    pub rare_targets: Vec<String>,
}

/// Gold triples (same-cluster candidate above other-cluster candidate, weight
/// 1) and target lists for common and rare words.
pub fn gen_eval_sets(lexicon: &Lexicon, counts: &FormCounts, spec: &EvalSpec) -> Result<EvalSets> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let forms: Vec<(usize, usize, u64)> = counts
        .counts
        .iter()
        .enumerate()
        .flat_map(|(l, row)| row.iter().enumerate().map(move |(t, &c)| (l, t, c)))
        .collect();
    let frequent: Vec<(usize, usize)> = forms
        .iter()
        .filter(|f| f.2 >= spec.rare_threshold)
        .map(|f| (f.0, f.1))
        .collect();
    let rare: Vec<(usize, usize)> = forms
        .iter()
        .filter(|f| f.2 >= spec.min_target_count && f.2 < spec.rare_threshold)
        .map(|f| (f.0, f.1))
        .collect();

    if rare.len() < spec.rare_targets {
        return Err(Error::Synth(format!(
            "only {} forms occur {}..{} times but {} rare targets were requested; \
             increase the zipf exponent, the number of lemmas or lower the corpus size",
            rare.len(),
            spec.min_target_count,
            spec.rare_threshold,
            spec.rare_targets
        )));
    }
    if frequent.len() < spec.common_targets {
        return Err(Error::Synth(format!(
            "only {} forms occur at least {} times; enlarge the corpus",
            frequent.len(),
            spec.rare_threshold
        )));
    }

    let common_targets: Vec<(usize, usize)> = frequent
        .choose_multiple(&mut rng, spec.common_targets)
        .copied()
        .collect();
    let rare_targets: Vec<(usize, usize)> = rare.choose_multiple(&mut rng, spec.rare_targets).copied().collect();

    let make_triples = |targets: &[(usize, usize)], rng: &mut ChaCha8Rng| -> Result<Vec<Triple>> {
        let mut triples = Vec::with_capacity(targets.len() * spec.triples_per_target);
        for &(lemma, tag) in targets {
            let cluster = lexicon.cluster[lemma];
            let same: Vec<&(usize, usize)> = frequent
                .iter()
                .filter(|f| lexicon.cluster[f.0] == cluster && f.0 != lemma)
                .collect();
            let other: Vec<&(usize, usize)> = frequent.iter().filter(|f| lexicon.cluster[f.0] != cluster).collect();
            if same.is_empty() || other.is_empty() {
                return Err(Error::Synth(format!(
                    "cluster {cluster} lacks frequent candidates; enlarge the corpus"
                )));
            }
            for _ in 0..spec.triples_per_target {
                let high = same[rng.gen_range(0..same.len())];
                let low = other[rng.gen_range(0..other.len())];
                triples.push(Triple {
                    target: lexicon.word(lemma, tag),
                    cand_high: lexicon.word(high.0, high.1),
                    cand_low: lexicon.word(low.0, low.1),
                    weight: 1.0,
                });
            }
        }
        Ok(triples)
    };
    let common_triples = make_triples(&common_targets, &mut rng)?;
    let rare_triples = make_triples(&rare_targets, &mut rng)?;

    let names = |targets: &[(usize, usize)]| targets.iter().map(|&(l, t)| lexicon.surface(l, t).to_owned()).collect();
    Ok(EvalSets {
        common_triples,
        rare_triples,
        common_targets: names(&common_targets),
        rare_targets: names(&rare_targets),
    })
}

/// Everything `synthesize` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub language: LanguageSpec,
    pub n_sentences: usize,
    pub sentence_len: usize,
    pub eval: EvalSpec,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            language: LanguageSpec::default(),
            n_sentences: 100_000,
            sentence_len: 10,
            eval: EvalSpec::default(),
            seed: 1,
        }
    }
}

impl SynthConfig {
    /// Uses `seed` for the language, corpus and evaluation sets alike.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.language.seed = seed;
        self.eval.seed = seed.wrapping_add(2);
        self
    }
}

pub const CORPUS_FILE: &str = "corpus.txt";
pub const TRIPLES_COMMON_FILE: &str = "triples_common.tsv";
pub const TRIPLES_RARE_FILE: &str = "triples_rare.tsv";
pub const TARGETS_COMMON_FILE: &str = "targets_common.txt";
pub const TARGETS_RARE_FILE: &str = "targets_rare.txt";

#[derive(Clone, Debug)]
pub struct Dataset {
    pub lexicon: Lexicon,
    pub counts: FormCounts,
    pub eval: EvalSets,
    pub files: Vec<PathBuf>,
}

/// Generates a language, corpus and evaluation sets and writes the five
/// dataset files into `out_dir`, creating it if needed. Nothing is left
/// behind unless every file could be produced.
pub fn synthesize(out_dir: &Path, config: &SynthConfig) -> Result<Dataset> {
    let lexicon = gen_language(&config.language)?;
    let created = !out_dir.exists();
    fs::create_dir_all(out_dir).map_err(Error::at_path(out_dir))?;
    let result = write_dataset(out_dir, config, lexicon);
    if result.is_err() && created {
        // only succeeds while the directory is still empty
        let _ = fs::remove_dir(out_dir);
    }
    result
}

fn write_dataset(out_dir: &Path, config: &SynthConfig, lexicon: Lexicon) -> Result<Dataset> {
    let path = |name: &str| out_dir.join(name);

    let mut corpus = PendingFile::create(&path(CORPUS_FILE))?;
    let counts = gen_corpus(
        &lexicon,
        config.n_sentences,
        config.sentence_len,
        config.seed.wrapping_add(1),
        &mut corpus,
    )?;
    let eval = gen_eval_sets(&lexicon, &counts, &config.eval)?;

    let mut common = PendingFile::create(&path(TRIPLES_COMMON_FILE))?;
    write_triples(&mut common, &eval.common_triples)?;
    let mut rare = PendingFile::create(&path(TRIPLES_RARE_FILE))?;
    write_triples(&mut rare, &eval.rare_triples)?;
    let mut common_targets = PendingFile::create(&path(TARGETS_COMMON_FILE))?;
    for w in &eval.common_targets {
        writeln!(common_targets, "{w}")?;
    }
    let mut rare_targets = PendingFile::create(&path(TARGETS_RARE_FILE))?;
    for w in &eval.rare_targets {
        writeln!(rare_targets, "{w}")?;
    }
    commit_all(vec![corpus, common, rare, common_targets, rare_targets])?;

    let files = [
        CORPUS_FILE,
        TRIPLES_COMMON_FILE,
        TRIPLES_RARE_FILE,
        TARGETS_COMMON_FILE,
        TARGETS_RARE_FILE,
    ]
    .iter()
    .map(|n| path(n))
    .collect();
    Ok(Dataset {
        lexicon,
        counts,
        eval,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(fusional: bool) -> LanguageSpec {
        LanguageSpec {
            n_clusters: 3,
            lemmas_per_cluster: 10,
            fusional,
            ..LanguageSpec::default()
        }
    }

    #[test]
    fn tag_schema_is_a_cartesian_product() {
        let tags = LanguageSpec::default().tags().unwrap();
        assert_eq!(tags.len(), 12);
        assert_eq!(tags[0].to_string(), "M.S.PAST");
        assert!(tags.iter().all(|t| t.arity() == 3));
    }

    #[test]
    fn paradigms_are_complete_and_injective() {
        for fusional in [false, true] {
            let lex = gen_language(&small_spec(fusional)).unwrap();
            let mut all = HashSet::new();
            for forms in &lex.forms {
                assert_eq!(forms.len(), lex.tags.len());
                assert_eq!(forms.iter().collect::<HashSet<_>>().len(), forms.len());
                all.extend(forms.iter().cloned());
            }
            assert_eq!(all.len(), lex.lemmas.len() * lex.tags.len());
        }
    }

    #[test]
    fn concatenative_forms_extend_the_lemma() {
        let lex = gen_language(&small_spec(false)).unwrap();
        for (l, forms) in lex.forms.iter().enumerate() {
            assert!(forms.iter().all(|f| f.starts_with(&lex.lemmas[l])));
        }
    }

    #[test]
    fn fusional_forms_never_contain_the_lemma() {
        let lex = gen_language(&LanguageSpec {
            fusional: true,
            ..LanguageSpec::default()
        })
        .unwrap();
        for (l, forms) in lex.forms.iter().enumerate() {
            assert!(forms.iter().all(|f| !f.contains(&lex.lemmas[l])));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_language(&small_spec(false)).unwrap();
        let b = gen_language(&small_spec(false)).unwrap();
        assert_eq!(a, b);
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        gen_corpus(&a, 50, 6, 3, &mut ca).unwrap();
        gen_corpus(&b, 50, 6, 3, &mut cb).unwrap();
        assert_eq!(ca, cb);
    }

    #[test]
    fn pure_sentences_stay_within_one_cluster() {
        let lex = gen_language(&LanguageSpec {
            cluster_purity: 1.0,
            ..small_spec(false)
        })
        .unwrap();
        let mut buf = Vec::new();
        let counts = gen_corpus(&lex, 200, 8, 5, &mut buf).unwrap();
        assert_eq!(counts.n_tokens, 1600);
        let cluster_of: std::collections::HashMap<&str, usize> = lex
            .lemmas
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), lex.cluster[i]))
            .collect();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            let clusters: HashSet<usize> = line
                .split(' ')
                .map(|tok| cluster_of[Token::parse(tok).unwrap().lemma.as_str()])
                .collect();
            assert_eq!(clusters.len(), 1);
        }
        let total: u64 = counts.counts.iter().flatten().sum();
        assert_eq!(total, 1600);
    }

    #[test]
    fn rejects_degenerate_specs() {
        let bad = [
            LanguageSpec {
                n_clusters: 1,
                ..small_spec(false)
            },
            LanguageSpec {
                lemmas_per_cluster: 1,
                ..small_spec(false)
            },
            LanguageSpec {
                slots: vec![Slot::new("x", &["A"])],
                ..small_spec(false)
            },
        ];
        for spec in bad {
            assert!(gen_language(&spec).is_err());
        }
    }

    #[test]
    fn too_few_rare_words_is_reported() {
        let lex = gen_language(&small_spec(false)).unwrap();
        let counts = gen_corpus(&lex, 20, 5, 1, std::io::sink()).unwrap();
        let err = gen_eval_sets(&lex, &counts, &EvalSpec::default()).unwrap_err();
        assert!(err.to_string().contains("zipf"), "{err}");
    }
}
