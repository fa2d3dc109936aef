use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{extract_properties, Analysis, PropertyIds, PropertyKind, Token, Vocabulary};
use crate::embeddings::config::{Composition, PropertyConfig};
use crate::embeddings::matrix::{Matrix, Rows};
use crate::embeddings::sgns::{compose_into, dot, sgns_step, Scratch};
use crate::error::{Error, Result};
use crate::fsutil::PendingFile;
use crate::query::WordVectors;

/// Which analysis of an ambiguous surface backs its exported vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AnalysisChoice {
    /// The most frequent (lemma, tag) reading.
    #[default]
    MostFrequent,
    /// Count-weighted mean over all readings.
    Weighted,
}

impl FromStr for AnalysisChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "most-frequent" => Ok(AnalysisChoice::MostFrequent),
            "weighted" => Ok(AnalysisChoice::Weighted),
            _ => Err(Error::Config(format!(
                "analysis choice must be most-frequent or weighted, got {s:?}"
            ))),
        }
    }
}

/// Input (property) vectors, output (context word) vectors and the vocabulary
/// they are indexed by.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub(crate) config: PropertyConfig,
    pub(crate) composition: Composition,
    pub(crate) vocab: Vocabulary,
    pub(crate) input: Matrix<f32>,
    pub(crate) output: Matrix<f32>,
}

impl Model {
    /// Input rows uniform on `[-1/dim, 1/dim]`, output rows zero.
    pub fn init(
        vocab: Vocabulary,
        config: PropertyConfig,
        composition: Composition,
        dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        config.validate()?;
        let n_input = match config {
            PropertyConfig::Properties(_) => vocab.n_properties(),
            PropertyConfig::NGrams { buckets, .. } => buckets,
        };
        let bound = 1.0 / dim as f32;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_input * dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let input = Matrix::from_vec(n_input, dim, data);
        let output = Matrix::zeros(vocab.len(), dim);
        Ok(Model {
            config,
            composition,
            vocab,
            input,
            output,
        })
    }

    /// Assembles a model from parts, checking shapes.
    pub fn from_parts(
        config: PropertyConfig,
        composition: Composition,
        vocab: Vocabulary,
        input: Matrix<f32>,
        output: Matrix<f32>,
    ) -> Result<Self> {
        config.validate()?;
        let expected_input = match config {
            PropertyConfig::Properties(_) => vocab.n_properties(),
            PropertyConfig::NGrams { buckets, .. } => buckets,
        };
        if input.rows() != expected_input || output.rows() != vocab.len() {
            return Err(Error::Format(format!(
                "matrix shapes {}x{} / {}x{} do not match vocabulary",
                input.rows(),
                input.cols(),
                output.rows(),
                output.cols()
            )));
        }
        if input.cols() != output.cols() || input.cols() == 0 {
            return Err(Error::DimMismatch(input.cols(), output.cols()));
        }
        Ok(Model {
            config,
            composition,
            vocab,
            input,
            output,
        })
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn config(&self) -> &PropertyConfig {
        &self.config
    }

    pub fn composition(&self) -> Composition {
        self.composition
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn input(&self) -> &Matrix<f32> {
        &self.input
    }

    pub fn output(&self) -> &Matrix<f32> {
        &self.output
    }

    pub fn input_mut(&mut self) -> &mut Matrix<f32> {
        &mut self.input
    }

    pub fn output_mut(&mut self) -> &mut Matrix<f32> {
        &mut self.output
    }

    pub(crate) fn into_matrices(self) -> (PropertyConfig, Composition, Vocabulary, Matrix<f32>, Matrix<f32>) {
        (self.config, self.composition, self.vocab, self.input, self.output)
    }

    /// The configured, known property ids of `token`.
    pub fn properties(&self, token: &Token) -> PropertyIds {
        extract_properties(token, &self.config, &self.vocab)
    }

    /// Sum (or mean) of the given input rows; zero for an empty set.
    pub fn compose(&self, ids: &[usize]) -> Result<Vec<f32>> {
        let mut out = vec![0.0; self.dim()];
        compose_into(&self.input, ids, self.composition, &mut out)?;
        Ok(out)
    }

    /// `compose(ids) · u_context`.
    pub fn score(&self, ids: &[usize], context: usize) -> Result<f32> {
        if context >= self.output.rows() {
            return Err(Error::InvalidId {
                id: context,
                rows: self.output.rows(),
            });
        }
        Ok(dot(&self.compose(ids)?, self.output.row(context)))
    }

    /// One SGD step for a (focus, context) pair with the given negatives.
    /// Returns the loss before the update.
    pub fn train_pair(&mut self, ids: &[usize], context: usize, negatives: &[usize], lr: f32) -> Result<f32> {
        let mut scratch = Scratch::new(self.dim());
        sgns_step(
            &mut self.input,
            &mut self.output,
            ids,
            context,
            negatives,
            lr,
            self.composition,
            &mut scratch,
        )
    }

    /// Composes an arbitrary annotated word from whichever configured
    /// properties are known. `None` when nothing is known.
    pub fn represent(&self, word: &Token) -> Option<Vec<f32>> {
        let ids = self.properties(word);
        if ids.is_empty() {
            return None;
        }
        self.compose(&ids).ok()
    }

    fn analysis_vector(&self, surface: &str, analysis: &Analysis) -> Vec<f32> {
        let token = Token {
            surface: surface.to_owned(),
            lemma: analysis.lemma.clone(),
            tag: analysis.tag.clone(),
        };
        let ids = self.properties(&token);
        self.compose(&ids).expect("vocabulary property ids are in range")
    }

    /// Vector of the retained word `id`.
    pub fn word_vector(&self, id: usize, choice: AnalysisChoice) -> Vec<f32> {
        let entry = self.vocab.word(id);
        match (choice, &self.config) {
            (_, PropertyConfig::NGrams { .. }) | (AnalysisChoice::MostFrequent, _) => {
                self.analysis_vector(&entry.surface, entry.primary_analysis())
            }
            (AnalysisChoice::Weighted, _) => {
                let mut out = vec![0.0f32; self.dim()];
                for analysis in &entry.analyses {
                    let w = analysis.count as f32 / entry.count as f32;
                    for (o, v) in out.iter_mut().zip(self.analysis_vector(&entry.surface, analysis)) {
                        *o += w * v;
                    }
                }
                out
            }
        }
    }

    /// One vector per retained word, in vocabulary order (descending count,
    /// lexicographic ties).
    pub fn word_vectors(&self, choice: AnalysisChoice) -> WordVectors {
        let dim = self.dim();
        let mut data = Vec::with_capacity(self.vocab.len() * dim);
        let mut words = Vec::with_capacity(self.vocab.len());
        for (id, entry) in self.vocab.words().iter().enumerate() {
            words.push(entry.surface.clone());
            data.extend(self.word_vector(id, choice));
        }
        WordVectors::from_parts(words, dim, data).expect("vocabulary words are unique")
    }

    /// Writes the text vector format: a `<count> <dim>` header, then one
    /// `surface v1 ... vdim` line per retained word. Returns the word count.
    pub fn export_word_vectors(&self, path: impl AsRef<Path>, choice: AnalysisChoice) -> Result<usize> {
        let mut file = PendingFile::create(path.as_ref())?;
        let n = self.write_word_vectors(&mut file, choice)?;
        file.commit()?;
        Ok(n)
    }

    pub fn write_word_vectors<W: Write>(&self, mut w: W, choice: AnalysisChoice) -> Result<usize> {
        self.word_vectors(choice).write_text(&mut w)?;
        Ok(self.vocab.len())
    }

    /// True if every parameter is finite.
    pub fn is_finite(&self) -> bool {
        self.input
            .as_slice()
            .iter()
            .chain(self.output.as_slice())
            .all(|v| v.is_finite())
    }

    /// Input row of a namespaced property, if known.
    pub fn property_vector(&self, kind: PropertyKind, value: &str) -> Option<&[f32]> {
        match self.config {
            PropertyConfig::Properties(_) => self.vocab.property(kind, value).map(|id| self.input.row(id)),
            PropertyConfig::NGrams { .. } => None,
        }
    }
}
