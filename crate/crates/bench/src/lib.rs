//! Seeded fixtures for the kernel benchmarks.

use propvec::embeddings::Matrix;
use propvec::WordVectors;
use rand::distributions::Alphanumeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rows: usize, dim: usize, seed: u64) -> Matrix<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1.0 / dim as f32;
    Matrix::from_vec(
        rows,
        dim,
        (0..rows * dim).map(|_| rng.gen_range(-bound..bound)).collect(),
    )
}

/// `n` distinct lowercase words of 4 to 12 characters.
pub fn random_words(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words = std::collections::BTreeSet::new();
    while words.len() < n {
        let len = rng.gen_range(4..=12);
        let word: String = (&mut rng)
            .sample_iter(Alphanumeric)
            .map(|b| (b as char).to_ascii_lowercase())
            .filter(char::is_ascii_lowercase)
            .take(len)
            .collect();
        words.insert(word);
    }
    words.into_iter().collect()
}

pub fn random_vectors(n: usize, dim: usize, seed: u64) -> WordVectors {
    let words = random_words(n, seed);
    let data = random_matrix(n, dim, seed + 1).as_slice().to_vec();
    WordVectors::from_parts(words, dim, data).expect("consistent shapes")
}
