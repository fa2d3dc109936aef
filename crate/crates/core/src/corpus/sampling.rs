use rand::Rng;

use crate::error::{Error, Result};

/// Cumulative unigram distribution with counts raised to a power, used to
/// draw negative examples.
#[derive(Clone, Debug)]
pub struct SamplingDist {
    cdf: Vec<f64>,
}

impl SamplingDist {
    pub fn new(counts: impl IntoIterator<Item = u64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        let weights: Vec<f64> = counts.into_iter().map(|c| (c as f64).powf(alpha)).collect();
        if weights.is_empty() {
            return Err(Error::Config("sampling distribution over empty vocabulary".into()));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cdf.last_mut().unwrap() = 1.0;
        Ok(SamplingDist { cdf })
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }

    pub fn probability(&self, id: usize) -> f64 {
        if id == 0 {
            self.cdf[0]
        } else {
            self.cdf[id] - self.cdf[id - 1]
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Probability of keeping one occurrence of a word under frequent-word
/// subsampling: `min(1, sqrt(t/f) + t/f)` with `f = count / total`.
pub fn keep_probability(count: u64, total: u64, t: f64) -> f64 {
    assert!(t > 0.0, "subsampling threshold must be positive");
    assert!(count > 0 && count <= total, "count must be in (0, total]");
    let ratio = t / (count as f64 / total as f64);
    (ratio.sqrt() + ratio).min(1.0)
}
