//! Semantic (triple ranking) and morphological (MorphoSim) evaluation.

pub mod morph;
pub mod semantic;

pub use morph::{hamming, morpho_dist, morpho_sim, morpho_sim_avg, MorphoResult, MorphoSim, Sample};
pub use semantic::{
    ag_score, ag_score_with, load_triples, parse_triples, write_triples, AnnotatedWord, SemanticScore, Triple,
};
