//! Similarity kernels and confidence aggregation over per-source evidence.

mod score;
mod similarity;
mod weights;

pub use score::{
    best_evidence, instance_confidence, triple_confidence, triple_confidence_unweighted, weighted_confidence,
    EmptyAttributeSpace, InstanceScore, SourceEvidence, SourceValues, TripleScore,
};
pub use similarity::{levenshtein, similarity, SimilarityFunction, SimilarityKind};
pub use weights::{normalize_weights, NegativeWeight, RegistryError, SourceRegistry};

pub const DEFAULT_THRESHOLD: f64 = 0.5;
