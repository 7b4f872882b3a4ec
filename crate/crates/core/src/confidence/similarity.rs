use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::matching::normalize::{normalize, NormalizerKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityKind {
    LevenshteinNormalized,
    Exact,
    TokenJaccard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimilarityFunction {
    pub kind: SimilarityKind,
    pub normalizer: NormalizerKind,
}

impl SimilarityFunction {
    pub const fn new(kind: SimilarityKind, normalizer: NormalizerKind) -> Self {
        SimilarityFunction { kind, normalizer }
    }

    /// Normalized Levenshtein with the property's default normalizer.
    pub fn for_property(property: &str) -> Self {
        SimilarityFunction::new(SimilarityKind::LevenshteinNormalized, NormalizerKind::for_property(property))
    }
}

/// Similarity in [0, 1] of two raw values after normalization.
/// Two empty values are identical; one empty value scores 0.
pub fn similarity(a: &str, b: &str, f: SimilarityFunction) -> f64 {
    let (na, nb) = (normalize(a, f.normalizer), normalize(b, f.normalizer));
    match f.kind {
        SimilarityKind::Exact => {
            if na == nb {
                1.0
            } else {
                0.0
            }
        }
        SimilarityKind::TokenJaccard => {
            let ta: BTreeSet<&str> = na.split_whitespace().collect();
            let tb: BTreeSet<&str> = nb.split_whitespace().collect();
            match (ta.is_empty(), tb.is_empty()) {
                (true, true) => 1.0,
                (true, false) | (false, true) => 0.0,
                _ => ta.intersection(&tb).count() as f64 / ta.union(&tb).count() as f64,
            }
        }
        SimilarityKind::LevenshteinNormalized => {
            let ca: Vec<char> = na.chars().collect();
            let cb: Vec<char> = nb.chars().collect();
            match (ca.is_empty(), cb.is_empty()) {
                (true, true) => 1.0,
                (true, false) | (false, true) => 0.0,
                _ => 1.0 - edit_distance(&ca, &cb) as f64 / ca.len().max(cb.len()) as f64,
            }
        }
    }
}

/// Edit distance in Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let ca: Vec<char> = a.chars().collect();
    let cb: Vec<char> = b.chars().collect();
    edit_distance(&ca, &cb)
}

fn edit_distance(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
