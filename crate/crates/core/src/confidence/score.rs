use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::similarity::{similarity, SimilarityFunction};
use super::weights::SourceRegistry;

/// What one source offers for one property of one instance.
#[derive(Debug, Clone, Copy)]
pub struct SourceValues<'a> {
    pub source_id: &'a str,
    /// Whether the instance was matched in this source at all.
    pub matched: bool,
    pub values: &'a [String],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceEvidence {
    pub source_id: String,
    pub matched: bool,
    /// The source value that scored best; `None` when the source had none.
    pub value: Option<String>,
    pub sim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TripleScore {
    pub property: String,
    pub subject: String,
    pub kg_value: String,
    pub per_source: Vec<SourceEvidence>,
    pub unweighted: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceScore {
    pub subject: String,
    pub triples: Vec<TripleScore>,
    pub confidence: f64,
    pub valid: bool,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("instance `{0}` has no scored properties")]
pub struct EmptyAttributeSpace(pub String);

/// Best similarity over all KG value × source value pairs and the source
/// value that produced it. The first pair wins ties.
pub fn best_evidence(kg_values: &[String], source_values: &[String], f: SimilarityFunction) -> (f64, Option<String>) {
    let mut best: (f64, Option<&String>) = (0.0, None);
    for v in source_values {
        for k in kg_values {
            let s = similarity(k, v, f);
            if best.1.is_none() || s > best.0 {
                best = (s, Some(v));
            }
        }
    }
    (best.0, best.1.cloned())
}

/// Sum of per-source similarities; absent evidence counts 0.
pub fn triple_confidence_unweighted(kg_value: &str, evidences: &[Option<&str>], f: SimilarityFunction) -> f64 {
    evidences.iter().map(|e| e.map_or(0.0, |v| similarity(kg_value, v, f))).sum()
}

/// Σ simᵢ·ωᵢ / Σ ωᵢ.
pub fn weighted_confidence(sims: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(sims.len(), weights.len(), "one similarity per weight");
    let acc: f64 = sims.iter().zip(weights).map(|(s, w)| s * w).sum();
    acc / weights.iter().sum::<f64>()
}

/// Scores one property of one instance against every registered source.
///
/// # Panics
/// If `evidence` does not hold exactly one entry per registry source.
pub fn triple_confidence(
    subject: &str,
    property: &str,
    kg_values: &[String],
    evidence: &[SourceValues<'_>],
    f: SimilarityFunction,
    registry: &SourceRegistry,
) -> TripleScore {
    assert_eq!(evidence.len(), registry.len(), "one evidence entry per source");
    let per_source: Vec<SourceEvidence> = evidence
        .iter()
        .map(|e| {
            let (sim, value) = best_evidence(kg_values, e.values, f);
            SourceEvidence { source_id: e.source_id.to_owned(), matched: e.matched, value, sim }
        })
        .collect();
    let mut score = TripleScore {
        property: property.to_owned(),
        subject: subject.to_owned(),
        kg_value: kg_values.first().cloned().unwrap_or_default(),
        unweighted: per_source.iter().map(|e| e.sim).sum(),
        weighted: 0.0,
        per_source,
    };
    score.rescore(registry);
    score
}

impl TripleScore {
    pub fn sims(&self) -> Vec<f64> {
        self.per_source.iter().map(|e| e.sim).collect()
    }

    /// Recomputes the weighted score from the stored similarities.
    pub fn rescore(&mut self, registry: &SourceRegistry) {
        self.weighted = weighted_confidence(&self.sims(), registry.relative_weights());
    }
}

/// Mean of the weighted triple scores, classified strictly against `threshold`.
pub fn instance_confidence(
    subject: &str,
    triples: Vec<TripleScore>,
    threshold: f64,
) -> Result<InstanceScore, EmptyAttributeSpace> {
    if triples.is_empty() {
        return Err(EmptyAttributeSpace(subject.to_owned()));
    }
    let mut score = InstanceScore { subject: subject.to_owned(), triples, confidence: 0.0, valid: false, threshold };
    score.reclassify(threshold);
    Ok(score)
}

impl InstanceScore {
    pub fn rescore(&mut self, registry: &SourceRegistry, threshold: f64) {
        for t in &mut self.triples {
            t.rescore(registry);
        }
        self.reclassify(threshold);
    }

    fn reclassify(&mut self, threshold: f64) {
        let total: f64 = self.triples.iter().map(|t| t.weighted).sum();
        self.confidence = total / self.triples.len() as f64;
        self.threshold = threshold;
        self.valid = self.confidence > threshold;
    }
}
