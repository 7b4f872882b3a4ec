//! Browser bindings for a few of the validator's pure functions: string
//! similarity, great-circle distance and weighted rescoring of a
//! similarity matrix.
//!
//! Each export has a plain Rust twin returning `Result<_, String>` so the
//! logic is testable without a JavaScript host.

use kgval::confidence::{
    instance_confidence, similarity as kernel, SimilarityFunction, SimilarityKind, SourceEvidence, SourceRegistry,
    TripleScore,
};
use kgval::kg::GeoPoint;
use kgval::matching::haversine;
use kgval::matching::normalize::NormalizerKind;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, value: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(value.to_owned())).map_err(|_| format!("unknown {what} `{value}`"))
}

pub fn similarity_of(a: &str, b: &str, kind: &str, normalizer: &str) -> Result<f64, String> {
    let kind: SimilarityKind = parse_enum("similarity kind", kind)?;
    let normalizer: NormalizerKind = parse_enum("normalizer", normalizer)?;
    Ok(kernel(a, b, SimilarityFunction::new(kind, normalizer)))
}

pub fn distance_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64, String> {
    haversine(GeoPoint { lat: lat1, lon: lon1 }, GeoPoint { lat: lat2, lon: lon2 })
        .map_err(|e| format!("coordinates out of range: {}, {}", e.lat, e.lon))
}

#[derive(Debug, Deserialize)]
pub struct RescoreInput {
    /// One row per property, one similarity per source.
    pub sims: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub threshold: f64,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct RescoreOutput {
    pub weighted: Vec<f64>,
    pub unweighted: Vec<f64>,
    pub confidence: f64,
    pub valid: bool,
}

pub fn rescore_matrix(input: &RescoreInput) -> Result<RescoreOutput, String> {
    if !(0.0..=1.0).contains(&input.threshold) {
        return Err(format!("threshold must lie in [0, 1], got {}", input.threshold));
    }
    let ids: Vec<String> = (0..input.weights.len()).map(|i| format!("s{}", i + 1)).collect();
    let registry = SourceRegistry::new(ids.clone(), Some(&input.weights)).map_err(|e| e.to_string())?;
    let mut triples = Vec::with_capacity(input.sims.len());
    for (k, row) in input.sims.iter().enumerate() {
        if row.len() != ids.len() {
            return Err(format!("row {} has {} similarities for {} sources", k + 1, row.len(), ids.len()));
        }
        if let Some(s) = row.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(format!("similarity {s} outside [0, 1]"));
        }
        let mut t = TripleScore {
            property: format!("p{}", k + 1),
            subject: "demo".into(),
            kg_value: String::new(),
            per_source: row
                .iter()
                .zip(&ids)
                .map(|(&sim, id)| SourceEvidence { source_id: id.clone(), matched: true, value: None, sim })
                .collect(),
            unweighted: row.iter().sum(),
            weighted: 0.0,
        };
        t.rescore(&registry);
        triples.push(t);
    }
    let score = instance_confidence("demo", triples, input.threshold).map_err(|_| "no properties given".to_string())?;
    Ok(RescoreOutput {
        weighted: score.triples.iter().map(|t| t.weighted).collect(),
        unweighted: score.triples.iter().map(|t| t.unweighted).collect(),
        confidence: score.confidence,
        valid: score.valid,
    })
}

/// Similarity in [0, 1] of two values, e.g. `similarity("Hotel Post", "Post Hotel", "token-jaccard", "name")`.
#[wasm_bindgen]
pub fn similarity(a: &str, b: &str, kind: &str, normalizer: &str) -> Result<f64, JsError> {
    similarity_of(a, b, kind, normalizer).map_err(|e| JsError::new(&e))
}

/// Great-circle distance in metres.
#[wasm_bindgen(js_name = haversineM)]
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Result<f64, JsError> {
    distance_m(lat1, lon1, lat2, lon2).map_err(|e| JsError::new(&e))
}

/// Takes `{"sims": [[..]], "weights": [..], "threshold": t}` and returns
/// the per-property and instance scores as JSON.
#[wasm_bindgen]
pub fn rescore(input_json: &str) -> Result<String, JsError> {
    let input: RescoreInput = serde_json::from_str(input_json).map_err(|e| JsError::new(&e.to_string()))?;
    let out = rescore_matrix(&input).map_err(|e| JsError::new(&e))?;
    Ok(serde_json::to_string(&out).expect("scores serialize"))
}
