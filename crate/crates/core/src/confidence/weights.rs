use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("weight {index} is negative or not a number: {value}")]
pub struct NegativeWeight {
    pub index: usize,
    pub value: f64,
}

/// Scales weights to sum to 1. All-zero or empty input yields 1/m each,
/// where m is `raw.len()`.
pub fn normalize_weights(raw: &[f64]) -> Result<Vec<f64>, NegativeWeight> {
    check(raw)?;
    let sum: f64 = raw.iter().sum();
    if sum == 0.0 {
        let m = raw.len() as f64;
        return Ok(vec![1.0 / m; raw.len()]);
    }
    Ok(raw.iter().map(|w| w / sum).collect())
}

fn check(raw: &[f64]) -> Result<(), NegativeWeight> {
    match raw.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
        Some(index) => Err(NegativeWeight { index, value: raw[index] }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("at least one source is required")]
    Empty,
    #[error("duplicate source id `{0}`")]
    DuplicateId(String),
    #[error("{weights} weights given for {sources} sources")]
    LengthMismatch { sources: usize, weights: usize },
    #[error(transparent)]
    Negative(#[from] NegativeWeight),
}

/// Ordered sources with their weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceRegistry {
    sources: Vec<String>,
    /// Weights divided by the largest weight, so equal weights are exactly 1.
    relative: Vec<f64>,
    normalized: Vec<f64>,
}

impl SourceRegistry {
    /// `weights` of `None`, or all zero, means equal weights.
    pub fn new(sources: Vec<String>, weights: Option<&[f64]>) -> Result<Self, RegistryError> {
        if sources.is_empty() {
            return Err(RegistryError::Empty);
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = sources.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(RegistryError::DuplicateId(dup.clone()));
        }
        let m = sources.len();
        let raw = match weights {
            Some(w) if w.len() != m => return Err(RegistryError::LengthMismatch { sources: m, weights: w.len() }),
            Some(w) => {
                check(w)?;
                w.to_vec()
            }
            None => vec![0.0; m],
        };
        let max = raw.iter().copied().fold(0.0, f64::max);
        let relative = if max == 0.0 { vec![1.0; m] } else { raw.iter().map(|w| w / max).collect() };
        let normalized = normalize_weights(&raw)?;
        Ok(SourceRegistry { sources, relative, normalized })
    }

    pub fn uniform(sources: Vec<String>) -> Result<Self, RegistryError> {
        Self::new(sources, None)
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    /// Weights summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.normalized
    }

    /// Weights scaled so the largest is 1; ratios equal those of [`Self::weights`].
    pub fn relative_weights(&self) -> &[f64] {
        &self.relative
    }

    pub fn w_sum(&self) -> f64 {
        self.relative.iter().sum()
    }

    pub fn position(&self, source_id: &str) -> Option<usize> {
        self.sources.iter().position(|s| s == source_id)
    }
}
