//! Precision, recall and f-measure of validator predictions against
//! human-labelled baselines.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::confidence::{InstanceScore, TripleScore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineLabel {
    pub subject: String,
    pub property: String,
    pub correct: bool,
}

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("cannot read baseline {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("baseline line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("baseline line {line}: duplicate label for ({subject}, {property})")]
    Duplicate { line: u64, subject: String, property: String },
}

/// Ground-truth labels keyed by (subject, property).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Baseline {
    labels: BTreeMap<(String, String), bool>,
}

impl Baseline {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, BaselineError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|source| BaselineError::Io { path: path.display().to_string(), source })?;
        Self::from_reader(file)
    }

    /// Reads `subject,property,correct` CSV with a header row.
    pub fn from_reader(reader: impl Read) -> Result<Self, BaselineError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| BaselineError::Format { line: 1, message: e.to_string() })?.clone();
        let expected = ["subject", "property", "correct"];
        if headers.len() != 3 || !headers.iter().zip(expected).all(|(h, e)| h.eq_ignore_ascii_case(e)) {
            return Err(BaselineError::Format { line: 1, message: "header must be subject,property,correct".into() });
        }
        let mut labels = BTreeMap::new();
        for row in rdr.records() {
            let row = row.map_err(|e| BaselineError::Format {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = row.position().map_or(0, |p| p.line());
            let correct = match row[2].to_ascii_lowercase().as_str() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(BaselineError::Format { line, message: format!("`{other}` is not true or false") })
                }
            };
            let key = (row[0].to_owned(), row[1].to_owned());
            if labels.insert(key.clone(), correct).is_some() {
                return Err(BaselineError::Duplicate { line, subject: key.0, property: key.1 });
            }
        }
        Ok(Baseline { labels })
    }

    pub fn from_labels(labels: impl IntoIterator<Item = BaselineLabel>) -> Self {
        Baseline { labels: labels.into_iter().map(|l| ((l.subject, l.property), l.correct)).collect() }
    }

    pub fn label(&self, subject: &str, property: &str) -> Option<bool> {
        self.labels.get(&(subject.to_owned(), property.to_owned())).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "TP")]
    TruePositive,
    #[serde(rename = "FP")]
    FalsePositive,
    #[serde(rename = "TN")]
    TrueNegative,
    #[serde(rename = "FN")]
    FalseNegative,
}

impl Outcome {
    pub fn of(predicted: bool, correct: bool) -> Self {
        match (predicted, correct) {
            (true, true) => Outcome::TruePositive,
            (true, false) => Outcome::FalsePositive,
            (false, false) => Outcome::TrueNegative,
            (false, true) => Outcome::FalseNegative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no baseline label for ({subject}, {property})")]
pub struct MissingLabel {
    pub subject: String,
    pub property: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("nothing to evaluate")]
pub struct EmptyEvaluation;

/// Predicted positive iff the weighted score is strictly above `threshold`.
pub fn classify_triple(score: &TripleScore, baseline: &Baseline, threshold: f64) -> Result<Outcome, MissingLabel> {
    let correct = baseline.label(&score.subject, &score.property).ok_or_else(|| MissingLabel {
        subject: score.subject.clone(),
        property: score.property.clone(),
    })?;
    Ok(Outcome::of(score.weighted > threshold, correct))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalMetrics {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Ratios with a zero denominator are reported as 0.
pub fn metrics(outcomes: &[Outcome]) -> Result<EvalMetrics, EmptyEvaluation> {
    if outcomes.is_empty() {
        return Err(EmptyEvaluation);
    }
    let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count() as u64;
    let (tp, fp, tn, fn_) = (
        count(Outcome::TruePositive),
        count(Outcome::FalsePositive),
        count(Outcome::TrueNegative),
        count(Outcome::FalseNegative),
    );
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Ok(EvalMetrics { tp, fp, tn, fn_, precision, recall, f1 })
}

/// Recall of each source taken alone: a triple counts as confirmed by a
/// source when that source's similarity exceeds `threshold`.
pub fn recall_by_source(
    instances: &[InstanceScore],
    baseline: &Baseline,
    threshold: f64,
) -> BTreeMap<String, f64> {
    let mut outcomes: BTreeMap<String, Vec<Outcome>> = BTreeMap::new();
    for triple in instances.iter().flat_map(|i| &i.triples) {
        let Some(correct) = baseline.label(&triple.subject, &triple.property) else { continue };
        for e in &triple.per_source {
            outcomes.entry(e.source_id.clone()).or_default().push(Outcome::of(e.sim > threshold, correct));
        }
    }
    outcomes.into_iter().filter_map(|(s, o)| Some((s, metrics(&o).ok()?.recall))).collect()
}

/// Everything the report carries about a run's agreement with its baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationSummary {
    pub overall: Option<EvalMetrics>,
    pub per_property: BTreeMap<String, EvalMetrics>,
    pub recall_by_source: BTreeMap<String, f64>,
    /// Instance validity against the conjunction of the subject's labels.
    pub instance: Option<EvalMetrics>,
    pub notes: Vec<String>,
    /// Scored triples without a baseline label; left out of every count.
    pub unlabeled: u64,
}

pub fn evaluate(instances: &[InstanceScore], baseline: &Baseline, triple_threshold: f64) -> EvaluationSummary {
    let mut overall = Vec::new();
    let mut per_property: BTreeMap<String, Vec<Outcome>> = BTreeMap::new();
    let mut per_instance = Vec::new();
    let mut unlabeled = 0;
    for instance in instances {
        let mut all_correct = true;
        let mut fully_labeled = true;
        for triple in &instance.triples {
            match classify_triple(triple, baseline, triple_threshold) {
                Ok(outcome) => {
                    overall.push(outcome);
                    per_property.entry(triple.property.clone()).or_default().push(outcome);
                    all_correct &= matches!(outcome, Outcome::TruePositive | Outcome::FalseNegative);
                }
                Err(_) => {
                    unlabeled += 1;
                    fully_labeled = false;
                }
            }
        }
        if fully_labeled {
            per_instance.push(Outcome::of(instance.valid, all_correct));
        }
    }

    let mut notes = Vec::new();
    if unlabeled > 0 {
        notes.push(format!("{unlabeled} scored triples have no baseline label and were not evaluated"));
    }
    let mut annotate = |scope: &str, m: &EvalMetrics| {
        if m.tp + m.fp == 0 {
            notes.push(format!("{scope}: no positive predictions, precision reported as 0"));
        }
        if m.tp + m.fn_ == 0 {
            notes.push(format!("{scope}: no correct triples, recall reported as 0"));
        }
    };
    let overall = metrics(&overall).ok();
    if let Some(m) = &overall {
        annotate("overall", m);
    }
    let per_property: BTreeMap<String, EvalMetrics> =
        per_property.into_iter().filter_map(|(p, o)| Some((p, metrics(&o).ok()?))).collect();
    for (p, m) in &per_property {
        annotate(&format!("property `{p}`"), m);
    }
    let instance = metrics(&per_instance).ok();
    if let Some(m) = &instance {
        annotate("instances", m);
    }
    EvaluationSummary {
        overall,
        per_property,
        recall_by_source: recall_by_source(instances, baseline, triple_threshold),
        instance,
        notes,
        unlabeled,
    }
}
