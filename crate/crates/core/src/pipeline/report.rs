use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::confidence::{InstanceScore, SimilarityFunction, SourceRegistry};
use crate::evaluation::{evaluate, Baseline, EvaluationSummary};
use crate::matching::MatchResult;
use crate::sources::SourceKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEcho {
    pub id: String,
    pub kind: SourceKind,
}

/// The settings a report's scores depend on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfigEcho {
    pub domain_spec: String,
    pub input: String,
    pub properties: Vec<String>,
    pub radius_m: f64,
    pub similarity: BTreeMap<String, SimilarityFunction>,
    pub sources: Vec<SourceEcho>,
    pub threshold: f64,
    pub triple_threshold: f64,
    /// Normalized to sum to 1.
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchSummary {
    pub source_id: String,
    pub matched: bool,
    pub record_id: Option<String>,
    pub distance_m: Option<f64>,
    pub candidates_considered: usize,
    pub error: Option<String>,
}

impl From<&MatchResult> for MatchSummary {
    fn from(m: &MatchResult) -> Self {
        MatchSummary {
            source_id: m.source_id.clone(),
            matched: m.matched,
            record_id: m.candidate.as_ref().map(|c| c.id.clone()),
            distance_m: m.distance_m,
            candidates_considered: m.candidates_considered,
            error: m.error.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    #[serde(flatten)]
    pub score: InstanceScore,
    pub matches: Vec<MatchSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub subject: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Timing {
    pub ingest_ms: u64,
    pub match_ms: u64,
    pub evaluate_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub run_id: String,
    pub started_at: String,
    pub finished_at: String,
    pub config: ConfigEcho,
    pub instances: Vec<InstanceReport>,
    pub skipped: Vec<Skipped>,
    pub metrics: Option<EvaluationSummary>,
    pub timing: Timing,
    /// Incremented by every [`ValidationReport::rescore`].
    pub rescore_version: u64,
    #[serde(skip)]
    pub baseline: Option<Baseline>,
}

/// Fields that vary between otherwise identical runs.
const VOLATILE: [&str; 5] = ["runId", "startedAt", "finishedAt", "timing", "rescoreVersion"];

#[derive(Debug, Error)]
pub enum RescoreError {
    #[error("{0}")]
    Weights(String),
    #[error("threshold must lie in [0, 1], got {0}")]
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    CsvSummary,
}

impl ValidationReport {
    /// Recomputes every score from the stored per-source similarities.
    pub fn rescore(&mut self, weights: Option<&[f64]>, threshold: Option<f64>) -> Result<(), RescoreError> {
        let threshold = threshold.unwrap_or(self.config.threshold);
        if !(0.0..=1.0).contains(&threshold) {
            return Err(RescoreError::Threshold(threshold));
        }
        let ids = self.config.sources.iter().map(|s| s.id.clone()).collect();
        let registry = match weights {
            Some(w) => SourceRegistry::new(ids, Some(w)),
            None => SourceRegistry::new(ids, Some(&self.config.weights)),
        }
        .map_err(|e| RescoreError::Weights(e.to_string()))?;
        for instance in &mut self.instances {
            instance.score.rescore(&registry, threshold);
        }
        self.config.weights = registry.weights().to_vec();
        self.config.threshold = threshold;
        self.evaluate();
        self.rescore_version += 1;
        Ok(())
    }

    pub(crate) fn evaluate(&mut self) {
        self.metrics = self.baseline.as_ref().map(|b| {
            let scores: Vec<InstanceScore> = self.instances.iter().map(|i| i.score.clone()).collect();
            evaluate(&scores, b, self.config.triple_threshold)
        });
    }

    /// Sorted keys, scores rounded to 4 decimals, run metadata left out.
    pub fn canonical_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("reports serialize");
        if let Value::Object(map) = &mut value {
            for key in VOLATILE {
                map.remove(key);
            }
        }
        to_canonical_string(&value)
    }

    pub fn to_json_pretty(&self) -> String {
        to_canonical_string(&serde_json::to_value(self).expect("reports serialize"))
    }

    /// `subject,confidence,valid` with one line per scored instance.
    pub fn csv_summary(&self) -> String {
        let mut out = String::from("subject,confidence,valid\n");
        for i in &self.instances {
            out.push_str(&format!("{},{:?},{}\n", csv_field(&i.score.subject), round4(i.score.confidence), i.score.valid));
        }
        out
    }

    /// `property,precision,recall,f1` in report property order.
    pub fn metrics_csv(&self) -> Option<String> {
        let m = self.metrics.as_ref()?;
        let mut out = String::from("property,precision,recall,f1\n");
        for p in &self.config.properties {
            if let Some(x) = m.per_property.get(p) {
                out.push_str(&format!(
                    "{},{:?},{:?},{:?}\n",
                    csv_field(p),
                    round4(x.precision),
                    round4(x.recall),
                    round4(x.f1)
                ));
            }
        }
        Some(out)
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.canonical_json(),
            ReportFormat::CsvSummary => self.csv_summary(),
        }
    }
}

pub fn write_report(report: &ValidationReport, path: impl AsRef<Path>, format: ReportFormat) -> std::io::Result<()> {
    std::fs::write(path, report.render(format))
}

/// Half-up rounding to 4 decimals.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0 + 0.5).floor() / 10_000.0
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Pretty JSON with sorted keys and every float rounded to 4 decimals.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(&canonicalize(value)).expect("values serialize");
    out.push('\n');
    out
}

fn canonicalize(value: &Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round4(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.iter().map(canonicalize).collect()),
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            let mut sorted = Map::new();
            for (k, v) in entries {
                sorted.insert(k.clone(), canonicalize(v));
            }
            Value::Object(sorted)
        }
        other => other.clone(),
    }
}
