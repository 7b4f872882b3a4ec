use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::confidence::{SimilarityFunction, SimilarityKind, SourceRegistry, DEFAULT_THRESHOLD};
use crate::kg::DomainSpecification;
use crate::matching::normalize::NormalizerKind;
use crate::matching::DEFAULT_RADIUS_M;
use crate::sources::SourceHandle;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid run configuration: {0}")]
    Parse(String),
    #[error("invalid run configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SparqlInput {
    pub endpoint: String,
    pub limit: usize,
}

/// Where the KG comes from: a Turtle file or a SPARQL endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InputSpec {
    Turtle(String),
    Sparql(SparqlInput),
}

impl InputSpec {
    /// The value echoed into reports.
    pub fn label(&self) -> &str {
        match self {
            InputSpec::Turtle(path) => path,
            InputSpec::Sparql(s) => &s.endpoint,
        }
    }
}

/// Similarity choice for one property; the normalizer defaults by property name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilaritySpec {
    pub kind: SimilarityKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<NormalizerKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputSpec,
    /// Path of the domain specification file.
    pub domain_spec: String,
    pub sources: Vec<SourceHandle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_threshold")]
    pub triple_threshold: f64,
    #[serde(default = "default_radius")]
    pub radius_m: f64,
    #[serde(default)]
    pub similarity: BTreeMap<String, SimilaritySpec>,
    /// Subset of the specification's properties to score; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concurrency: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<String>,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_radius() -> f64 {
    DEFAULT_RADIUS_M
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.base_dir = base_dir.into();
        config.check()?;
        Ok(config)
    }

    /// Checks everything that does not need the file system.
    pub fn check(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        for (name, t) in [("threshold", self.threshold), ("tripleThreshold", self.triple_threshold)] {
            if !(0.0..=1.0).contains(&t) {
                return invalid(format!("{name} must lie in [0, 1], got {t}"));
            }
        }
        if !(self.radius_m.is_finite() && self.radius_m > 0.0) {
            return invalid(format!("radiusM must be positive, got {}", self.radius_m));
        }
        if self.concurrency == Some(0) {
            return invalid("concurrency must be at least 1".into());
        }
        if let InputSpec::Sparql(s) = &self.input {
            if s.limit == 0 {
                return invalid("input.sparql.limit must be positive".into());
            }
        }
        self.registry()?;
        Ok(())
    }

    pub fn registry(&self) -> Result<SourceRegistry, ConfigError> {
        let ids = self.sources.iter().map(|s| s.id.clone()).collect();
        SourceRegistry::new(ids, self.weights.as_deref()).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }

    pub fn load_domain_spec(&self) -> Result<DomainSpecification, ConfigError> {
        let ds = DomainSpecification::load(self.resolve(&self.domain_spec))
            .map_err(|e| ConfigError::Invalid(format!("domain specification: {e}")))?;
        if let Some(props) = &self.properties {
            if props.is_empty() {
                return Err(ConfigError::Invalid("properties must not be empty".into()));
            }
            if let Some(p) = props.iter().find(|p| !ds.has_property(p)) {
                return Err(ConfigError::Invalid(format!("property `{p}` is not in domain specification `{}`", ds.name)));
            }
        }
        if let Some(p) = self.similarity.keys().find(|p| !ds.has_property(p)) {
            return Err(ConfigError::Invalid(format!("similarity given for unknown property `{p}`")));
        }
        Ok(ds)
    }

    /// Selected properties in specification order.
    pub fn selected_properties(&self, ds: &DomainSpecification) -> Vec<String> {
        ds.properties
            .iter()
            .filter(|p| self.properties.as_ref().is_none_or(|sel| sel.contains(p)))
            .cloned()
            .collect()
    }

    pub fn similarity_for(&self, property: &str) -> SimilarityFunction {
        match self.similarity.get(property) {
            Some(spec) => SimilarityFunction::new(
                spec.kind,
                spec.normalizer.unwrap_or_else(|| NormalizerKind::for_property(property)),
            ),
            None => SimilarityFunction::for_property(property),
        }
    }

    pub fn normalizer_for(&self, property: &str) -> NormalizerKind {
        self.similarity_for(property).normalizer
    }

    pub fn worker_count(&self) -> usize {
        self.concurrency
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"input":{"turtle":"kg.ttl"},"domainSpec":"ds.json",
        "sources":[{"id":"a","kind":"fixture","endpoint":"a.json"}]}"#;

    #[test]
    fn defaults() {
        let c = RunConfig::from_json(MINIMAL, "/tmp").unwrap();
        assert_eq!(c.threshold, 0.5);
        assert_eq!(c.triple_threshold, 0.5);
        assert_eq!(c.radius_m, 500.0);
        assert_eq!(c.input, InputSpec::Turtle("kg.ttl".into()));
        assert_eq!(c.resolve("kg.ttl"), Path::new("/tmp/kg.ttl"));
        assert_eq!(c.registry().unwrap().weights(), &[1.0]);
        assert_eq!(c.similarity_for("telephone").normalizer, NormalizerKind::Phone);
    }

    #[test]
    fn rejects_bad_values() {
        let with = |extra: &str| RunConfig::from_json(&MINIMAL.replacen('{', &format!("{{{extra},"), 1), ".");
        assert!(with(r#""threshold":1.5"#).is_err());
        assert!(with(r#""radiusM":0"#).is_err());
        assert!(with(r#""weights":[1,2]"#).is_err());
        assert!(with(r#""weights":[-1]"#).is_err());
        assert!(with(r#""concurrency":0"#).is_err());
        assert!(with(r#""colour":"blue""#).is_err());
        assert!(with(r#""threshold":0.7"#).is_ok());
    }

    #[test]
    fn sparql_input() {
        let c = RunConfig::from_json(
            &MINIMAL.replace(r#"{"turtle":"kg.ttl"}"#, r#"{"sparql":{"endpoint":"http://x/sparql","limit":10}}"#),
            ".",
        )
        .unwrap();
        assert_eq!(c.input.label(), "http://x/sparql");
    }
}
