use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use thiserror::Error;

use super::config::{ConfigError, InputSpec, RunConfig};
use super::report::{ConfigEcho, InstanceReport, MatchSummary, Skipped, SourceEcho, Timing, ValidationReport};
use crate::confidence::{instance_confidence, triple_confidence, SimilarityFunction, SourceRegistry, SourceValues};
use crate::evaluation::{Baseline, BaselineError};
use crate::kg::{extract_instances, parse_turtle, DomainSpecification, Instance, KgError, KnowledgeGraph};
use crate::matching::{match_instance, MatchQuery, MatchResult};
use crate::sources::{KnowledgeSource, OpenError};

pub const REASON_INSUFFICIENT_MATCHING: &str = "insufficient matching properties";
pub const REASON_NO_SCORED_PROPERTIES: &str = "no values for the selected properties";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Source(#[from] OpenError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("ingestion failed: {0}")]
    Ingest(#[from] KgError),
}

impl PipelineError {
    /// Whether the run configuration (or a file it names) is at fault.
    pub fn is_config(&self) -> bool {
        matches!(self, PipelineError::Config(_) | PipelineError::Source(_) | PipelineError::Baseline(_))
    }
}

/// Loads the input KG named by the configuration.
pub fn ingest(config: &RunConfig, ds: &DomainSpecification) -> Result<KnowledgeGraph, PipelineError> {
    match &config.input {
        InputSpec::Turtle(path) => {
            let path = config.resolve(path);
            let text = std::fs::read_to_string(&path)
                .map_err(|source| PipelineError::Io { path: path.display().to_string(), source })?;
            Ok(parse_turtle(&text)?)
        }
        #[cfg(feature = "http")]
        InputSpec::Sparql(s) => {
            let options = crate::kg::sparql::FetchOptions {
                cache_dir: config.cache_dir.as_ref().map(|d| config.resolve(d)),
                ..Default::default()
            };
            Ok(crate::kg::sparql::fetch_sparql_with(&s.endpoint, ds, s.limit, &options)?)
        }
        #[cfg(not(feature = "http"))]
        InputSpec::Sparql(_) => {
            let _ = ds;
            Err(PipelineError::Ingest(KgError::Network("this build has no HTTP support".into())))
        }
    }
}

/// Runs the whole pipeline for a configuration file's settings.
pub fn validate_kg(config: &RunConfig) -> Result<ValidationReport, PipelineError> {
    let ds = config.load_domain_spec()?;
    let cache_dir = config.cache_dir.as_ref().map(|d| config.resolve(d));
    let sources = config
        .sources
        .iter()
        .map(|h| h.open(&ds, &config.base_dir, cache_dir.as_deref()))
        .collect::<Result<Vec<_>, _>>()?;
    validate_with_sources(config, &ds, sources)
}

/// Like [`validate_kg`] with already opened sources, in configuration order.
pub fn validate_with_sources(
    config: &RunConfig,
    ds: &DomainSpecification,
    sources: Vec<Arc<dyn KnowledgeSource>>,
) -> Result<ValidationReport, PipelineError> {
    let started_at = now();
    let baseline = config.baseline.as_ref().map(|b| Baseline::load(config.resolve(b))).transpose()?;

    let t0 = Instant::now();
    let kg = ingest(config, ds)?;
    let extraction = extract_instances(&kg, ds);
    let ingest_ms = elapsed_ms(t0);

    let t1 = Instant::now();
    let validator = Validator::new(config, ds, sources)?;
    let outcomes = validator.run(&extraction.instances, config.worker_count());
    let match_ms = elapsed_ms(t1);

    let mut instances = Vec::new();
    let mut skipped: Vec<Skipped> = extraction
        .excluded
        .iter()
        .map(|e| Skipped { subject: e.subject.as_str().to_owned(), reason: e.reason.clone() })
        .collect();
    for outcome in outcomes {
        match outcome {
            Ok(i) => instances.push(i),
            Err(s) => skipped.push(s),
        }
    }
    skipped.sort_by(|a, b| a.subject.cmp(&b.subject));

    let mut report = ValidationReport {
        run_id: uuid::Uuid::new_v4().to_string(),
        started_at,
        finished_at: String::new(),
        config: validator.echo(config),
        instances,
        skipped,
        metrics: None,
        timing: Timing { ingest_ms, match_ms, evaluate_ms: 0 },
        rescore_version: 0,
        baseline,
    };
    let t2 = Instant::now();
    report.evaluate();
    report.timing.evaluate_ms = elapsed_ms(t2);
    report.finished_at = now();
    Ok(report)
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn elapsed_ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Everything needed to score one instance; shared read-only by the workers.
pub struct Validator {
    ds: DomainSpecification,
    properties: Vec<(String, SimilarityFunction)>,
    registry: SourceRegistry,
    sources: Vec<Arc<dyn KnowledgeSource>>,
    radius_m: f64,
    threshold: f64,
    config: RunConfig,
}

impl Validator {
    pub fn new(
        config: &RunConfig,
        ds: &DomainSpecification,
        sources: Vec<Arc<dyn KnowledgeSource>>,
    ) -> Result<Self, ConfigError> {
        let registry = config.registry()?;
        if sources.len() != registry.len() {
            return Err(ConfigError::Invalid(format!(
                "{} sources opened for {} configured",
                sources.len(),
                registry.len()
            )));
        }
        let properties =
            config.selected_properties(ds).into_iter().map(|p| (p.clone(), config.similarity_for(&p))).collect();
        Ok(Validator {
            ds: ds.clone(),
            properties,
            registry,
            sources,
            radius_m: config.radius_m,
            threshold: config.threshold,
            config: config.clone(),
        })
    }

    fn echo(&self, config: &RunConfig) -> ConfigEcho {
        ConfigEcho {
            domain_spec: self.ds.name.clone(),
            input: config.input.label().to_owned(),
            properties: self.properties.iter().map(|(p, _)| p.clone()).collect(),
            radius_m: self.radius_m,
            similarity: self.properties.iter().cloned().collect(),
            sources: config.sources.iter().map(|s| SourceEcho { id: s.id.clone(), kind: s.kind }).collect(),
            threshold: self.threshold,
            triple_threshold: config.triple_threshold,
            weights: self.registry.weights().to_vec(),
        }
    }

    /// Matches and scores one instance, or says why it was skipped.
    pub fn validate_instance(&self, instance: &Instance) -> Result<InstanceReport, Skipped> {
        let subject = instance.id.as_str();
        let skip = |reason: &str| Skipped { subject: subject.to_owned(), reason: reason.to_owned() };
        let query = MatchQuery::for_instance(instance, &self.ds, self.radius_m, |p| self.config.normalizer_for(p))
            .map_err(|_| skip(REASON_INSUFFICIENT_MATCHING))?;
        let matches: Vec<MatchResult> = self.sources.iter().map(|s| match_instance(&query, s.as_ref())).collect();

        let empty: Vec<String> = Vec::new();
        let mut triples = Vec::new();
        for (property, f) in &self.properties {
            let Some(kg_values) = instance.attributes.get(property).filter(|v| !v.is_empty()) else { continue };
            let evidence: Vec<SourceValues<'_>> = matches
                .iter()
                .map(|m| SourceValues {
                    source_id: &m.source_id,
                    matched: m.matched,
                    values: m.candidate.as_ref().and_then(|c| c.properties.get(property)).unwrap_or(&empty),
                })
                .collect();
            triples.push(triple_confidence(subject, property, kg_values, &evidence, *f, &self.registry));
        }
        let score = instance_confidence(subject, triples, self.threshold).map_err(|_| skip(REASON_NO_SCORED_PROPERTIES))?;
        Ok(InstanceReport { score, matches: matches.iter().map(MatchSummary::from).collect() })
    }

    /// Validates all instances on `workers` threads; output keeps input order.
    pub fn run(&self, instances: &[Instance], workers: usize) -> Vec<Result<InstanceReport, Skipped>> {
        let workers = workers.clamp(1, instances.len().max(1));
        if workers == 1 {
            return instances.iter().map(|i| self.validate_instance(i)).collect();
        }
        let next = AtomicUsize::new(0);
        let mut done: Vec<(usize, Result<InstanceReport, Skipped>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut local = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(instance) = instances.get(i) else { break };
                            local.push((i, self.validate_instance(instance)));
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("validation worker panicked")).collect()
        });
        done.sort_by_key(|(i, _)| *i);
        done.into_iter().map(|(_, r)| r).collect()
    }
}
