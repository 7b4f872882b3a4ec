//! ingest → map → match → score → classify → report.

mod config;
mod report;
mod run;

pub use config::{ConfigError, InputSpec, RunConfig, SimilaritySpec, SparqlInput};
pub use report::{
    round4, to_canonical_string, write_report, ConfigEcho, InstanceReport, MatchSummary, ReportFormat, RescoreError,
    SourceEcho, Skipped, Timing, ValidationReport,
};
pub use run::{
    ingest, validate_kg, validate_with_sources, PipelineError, Validator, REASON_INSUFFICIENT_MATCHING,
    REASON_NO_SCORED_PROPERTIES,
};
