//! RDF data model, Turtle-subset ingestion, SPARQL ingestion and the mapping of
//! raw KG data onto a domain specification's attribute space.

mod domain;
mod extract;
mod model;
pub mod sparql;
mod turtle;

use thiserror::Error;

pub use domain::{apply_aliases, DomainSpecification, RawAttributes, GEO_PROPERTY, KG_SOURCE_ID, NAME_PROPERTY};
pub use extract::{extract_instances, Excluded, Extraction, Instance, REASON_NO_MATCHING_PROPERTIES};
#[cfg(feature = "http")]
pub(crate) use model::local_name;
pub use model::{GeoPoint, Iri, KnowledgeGraph, Origin, Term, Triple, RDF_TYPE};
pub use turtle::{parse_turtle, serialize_turtle};

#[derive(Debug, Error)]
pub enum KgError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unknown prefix `{0}:`")]
    UnknownPrefix(String),
    #[error("invalid IRI `{0}`")]
    InvalidIri(String),
    #[error("coordinates out of range: lat {lat}, lon {lon}")]
    CoordinateRange { lat: f64, lon: f64 },
    #[error("invalid domain specification: {0}")]
    DomainSpec(String),
    #[error("limit must be greater than zero")]
    InvalidLimit,
    #[error("network error: {0}")]
    Network(String),
    #[error("SPARQL endpoint timed out; retry with a smaller limit")]
    EndpointTimeout,
    #[error("malformed SPARQL results: {0}")]
    Results(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
