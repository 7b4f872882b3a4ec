use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::KgError;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// An absolute IRI. Prefixed names are expanded before an `Iri` is built.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, KgError> {
        let value = value.into();
        if value.is_empty() || !value.contains("://") || value.chars().any(char::is_whitespace) {
            return Err(KgError::InvalidIri(value));
        }
        Ok(Iri(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The fragment or last path segment, e.g. `telephone` for `http://schema.org/telephone`.
    pub fn local_name(&self) -> &str {
        local_name(&self.0)
    }
}

pub(crate) fn local_name(iri: &str) -> &str {
    let trimmed = iri.trim_end_matches(['/', '#']);
    match trimmed.rfind(['#', '/']) {
        Some(i) => &trimmed[i + 1..],
        None => trimmed,
    }
}

impl TryFrom<String> for Iri {
    type Error = KgError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl From<Iri> for String {
    fn from(iri: Iri) -> Self {
        iri.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    /// Lexical form only; datatypes and language tags are not retained.
    Literal(String),
}

impl Term {
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(iri) => iri.as_str(),
            Term::Literal(s) => s,
        }
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: Term) -> Self {
        Triple { subject, predicate, object }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    TurtleFile,
    SparqlEndpoint,
}

/// A deduplicated set of triples, in first-seen order.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    triples: Vec<Triple>,
    origin: Origin,
}

impl KnowledgeGraph {
    pub fn from_triples(triples: impl IntoIterator<Item = Triple>, origin: Origin) -> Self {
        let mut seen = HashSet::new();
        let triples = triples
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();
        KnowledgeGraph { triples, origin }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Distinct subjects in order of first appearance.
    pub fn subjects(&self) -> Vec<&Iri> {
        let mut seen = HashSet::new();
        self.triples
            .iter()
            .map(|t| &t.subject)
            .filter(|s| seen.insert(*s))
            .collect()
    }
}

/// WGS84 coordinate in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, KgError> {
        let point = GeoPoint { lat, lon };
        if point.in_range() {
            Ok(point)
        } else {
            Err(KgError::CoordinateRange { lat, lon })
        }
    }

    pub fn in_range(&self) -> bool {
        (-90.0..=90.0).contains(&self.lat) && (-180.0..=180.0).contains(&self.lon)
    }
}
