use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::{sort_by_distance, KnowledgeSource, SourceError, SourceRecord};
use crate::kg::{DomainSpecification, GeoPoint, RawAttributes};
use crate::matching::normalize::{normalize, NormalizerKind};
use crate::matching::MatchQuery;

#[derive(Debug, Error)]
#[error("fixture {path}: {detail}")]
pub struct FixtureFormatError {
    pub path: PathBuf,
    pub detail: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "camelCase")]
struct FixtureFile {
    source_id: String,
    records: Vec<FixtureRecord>,
}

#[derive(Debug, Clone, Deserialize)]
struct FixtureRecord {
    id: String,
    name: String,
    #[serde(default)]
    lat: Option<f64>,
    #[serde(default)]
    lon: Option<f64>,
    #[serde(default)]
    properties: RawAttributes,
}

/// Immutable in-memory snapshot of a source, loaded from a JSON fixture file.
#[derive(Debug, Clone)]
pub struct FixtureSource {
    id: String,
    raw: Vec<FixtureRecord>,
    entries: Vec<(String, SourceRecord)>,
}

impl FixtureSource {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, FixtureFormatError> {
        let path = path.as_ref();
        let fail = |detail: String| FixtureFormatError { path: path.to_path_buf(), detail };
        let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
        let file: FixtureFile = serde_json::from_str(&text).map_err(|e| fail(e.to_string()))?;
        for (i, r) in file.records.iter().enumerate() {
            if r.id.trim().is_empty() {
                return Err(fail(format!("record {i} has an empty id")));
            }
            if r.name.trim().is_empty() {
                return Err(fail(format!("record `{}` has an empty name", r.id)));
            }
            match (r.lat, r.lon) {
                (None, None) => {}
                (Some(lat), Some(lon)) => {
                    GeoPoint::new(lat, lon).map_err(|e| fail(format!("record `{}`: {e}", r.id)))?;
                }
                _ => return Err(fail(format!("record `{}` has only one of lat/lon", r.id))),
            }
        }
        let mut source = FixtureSource { id: file.source_id, raw: file.records, entries: Vec::new() };
        source.rebuild(None);
        Ok(source)
    }

    /// Registers the snapshot under a different source id.
    pub fn with_id(mut self, id: &str) -> Self {
        if self.id != id {
            self.id = id.to_owned();
            self.rebuild(None);
        }
        self
    }

    /// Maps record properties onto the specification's property names.
    pub fn with_domain(mut self, ds: &DomainSpecification) -> Self {
        self.rebuild(Some(ds));
        self
    }

    fn rebuild(&mut self, ds: Option<&DomainSpecification>) {
        self.entries = self
            .raw
            .iter()
            .map(|r| {
                let geo = r.lat.zip(r.lon).map(|(lat, lon)| GeoPoint { lat, lon });
                let record = SourceRecord::mapped(r.id.clone(), &r.name, geo, &r.properties, &self.id, ds);
                (normalize(&record.name, NormalizerKind::Name), record)
            })
            .collect();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &SourceRecord> {
        self.entries.iter().map(|(_, r)| r)
    }
}

impl KnowledgeSource for FixtureSource {
    fn id(&self) -> &str {
        &self.id
    }

    /// Linear scan: normalized name equality plus the radius when both sides
    /// carry coordinates.
    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        let mut hits: Vec<SourceRecord> = self
            .entries
            .iter()
            .filter(|(name, _)| query.name.as_ref().is_none_or(|q| q == name))
            .filter(|(_, r)| r.distance_to(query).is_none_or(|d| d <= query.radius_m))
            .map(|(_, r)| r.clone())
            .collect();
        sort_by_distance(&mut hits, query);
        Ok(hits)
    }
}
