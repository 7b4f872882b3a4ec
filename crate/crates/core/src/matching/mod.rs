//! Strict cross-source instance matching on normalized property values.

pub mod geo;
pub mod normalize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{DomainSpecification, GeoPoint, Instance, GEO_PROPERTY, NAME_PROPERTY};
use crate::sources::{KnowledgeSource, SourceRecord};
use normalize::{normalize, NormalizerKind};

pub use geo::{haversine, RangeError, EARTH_RADIUS_M};

pub const DEFAULT_RADIUS_M: f64 = 500.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvalidQuery {
    #[error("a match query needs at least two populated fields, got {0}")]
    TooFewFields(usize),
    #[error("radius must be a positive number of meters, got {0}")]
    Radius(f64),
}

/// A normalized value a candidate must carry, plus the normalizer to apply
/// to the candidate's values before comparing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraValue {
    pub value: String,
    pub normalizer: NormalizerKind,
}

impl ExtraValue {
    pub fn new(value: &str, normalizer: NormalizerKind) -> Self {
        ExtraValue { value: normalize(value, normalizer), normalizer }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchQuery {
    /// Already normalized with [`NormalizerKind::Name`].
    pub name: Option<String>,
    pub geo: Option<GeoPoint>,
    pub radius_m: f64,
    pub extra: BTreeMap<String, ExtraValue>,
}

impl MatchQuery {
    /// `name` is normalized here; empty names count as absent.
    pub fn new(
        name: Option<String>,
        geo: Option<GeoPoint>,
        radius_m: f64,
        extra: BTreeMap<String, ExtraValue>,
    ) -> Result<Self, InvalidQuery> {
        if !(radius_m.is_finite() && radius_m > 0.0) {
            return Err(InvalidQuery::Radius(radius_m));
        }
        let name = name.map(|n| normalize(&n, NormalizerKind::Name)).filter(|n| !n.is_empty());
        let extra: BTreeMap<_, _> = extra.into_iter().filter(|(_, v)| !v.value.is_empty()).collect();
        let populated = usize::from(name.is_some()) + usize::from(geo.is_some()) + extra.len();
        if populated < 2 {
            return Err(InvalidQuery::TooFewFields(populated));
        }
        Ok(MatchQuery { name, geo, radius_m, extra })
    }

    /// Builds the query from an instance's matching properties. `normalizer`
    /// picks the normalizer for properties other than name and geo.
    pub fn for_instance(
        instance: &Instance,
        ds: &DomainSpecification,
        radius_m: f64,
        normalizer: impl Fn(&str) -> NormalizerKind,
    ) -> Result<Self, InvalidQuery> {
        let mut name = None;
        let mut geo = None;
        let mut extra = BTreeMap::new();
        for p in &ds.matching_properties {
            match p.as_str() {
                GEO_PROPERTY => geo = instance.geo,
                NAME_PROPERTY => name = instance.first(p).map(str::to_owned),
                _ => {
                    if let Some(v) = instance.first(p) {
                        extra.insert(p.clone(), ExtraValue::new(v, normalizer(p)));
                    }
                }
            }
        }
        MatchQuery::new(name, geo, radius_m, extra)
    }

    /// Whether `record` satisfies every hard constraint of the query.
    pub fn accepts(&self, record: &SourceRecord) -> bool {
        if let Some(name) = &self.name {
            if normalize(&record.name, NormalizerKind::Name) != *name {
                return false;
            }
        }
        if record.distance_to(self).is_some_and(|d| d > self.radius_m) {
            return false;
        }
        self.extra.iter().all(|(p, want)| {
            record
                .properties
                .get(p)
                .is_some_and(|vs| vs.iter().any(|v| normalize(v, want.normalizer) == want.value))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MatchResult {
    pub source_id: String,
    pub matched: bool,
    pub candidate: Option<SourceRecord>,
    pub distance_m: Option<f64>,
    pub candidates_considered: usize,
    pub error: Option<String>,
}

/// Searches `source` and keeps the nearest candidate passing every
/// constraint (ties by record id). Source errors become an unmatched result.
pub fn match_instance(query: &MatchQuery, source: &dyn KnowledgeSource) -> MatchResult {
    let candidates = match source.search(query) {
        Ok(c) => c,
        Err(e) => {
            return MatchResult {
                source_id: source.id().to_owned(),
                matched: false,
                candidate: None,
                distance_m: None,
                candidates_considered: 0,
                error: Some(e.to_string()),
            }
        }
    };
    let best = candidates
        .iter()
        .filter(|r| query.accepts(r))
        .map(|r| (r.distance_to(query), r))
        .min_by(|(da, a), (db, b)| {
            da.unwrap_or(f64::INFINITY).total_cmp(&db.unwrap_or(f64::INFINITY)).then_with(|| a.id.cmp(&b.id))
        });
    MatchResult {
        source_id: source.id().to_owned(),
        matched: best.is_some(),
        distance_m: best.and_then(|(d, _)| d),
        candidate: best.map(|(_, r)| r.clone()),
        candidates_considered: candidates.len(),
        error: None,
    }
}
