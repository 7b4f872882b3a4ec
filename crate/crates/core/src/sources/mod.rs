//! Knowledge-source connectors. Every connector answers a [`MatchQuery`] with
//! records whose properties are already mapped onto the domain
//! specification's property names.

mod cache;
mod fixture;
#[cfg(feature = "http")]
mod http;
#[cfg(feature = "http")]
mod places;
mod ratelimit;
#[cfg(feature = "http")]
mod sparql;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{apply_aliases, DomainSpecification, GeoPoint, RawAttributes, NAME_PROPERTY};
use crate::matching::geo::haversine_unchecked;
use crate::matching::MatchQuery;

pub use cache::{CacheEntry, CachedSource};
#[cfg(feature = "http")]
pub(crate) use cache::write_atomically;
pub use fixture::{FixtureFormatError, FixtureSource};
#[cfg(feature = "http")]
pub use places::PlacesHttpSource;
pub use ratelimit::{Clock, RateLimiter, SystemClock, VirtualClock};
#[cfg(feature = "http")]
pub use sparql::SparqlHttpSource;

pub const DEFAULT_RATE_LIMIT: u32 = 5;

/// One instance held by an external source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceRecord {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub geo: Option<GeoPoint>,
    #[serde(default)]
    pub properties: RawAttributes,
}

impl SourceRecord {
    /// Builds a record from raw source attributes: values are trimmed, keys are
    /// alias-mapped, and the record name is listed first under `name`.
    pub fn mapped(
        id: impl Into<String>,
        name: &str,
        geo: Option<GeoPoint>,
        raw: &RawAttributes,
        source_id: &str,
        ds: Option<&DomainSpecification>,
    ) -> Self {
        let cleaned: RawAttributes = raw
            .iter()
            .map(|(k, vs)| {
                let vs = vs.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).map(str::to_owned).collect();
                (k.clone(), vs)
            })
            .collect();
        let mut properties = match ds {
            Some(ds) => apply_aliases(&cleaned, source_id, ds),
            None => cleaned,
        };
        let name = name.trim();
        if !name.is_empty() && ds.is_none_or(|ds| ds.has_property(NAME_PROPERTY)) {
            properties.entry(NAME_PROPERTY.to_owned()).or_default().insert(0, name.to_owned());
        }
        properties.retain(|_, vs| !vs.is_empty());
        SourceRecord { id: id.into(), name: name.to_owned(), geo, properties }
    }

    pub fn distance_to(&self, query: &MatchQuery) -> Option<f64> {
        Some(haversine_unchecked(query.geo?, self.geo?))
    }
}

/// Orders records by ascending distance to the query, then record id.
/// Records without a distance sort after located ones.
pub fn sort_by_distance(records: &mut [SourceRecord], query: &MatchQuery) {
    records.sort_by(|a, b| {
        let da = a.distance_to(query).unwrap_or(f64::INFINITY);
        let db = b.distance_to(query).unwrap_or(f64::INFINITY);
        da.total_cmp(&db).then_with(|| a.id.cmp(&b.id))
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceErrorKind {
    Network,
    Auth,
    Parse,
    RateLimited,
}

impl fmt::Display for SourceErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceErrorKind::Network => "network error",
            SourceErrorKind::Auth => "authentication failed",
            SourceErrorKind::Parse => "unparsable response",
            SourceErrorKind::RateLimited => "rate limited",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("source `{source_id}`: {kind}: {message}")]
pub struct SourceError {
    pub source_id: String,
    pub kind: SourceErrorKind,
    pub message: String,
}

impl SourceError {
    pub fn new(source_id: impl Into<String>, kind: SourceErrorKind, message: impl Into<String>) -> Self {
        SourceError { source_id: source_id.into(), kind, message: message.into() }
    }
}

/// An external knowledge source that can be searched for match candidates.
pub trait KnowledgeSource: Send + Sync {
    fn id(&self) -> &str;

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError>;
}

impl<S: KnowledgeSource + ?Sized> KnowledgeSource for Arc<S> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        (**self).search(query)
    }
}

impl<S: KnowledgeSource + ?Sized> KnowledgeSource for Box<S> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        (**self).search(query)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Fixture,
    PlacesHttp,
    SparqlHttp,
}

/// Configuration of one knowledge source as it appears in a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceHandle {
    pub id: String,
    pub kind: SourceKind,
    /// URL for HTTP kinds, file path for fixtures.
    pub endpoint: String,
    /// Name of the environment variable holding the API key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
    #[serde(default = "default_rate_limit")]
    pub rate_limit: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<String>,
    /// SPARQL query template for `sparql-http` sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_template: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
}

fn default_rate_limit() -> u32 {
    DEFAULT_RATE_LIMIT
}

#[derive(Debug, Error)]
pub enum OpenError {
    #[error(transparent)]
    Fixture(#[from] FixtureFormatError),
    #[error("source `{0}`: rate limit must be greater than zero")]
    RateLimit(String),
    #[error("source `{id}`: environment variable `{var}` is not set")]
    MissingApiKey { id: String, var: String },
    #[error("source `{0}`: this build has no HTTP support")]
    HttpDisabled(String),
    #[error("source `{id}`: {message}")]
    Invalid { id: String, message: String },
}

impl SourceHandle {
    pub fn fixture(id: impl Into<String>, path: impl Into<String>) -> Self {
        SourceHandle {
            id: id.into(),
            kind: SourceKind::Fixture,
            endpoint: path.into(),
            api_key_env: None,
            rate_limit: DEFAULT_RATE_LIMIT,
            cache_dir: None,
            query_template: None,
            timeout_ms: None,
        }
    }

    /// Builds the connector. Relative fixture and cache paths resolve against
    /// `base_dir`; `cache_dir` applies when the handle does not name its own.
    pub fn open(
        &self,
        ds: &DomainSpecification,
        base_dir: &Path,
        cache_dir: Option<&Path>,
    ) -> Result<Arc<dyn KnowledgeSource>, OpenError> {
        match self.kind {
            SourceKind::Fixture => {
                let source = FixtureSource::load(base_dir.join(&self.endpoint))?.with_id(&self.id).with_domain(ds);
                Ok(Arc::new(source))
            }
            SourceKind::PlacesHttp | SourceKind::SparqlHttp => self.open_http(ds, base_dir, cache_dir),
        }
    }

    #[cfg(feature = "http")]
    fn open_http(
        &self,
        ds: &DomainSpecification,
        base_dir: &Path,
        cache_dir: Option<&Path>,
    ) -> Result<Arc<dyn KnowledgeSource>, OpenError> {
        if self.rate_limit == 0 {
            return Err(OpenError::RateLimit(self.id.clone()));
        }
        url::Url::parse(&self.endpoint).map_err(|e| OpenError::Invalid {
            id: self.id.clone(),
            message: format!("invalid endpoint URL: {e}"),
        })?;
        let api_key = match &self.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| OpenError::MissingApiKey {
                id: self.id.clone(),
                var: var.clone(),
            })?),
            None => None,
        };
        let limiter = RateLimiter::new(self.rate_limit, Arc::new(SystemClock::new()));
        let timeout = std::time::Duration::from_millis(self.timeout_ms.unwrap_or(30_000));
        let source: Arc<dyn KnowledgeSource> = match self.kind {
            SourceKind::PlacesHttp => Arc::new(PlacesHttpSource::new(
                &self.id,
                &self.endpoint,
                api_key,
                ds.clone(),
                limiter,
                timeout,
            )),
            _ => Arc::new(SparqlHttpSource::new(
                &self.id,
                &self.endpoint,
                self.query_template.clone(),
                ds.clone(),
                limiter,
                timeout,
            )),
        };
        let dir = self.cache_dir.as_ref().map(|d| base_dir.join(d)).or_else(|| cache_dir.map(Path::to_path_buf));
        Ok(match dir {
            Some(dir) => Arc::new(CachedSource::new(source, dir)),
            None => source,
        })
    }

    #[cfg(not(feature = "http"))]
    fn open_http(
        &self,
        _ds: &DomainSpecification,
        _base_dir: &Path,
        _cache_dir: Option<&Path>,
    ) -> Result<Arc<dyn KnowledgeSource>, OpenError> {
        Err(OpenError::HttpDisabled(self.id.clone()))
    }
}
