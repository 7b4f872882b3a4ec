use std::time::Duration;

use serde_json::Value;

use super::http::PacedClient;
use super::{sort_by_distance, KnowledgeSource, RateLimiter, SourceError, SourceErrorKind, SourceRecord};
use crate::kg::{DomainSpecification, GeoPoint, RawAttributes};
use crate::matching::MatchQuery;

/// Nearby-search style JSON API answering
/// `GET endpoint?name=..&lat=..&lon=..&radius=..[&key=..]` with
/// `{"results": [{"id", "name", "lat", "lon", <property>: string | [string]}]}`.
#[derive(Debug)]
pub struct PlacesHttpSource {
    id: String,
    endpoint: String,
    api_key: Option<String>,
    ds: DomainSpecification,
    client: PacedClient,
}

impl PlacesHttpSource {
    pub fn new(
        id: &str,
        endpoint: &str,
        api_key: Option<String>,
        ds: DomainSpecification,
        limiter: RateLimiter,
        timeout: Duration,
    ) -> Self {
        PlacesHttpSource {
            id: id.to_owned(),
            endpoint: endpoint.to_owned(),
            api_key,
            ds,
            client: PacedClient::new(id, limiter, timeout),
        }
    }

    /// Delay before the single retry after HTTP 429.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.client.set_backoff(backoff);
        self
    }

    fn parse(&self, body: &str) -> Result<Vec<SourceRecord>, SourceError> {
        let parse_err = |m: String| self.client.error(SourceErrorKind::Parse, m);
        let doc: Value = serde_json::from_str(body).map_err(|e| parse_err(e.to_string()))?;
        let results = doc
            .get("results")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("missing `results` array".into()))?;
        results.iter().enumerate().map(|(i, hit)| self.record(i, hit).map_err(parse_err)).collect()
    }

    fn record(&self, index: usize, hit: &Value) -> Result<SourceRecord, String> {
        let obj = hit.as_object().ok_or(format!("result {index} is not an object"))?;
        let id = match obj.get("id") {
            Some(Value::String(s)) if !s.trim().is_empty() => s.trim().to_owned(),
            Some(Value::Number(n)) => n.to_string(),
            _ => return Err(format!("result {index} has no id")),
        };
        let name = obj.get("name").and_then(Value::as_str).ok_or(format!("result `{id}` has no name"))?;
        let coord = |k: &str| obj.get(k).and_then(|v| v.as_f64().or_else(|| v.as_str()?.trim().parse().ok()));
        let geo = match (coord("lat"), coord("lon")) {
            (Some(lat), Some(lon)) => Some(GeoPoint::new(lat, lon).map_err(|e| format!("result `{id}`: {e}"))?),
            _ => None,
        };
        let mut raw = RawAttributes::new();
        for (key, value) in obj {
            if matches!(key.as_str(), "id" | "name" | "lat" | "lon") {
                continue;
            }
            let values: Vec<String> = match value {
                Value::Array(items) => items.iter().filter_map(scalar).collect(),
                other => scalar(other).into_iter().collect(),
            };
            if !values.is_empty() {
                raw.insert(key.clone(), values);
            }
        }
        Ok(SourceRecord::mapped(id, name, geo, &raw, &self.id, Some(&self.ds)))
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

impl KnowledgeSource for PlacesHttpSource {
    fn id(&self) -> &str {
        &self.id
    }

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        let mut params: Vec<(&str, String)> = Vec::new();
        if let Some(name) = &query.name {
            params.push(("name", name.clone()));
        }
        if let Some(geo) = query.geo {
            params.push(("lat", geo.lat.to_string()));
            params.push(("lon", geo.lon.to_string()));
            params.push(("radius", query.radius_m.to_string()));
        }
        if let Some(key) = &self.api_key {
            params.push(("key", key.clone()));
        }
        let body = self.client.get(&self.endpoint, &params, "application/json")?;
        let mut records = self.parse(&body)?;
        sort_by_distance(&mut records, query);
        Ok(records)
    }
}
