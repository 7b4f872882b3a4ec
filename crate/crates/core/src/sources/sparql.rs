use std::collections::BTreeMap;
use std::time::Duration;

use super::http::PacedClient;
use super::{sort_by_distance, KnowledgeSource, RateLimiter, SourceError, SourceErrorKind, SourceRecord};
use crate::kg::sparql::SparqlResults;
use crate::kg::{DomainSpecification, GeoPoint, RawAttributes};
use crate::matching::MatchQuery;

/// Used when a handle names no template. Matches on the lower-cased label.
pub const DEFAULT_QUERY_TEMPLATE: &str = r#"SELECT ?id ?name ?prop ?value WHERE {
  ?id <http://www.w3.org/2000/01/rdf-schema#label> ?name .
  FILTER(LCASE(STR(?name)) = {name})
  OPTIONAL { ?id ?p ?value . BIND(REPLACE(STR(?p), "^.*[/#]", "") AS ?prop) }
}"#;

/// SPARQL endpoint searched through a query template.
///
/// Placeholders: `{name}` (a quoted string literal), `{lat}`, `{lon}`,
/// `{radius}` (numbers, `UNDEF` without geo). Result variables: `?id`,
/// `?name`, optional `?lat`/`?lon`, and `?prop`/`?value` pairs carrying the
/// record's properties. Rows sharing an `?id` are merged.
#[derive(Debug)]
pub struct SparqlHttpSource {
    id: String,
    endpoint: String,
    template: String,
    ds: DomainSpecification,
    client: PacedClient,
}

impl SparqlHttpSource {
    pub fn new(
        id: &str,
        endpoint: &str,
        template: Option<String>,
        ds: DomainSpecification,
        limiter: RateLimiter,
        timeout: Duration,
    ) -> Self {
        SparqlHttpSource {
            id: id.to_owned(),
            endpoint: endpoint.to_owned(),
            template: template.unwrap_or_else(|| DEFAULT_QUERY_TEMPLATE.to_owned()),
            ds,
            client: PacedClient::new(id, limiter, timeout),
        }
    }

    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.client.set_backoff(backoff);
        self
    }

    pub fn render(&self, query: &MatchQuery) -> String {
        let num = |v: Option<f64>| v.map_or_else(|| "UNDEF".to_owned(), |x| x.to_string());
        self.template
            .replace("{name}", &string_literal(query.name.as_deref().unwrap_or("")))
            .replace("{lat}", &num(query.geo.map(|g| g.lat)))
            .replace("{lon}", &num(query.geo.map(|g| g.lon)))
            .replace("{radius}", &query.radius_m.to_string())
    }

    fn records(&self, results: &SparqlResults) -> Result<Vec<SourceRecord>, SourceError> {
        struct Partial {
            name: Option<String>,
            lat: Option<f64>,
            lon: Option<f64>,
            raw: RawAttributes,
        }
        let mut order: Vec<String> = Vec::new();
        let mut by_id: BTreeMap<String, Partial> = BTreeMap::new();
        for row in &results.results.bindings {
            let Some(id) = row.get("id").map(|t| t.value.trim().to_owned()).filter(|s| !s.is_empty()) else {
                return Err(self.client.error(SourceErrorKind::Parse, "result row without ?id"));
            };
            let entry = by_id.entry(id.clone()).or_insert_with(|| {
                order.push(id);
                Partial { name: None, lat: None, lon: None, raw: RawAttributes::new() }
            });
            if entry.name.is_none() {
                entry.name = row.get("name").map(|t| t.value.clone());
            }
            let num = |k: &str| row.get(k).and_then(|t| t.value.trim().parse::<f64>().ok());
            entry.lat = entry.lat.or(num("lat"));
            entry.lon = entry.lon.or(num("lon"));
            if let (Some(p), Some(v)) = (row.get("prop"), row.get("value")) {
                let key = crate::kg::local_name(&p.value).to_owned();
                let values = entry.raw.entry(key).or_default();
                if !values.contains(&v.value) {
                    values.push(v.value.clone());
                }
            }
        }
        order
            .into_iter()
            .map(|id| {
                let p = by_id.remove(&id).expect("every ordered id has an entry");
                let name = p
                    .name
                    .ok_or_else(|| self.client.error(SourceErrorKind::Parse, format!("record `{id}` has no ?name")))?;
                let geo = p.lat.zip(p.lon).and_then(|(lat, lon)| GeoPoint::new(lat, lon).ok());
                Ok(SourceRecord::mapped(id, &name, geo, &p.raw, &self.id, Some(&self.ds)))
            })
            .collect()
    }
}

fn string_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

impl KnowledgeSource for SparqlHttpSource {
    fn id(&self) -> &str {
        &self.id
    }

    fn search(&self, query: &MatchQuery) -> Result<Vec<SourceRecord>, SourceError> {
        let text = self.render(query);
        let body = self.client.get(&self.endpoint, &[("query", text)], "application/sparql-results+json")?;
        let results = SparqlResults::parse(&body).map_err(|e| self.client.error(SourceErrorKind::Parse, e.to_string()))?;
        let mut records = self.records(&results)?;
        sort_by_distance(&mut records, query);
        Ok(records)
    }
}
