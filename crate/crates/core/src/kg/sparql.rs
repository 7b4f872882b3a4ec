//! SPARQL ingestion: a type-constrained SELECT over the specification's
//! properties, answered with SPARQL-JSON results.

use std::collections::BTreeMap;
#[cfg(feature = "http")]
use std::path::PathBuf;
#[cfg(feature = "http")]
use std::time::Duration;

use serde::Deserialize;

use super::domain::{DomainSpecification, KG_SOURCE_ID};
use super::model::{Iri, KnowledgeGraph, Origin, Term, Triple, RDF_TYPE};
use super::KgError;

/// `application/sparql-results+json`, SELECT form.
#[derive(Debug, Clone, Deserialize)]
pub struct SparqlResults {
    #[serde(default)]
    pub head: SparqlHead,
    pub results: SparqlBindings,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct SparqlHead {
    #[serde(default)]
    pub vars: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SparqlBindings {
    pub bindings: Vec<BTreeMap<String, RdfTerm>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RdfTerm {
    #[serde(rename = "type")]
    pub kind: String,
    pub value: String,
}

impl RdfTerm {
    pub fn is_iri(&self) -> bool {
        self.kind == "uri"
    }
}

impl SparqlResults {
    pub fn parse(body: &str) -> Result<Self, KgError> {
        serde_json::from_str(body).map_err(|e| KgError::Results(e.to_string()))
    }
}

/// Query plan for one domain specification: variables and the predicate each
/// one is bound through.
#[derive(Debug, Clone)]
pub struct InstanceQuery {
    pub text: String,
    type_iri: String,
    columns: Vec<(String, String)>,
}

pub fn build_instance_query(ds: &DomainSpecification, limit: usize) -> Result<InstanceQuery, KgError> {
    if limit == 0 {
        return Err(KgError::InvalidLimit);
    }
    let vocab = ds.vocabulary();
    let type_iri = if ds.target_type.contains("://") {
        ds.target_type.clone()
    } else {
        format!("{vocab}{}", ds.target_type)
    };
    let mut columns: Vec<(String, String)> = ds
        .properties
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let local = ds.alias_for(KG_SOURCE_ID, p).unwrap_or(p);
            (format!("v{i}"), format!("{vocab}{local}"))
        })
        .collect();
    let lat = format!("{vocab}latitude");
    let lon = format!("{vocab}longitude");
    let geo = format!("{vocab}geo");

    let mut text = String::from("SELECT ?s");
    for (var, _) in &columns {
        text.push_str(&format!(" ?{var}"));
    }
    text.push_str(" ?lat ?lon WHERE {\n");
    text.push_str(&format!("  {{ SELECT DISTINCT ?s WHERE {{ ?s a <{type_iri}> }} ORDER BY ?s LIMIT {limit} }}\n"));
    for (var, pred) in &columns {
        text.push_str(&format!("  OPTIONAL {{ ?s <{pred}> ?{var} }}\n"));
    }
    text.push_str(&format!("  OPTIONAL {{ ?s (<{geo}>/<{lat}>)|<{lat}> ?lat }}\n"));
    text.push_str(&format!("  OPTIONAL {{ ?s (<{geo}>/<{lon}>)|<{lon}> ?lon }}\n"));
    text.push('}');

    columns.push(("lat".into(), lat));
    columns.push(("lon".into(), lon));
    Ok(InstanceQuery { text, type_iri, columns })
}

impl InstanceQuery {
    /// Turns result rows into triples; rows whose `?s` is not an IRI are skipped.
    pub fn to_graph(&self, results: &SparqlResults) -> Result<KnowledgeGraph, KgError> {
        let rdf_type = Iri::new(RDF_TYPE)?;
        let type_iri = Iri::new(self.type_iri.clone())?;
        let predicates = self
            .columns
            .iter()
            .map(|(var, pred)| Ok((var.as_str(), Iri::new(pred.clone())?)))
            .collect::<Result<Vec<_>, KgError>>()?;

        let mut triples = Vec::new();
        for row in &results.results.bindings {
            let Some(subject) = row.get("s").filter(|t| t.is_iri()).and_then(|t| Iri::new(t.value.clone()).ok())
            else {
                continue;
            };
            triples.push(Triple::new(subject.clone(), rdf_type.clone(), Term::Iri(type_iri.clone())));
            for (var, predicate) in &predicates {
                if let Some(term) = row.get(*var) {
                    let object = match term.is_iri().then(|| Iri::new(term.value.clone()).ok()).flatten() {
                        Some(iri) => Term::Iri(iri),
                        None => Term::Literal(term.value.clone()),
                    };
                    triples.push(Triple::new(subject.clone(), predicate.clone(), object));
                }
            }
        }
        Ok(KnowledgeGraph::from_triples(triples, Origin::SparqlEndpoint))
    }
}

#[cfg(feature = "http")]
#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub timeout: Duration,
    /// Raw responses are stored here and reused on later runs.
    pub cache_dir: Option<PathBuf>,
}

#[cfg(feature = "http")]
impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions { timeout: Duration::from_secs(60), cache_dir: None }
    }
}

#[cfg(feature = "http")]
pub fn fetch_sparql(endpoint: &str, ds: &DomainSpecification, limit: usize) -> Result<KnowledgeGraph, KgError> {
    fetch_sparql_with(endpoint, ds, limit, &FetchOptions::default())
}

#[cfg(feature = "http")]
pub fn fetch_sparql_with(
    endpoint: &str,
    ds: &DomainSpecification,
    limit: usize,
    options: &FetchOptions,
) -> Result<KnowledgeGraph, KgError> {
    use sha2::{Digest, Sha256};

    let query = build_instance_query(ds, limit)?;
    let cache_file = options.cache_dir.as_ref().map(|dir| {
        let digest = Sha256::digest(format!("{endpoint}\n{}", query.text).as_bytes());
        dir.join(format!("sparql-{}.json", hex::encode(digest)))
    });
    if let Some(path) = &cache_file {
        if let Ok(body) = std::fs::read_to_string(path) {
            match SparqlResults::parse(&body) {
                Ok(results) => return query.to_graph(&results),
                Err(e) => log::warn!("ignoring unreadable cache entry {}: {e}", path.display()),
            }
        }
    }

    let body = sparql_get(endpoint, &query.text, options.timeout)?;
    let results = SparqlResults::parse(&body)?;
    if let Some(path) = &cache_file {
        if let Err(e) = crate::sources::write_atomically(path, body.as_bytes()) {
            log::warn!("could not cache SPARQL response at {}: {e}", path.display());
        }
    }
    query.to_graph(&results)
}

#[cfg(feature = "http")]
pub(crate) fn sparql_get(endpoint: &str, query: &str, timeout: Duration) -> Result<String, KgError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(timeout)
        .build()
        .map_err(|e| KgError::Network(e.to_string()))?;
    let response = client
        .get(endpoint)
        .query(&[("query", query)])
        .header(reqwest::header::ACCEPT, "application/sparql-results+json")
        .send()
        .map_err(classify)?;
    let status = response.status();
    if !status.is_success() {
        return Err(KgError::Network(format!("endpoint answered HTTP {status}")));
    }
    response.text().map_err(classify)
}

#[cfg(feature = "http")]
fn classify(e: reqwest::Error) -> KgError {
    if e.is_timeout() {
        KgError::EndpointTimeout
    } else {
        KgError::Network(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds() -> DomainSpecification {
        DomainSpecification::from_json(
            r#"{"name":"hotel","targetType":"Hotel","properties":["name","phone"],
                "matchingProperties":["name","geo"],"aliases":{"kg":{"telephone":"phone"}}}"#,
        )
        .unwrap()
    }

    #[test]
    fn zero_limit_is_rejected() {
        assert!(matches!(build_instance_query(&ds(), 0), Err(KgError::InvalidLimit)));
    }

    #[test]
    fn query_is_type_constrained_and_uses_kg_aliases() {
        let q = build_instance_query(&ds(), 25).unwrap();
        assert!(q.text.contains("?s a <http://schema.org/Hotel>"), "{}", q.text);
        assert!(q.text.contains("LIMIT 25"));
        assert!(q.text.contains("<http://schema.org/telephone> ?v1"));
        assert!(q.text.contains("<http://schema.org/name> ?v0"));
    }

    #[test]
    fn rows_become_triples() {
        let q = build_instance_query(&ds(), 10).unwrap();
        let results = SparqlResults::parse(
            r#"{"head":{"vars":["s","v0","v1","lat","lon"]},"results":{"bindings":[
                {"s":{"type":"uri","value":"http://x/h1"},"v0":{"type":"literal","value":"A"},
                 "lat":{"type":"literal","value":"47.1"},"lon":{"type":"literal","value":"11.2"}},
                {"s":{"type":"uri","value":"http://x/h1"},"v0":{"type":"literal","value":"A"}},
                {"s":{"type":"bnode","value":"b0"},"v0":{"type":"literal","value":"B"}}
            ]}}"#,
        )
        .unwrap();
        let kg = q.to_graph(&results).unwrap();
        assert_eq!(kg.subjects().len(), 1);
        assert_eq!(kg.len(), 4);
        let ex = crate::kg::extract_instances(&kg, &ds());
        assert_eq!(ex.instances[0].geo.map(|g| g.lat), Some(47.1));
    }

    #[test]
    fn malformed_results() {
        assert!(matches!(SparqlResults::parse("{\"head\":{}}"), Err(KgError::Results(_))));
    }
}
