use std::collections::BTreeMap;

use serde::Serialize;

use super::domain::{apply_aliases, DomainSpecification, RawAttributes, GEO_PROPERTY, KG_SOURCE_ID};
use super::model::{GeoPoint, Iri, KnowledgeGraph, Term, Triple, RDF_TYPE};

/// A KG subject projected onto a domain specification's attribute space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Instance {
    pub id: Iri,
    #[serde(rename = "type")]
    pub type_name: String,
    pub attributes: RawAttributes,
    pub geo: Option<GeoPoint>,
}

impl Instance {
    /// Number of specification properties carrying at least one value.
    pub fn attribute_count(&self) -> usize {
        self.attributes.values().filter(|v| !v.is_empty()).count()
    }

    pub fn has(&self, property: &str) -> bool {
        if property == GEO_PROPERTY {
            return self.geo.is_some();
        }
        self.attributes.get(property).is_some_and(|v| !v.is_empty())
    }

    pub fn first(&self, property: &str) -> Option<&str> {
        self.attributes.get(property)?.first().map(String::as_str)
    }

    pub fn populated_matching_properties(&self, ds: &DomainSpecification) -> usize {
        ds.matching_properties.iter().filter(|p| self.has(p)).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Excluded {
    pub subject: Iri,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Extraction {
    pub instances: Vec<Instance>,
    pub excluded: Vec<Excluded>,
}

pub const REASON_NO_MATCHING_PROPERTIES: &str = "missing all matching properties";

/// One instance per subject typed `ds.target_type`, ordered by subject IRI.
pub fn extract_instances(kg: &KnowledgeGraph, ds: &DomainSpecification) -> Extraction {
    let mut by_subject: BTreeMap<&Iri, Vec<&Triple>> = BTreeMap::new();
    for t in kg.triples() {
        by_subject.entry(&t.subject).or_default().push(t);
    }

    let mut out = Extraction::default();
    for (subject, triples) in &by_subject {
        if !triples.iter().any(|t| is_type(t, &ds.target_type)) {
            continue;
        }
        let mut raw = RawAttributes::new();
        for t in triples.iter().filter(|t| t.predicate.as_str() != RDF_TYPE) {
            let value = t.object.lexical().trim();
            if value.is_empty() {
                continue;
            }
            let values = raw.entry(t.predicate.local_name().to_owned()).or_default();
            if !values.iter().any(|v| v == value) {
                values.push(value.to_owned());
            }
        }
        let instance = Instance {
            id: (*subject).clone(),
            type_name: ds.target_type.clone(),
            attributes: apply_aliases(&raw, KG_SOURCE_ID, ds),
            geo: find_geo(triples, &by_subject),
        };
        if instance.populated_matching_properties(ds) == 0 {
            out.excluded.push(Excluded {
                subject: instance.id,
                reason: REASON_NO_MATCHING_PROPERTIES.to_owned(),
            });
        } else {
            out.instances.push(instance);
        }
    }
    out
}

fn is_type(t: &Triple, target: &str) -> bool {
    t.predicate.as_str() == RDF_TYPE
        && matches!(&t.object, Term::Iri(o) if o.as_str() == target || o.local_name() == target)
}

/// Flat `latitude`/`longitude` on the subject, or one level down through `geo`.
fn find_geo(triples: &[&Triple], by_subject: &BTreeMap<&Iri, Vec<&Triple>>) -> Option<GeoPoint> {
    if let Some(point) = coordinates(triples) {
        return Some(point);
    }
    triples
        .iter()
        .filter(|t| t.predicate.local_name() == GEO_PROPERTY)
        .filter_map(|t| t.object.as_iri())
        .filter_map(|node| by_subject.get(node))
        .find_map(|node_triples| coordinates(node_triples))
}

fn coordinates(triples: &[&Triple]) -> Option<GeoPoint> {
    let number = |name: &str| {
        triples
            .iter()
            .find(|t| t.predicate.local_name() == name && matches!(t.object, Term::Literal(_)))
            .and_then(|t| t.object.lexical().trim().parse::<f64>().ok())
    };
    let lat = number("latitude")?;
    let lon = number("longitude")?;
    GeoPoint::new(lat, lon).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::parse_turtle;

    fn ds() -> DomainSpecification {
        DomainSpecification::from_json(
            r#"{"name":"hotel","targetType":"Hotel","properties":["name","address","phone"],
                "matchingProperties":["name","geo"],"aliases":{"kg":{"telephone":"phone"}}}"#,
        )
        .unwrap()
    }

    const PREFIXES: &str = "@prefix s: <http://schema.org/> . @prefix ex: <http://example.org/> .\n";

    #[test]
    fn projects_one_hotel() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:h1 a s:Hotel ; s:name \"Hotel Alpenhof\" ; s:telephone \"+43 5287 8550\" ;
               s:latitude 47.1 ; s:longitude 11.6 ; s:url <http://alpenhof.example/> ."
        ))
        .unwrap();
        let ex = extract_instances(&kg, &ds());
        assert_eq!(ex.instances.len(), 1);
        let h = &ex.instances[0];
        assert_eq!(h.attribute_count(), 2);
        assert_eq!(h.first("phone"), Some("+43 5287 8550"));
        assert_eq!(h.geo, Some(GeoPoint { lat: 47.1, lon: 11.6 }));
        assert!(!h.attributes.contains_key("url"));
    }

    #[test]
    fn other_types_are_ignored() {
        let kg = parse_turtle(&format!("{PREFIXES} ex:p a s:Person ; s:name \"Anna\" .")).unwrap();
        let ex = extract_instances(&kg, &ds());
        assert!(ex.instances.is_empty());
        assert!(ex.excluded.is_empty());
    }

    #[test]
    fn nested_geo_node() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:h1 a s:Hotel ; s:name \"A\" ; s:geo ex:g1 .
             ex:g1 a s:GeoCoordinates ; s:latitude \"47.5\" ; s:longitude \"-11.25\" ."
        ))
        .unwrap();
        let ex = extract_instances(&kg, &ds());
        assert_eq!(ex.instances[0].geo, Some(GeoPoint { lat: 47.5, lon: -11.25 }));
    }

    #[test]
    fn out_of_range_geo_is_dropped() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:h1 a s:Hotel ; s:name \"A\" ; s:latitude 95 ; s:longitude 10 ."
        ))
        .unwrap();
        assert_eq!(extract_instances(&kg, &ds()).instances[0].geo, None);
    }

    #[test]
    fn subjects_without_matching_properties_are_reported() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:h2 a s:Hotel ; s:address \"Dorf 1\" . ex:h1 a s:Hotel ; s:name \"A\" ."
        ))
        .unwrap();
        let ex = extract_instances(&kg, &ds());
        assert_eq!(ex.instances.len(), 1);
        assert_eq!(ex.excluded.len(), 1);
        assert_eq!(ex.excluded[0].subject.as_str(), "http://example.org/h2");
        assert_eq!(ex.excluded[0].reason, REASON_NO_MATCHING_PROPERTIES);
    }

    #[test]
    fn values_are_trimmed_and_multi_valued() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:h1 a s:Hotel ; s:name \" A \", \"B\", \"A\", \"  \" ."
        ))
        .unwrap();
        let h = &extract_instances(&kg, &ds()).instances[0];
        assert_eq!(h.attributes["name"], vec!["A", "B"]);
    }

    #[test]
    fn ordered_by_subject_iri() {
        let kg = parse_turtle(&format!(
            "{PREFIXES} ex:b a s:Hotel ; s:name \"B\" . ex:a a s:Hotel ; s:name \"A\" . ex:c a s:Hotel ; s:name \"C\" ."
        ))
        .unwrap();
        let ids: Vec<_> = extract_instances(&kg, &ds()).instances.into_iter().map(|i| i.id.to_string()).collect();
        assert_eq!(ids, ["http://example.org/a", "http://example.org/b", "http://example.org/c"]);
    }
}
