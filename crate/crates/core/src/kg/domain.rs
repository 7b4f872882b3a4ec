use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::KgError;

/// Source id under which alias maps for the input KG itself are declared.
pub const KG_SOURCE_ID: &str = "kg";
/// Pseudo-property naming an instance's coordinates in `matchingProperties`.
pub const GEO_PROPERTY: &str = "geo";
/// Property whose value feeds the name constraint of a match query.
pub const NAME_PROPERTY: &str = "name";

const DEFAULT_VOCABULARY: &str = "http://schema.org/";

/// Property name to values, before or after alias mapping.
pub type RawAttributes = BTreeMap<String, Vec<String>>;

/// Target type, property list and per-source aliases for one validation task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DomainSpecification {
    pub name: String,
    pub target_type: String,
    pub properties: Vec<String>,
    pub matching_properties: Vec<String>,
    #[serde(default)]
    pub aliases: BTreeMap<String, BTreeMap<String, String>>,
    /// Namespace used to build type and predicate IRIs for SPARQL ingestion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<String>,
}

impl DomainSpecification {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, KgError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| KgError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, KgError> {
        let ds: DomainSpecification =
            serde_json::from_str(text).map_err(|e| KgError::DomainSpec(e.to_string()))?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<(), KgError> {
        let fail = |msg: String| Err(KgError::DomainSpec(msg));
        if self.target_type.trim().is_empty() {
            return fail("targetType must not be empty".into());
        }
        if self.properties.is_empty() {
            return fail("properties must not be empty".into());
        }
        let props: BTreeSet<&str> = self.properties.iter().map(String::as_str).collect();
        if props.len() != self.properties.len() {
            return fail("properties contain duplicates".into());
        }
        if props.contains(GEO_PROPERTY) {
            return fail(format!("`{GEO_PROPERTY}` is reserved for coordinates"));
        }
        let matching: BTreeSet<&str> = self.matching_properties.iter().map(String::as_str).collect();
        if matching.len() < 2 {
            return fail("at least two distinct matching properties are required".into());
        }
        if let Some(p) = matching.iter().find(|p| **p != GEO_PROPERTY && !props.contains(**p)) {
            return fail(format!("matching property `{p}` is not a declared property"));
        }
        for (source, map) in &self.aliases {
            let mut targets = BTreeSet::new();
            for (alias, target) in map {
                if !props.contains(target.as_str()) {
                    return fail(format!("alias `{alias}` of source `{source}` targets unknown property `{target}`"));
                }
                if alias != target && props.contains(alias.as_str()) {
                    return fail(format!("alias `{alias}` of source `{source}` shadows a declared property"));
                }
                if !targets.insert(target.as_str()) {
                    return fail(format!("source `{source}` maps two aliases onto `{target}`"));
                }
            }
        }
        Ok(())
    }

    pub fn has_property(&self, name: &str) -> bool {
        self.properties.iter().any(|p| p == name)
    }

    pub fn vocabulary(&self) -> &str {
        self.vocabulary.as_deref().unwrap_or(DEFAULT_VOCABULARY)
    }

    /// The alias a source uses for `property`, if it declares one.
    pub fn alias_for(&self, source_id: &str, property: &str) -> Option<&str> {
        self.aliases
            .get(source_id)?
            .iter()
            .find(|(_, target)| target.as_str() == property)
            .map(|(alias, _)| alias.as_str())
    }
}

/// Renames a source's attribute keys to the specification's property names.
///
/// Keys with an alias are renamed, keys that already are property names are
/// kept, everything else is dropped. Values pass through untouched.
pub fn apply_aliases(raw: &RawAttributes, source_id: &str, ds: &DomainSpecification) -> RawAttributes {
    let aliases = ds.aliases.get(source_id);
    let mut out = RawAttributes::new();
    for (key, values) in raw {
        let target = match aliases.and_then(|m| m.get(key)) {
            Some(target) => target.as_str(),
            None if ds.has_property(key) => key.as_str(),
            None => continue,
        };
        out.entry(target.to_owned()).or_default().extend(values.iter().cloned());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hotel_ds() -> DomainSpecification {
        DomainSpecification::from_json(
            r#"{
                "name": "hotel",
                "targetType": "Hotel",
                "properties": ["name", "address", "telephone"],
                "matchingProperties": ["name", "geo"],
                "aliases": {"osm": {"phone_number": "telephone", "addr": "address"}}
            }"#,
        )
        .unwrap()
    }

    fn raw(pairs: &[(&str, &[&str])]) -> RawAttributes {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn alias_renames_key() {
        let out = apply_aliases(&raw(&[("phone_number", &["+43 1"])]), "osm", &hotel_ds());
        assert_eq!(out, raw(&[("telephone", &["+43 1"])]));
    }

    #[test]
    fn identity_when_source_has_no_aliases() {
        let input = raw(&[("name", &["A"]), ("address", &["B", "C"])]);
        assert_eq!(apply_aliases(&input, "google", &hotel_ds()), input);
    }

    #[test]
    fn unknown_keys_are_dropped() {
        assert!(apply_aliases(&raw(&[("unmapped_key", &["x"])]), "osm", &hotel_ds()).is_empty());
        assert!(apply_aliases(&raw(&[("unmapped_key", &["x"])]), "google", &hotel_ds()).is_empty());
    }

    #[test]
    fn alias_and_canonical_key_merge() {
        let out = apply_aliases(&raw(&[("telephone", &["1"]), ("phone_number", &["2"])]), "osm", &hotel_ds());
        assert_eq!(out, raw(&[("telephone", &["2", "1"])]));
    }

    #[test]
    fn validation_rules() {
        let base = r#""name":"x","targetType":"T","properties":["a","b"]"#;
        let bad = [
            format!(r#"{{{base},"matchingProperties":["a"]}}"#),
            format!(r#"{{{base},"matchingProperties":["a","a"]}}"#),
            format!(r#"{{{base},"matchingProperties":["a","c"]}}"#),
            format!(r#"{{{base},"matchingProperties":["a","b"],"aliases":{{"s":{{"x":"a","y":"a"}}}}}}"#),
            format!(r#"{{{base},"matchingProperties":["a","b"],"aliases":{{"s":{{"x":"zz"}}}}}}"#),
            format!(r#"{{{base},"matchingProperties":["a","b"],"aliases":{{"s":{{"b":"a"}}}}}}"#),
            r#"{"name":"x","targetType":"T","properties":["a","geo"],"matchingProperties":["a","geo"]}"#.to_string(),
        ];
        for text in bad {
            assert!(DomainSpecification::from_json(&text).is_err(), "{text}");
        }
        let ok = format!(r#"{{{base},"matchingProperties":["a","geo"]}}"#);
        assert!(DomainSpecification::from_json(&ok).is_ok());
    }

    #[test]
    fn reverse_alias_lookup() {
        let ds = hotel_ds();
        assert_eq!(ds.alias_for("osm", "telephone"), Some("phone_number"));
        assert_eq!(ds.alias_for("osm", "name"), None);
        assert_eq!(ds.vocabulary(), "http://schema.org/");
    }
}
