use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Canonical form applied to attribute values before they are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizerKind {
    Name,
    Phone,
    Address,
    Year,
    Generic,
}

impl NormalizerKind {
    /// Normalizer picked for a property when the run configuration names none.
    pub fn for_property(property: &str) -> Self {
        let p = property.to_lowercase();
        if p.contains("phone") {
            NormalizerKind::Phone
        } else if p.contains("address") {
            NormalizerKind::Address
        } else if p.contains("year") || p.contains("date") {
            NormalizerKind::Year
        } else if p.contains("name") {
            NormalizerKind::Name
        } else {
            NormalizerKind::Generic
        }
    }
}

pub fn normalize(value: &str, kind: NormalizerKind) -> String {
    match kind {
        NormalizerKind::Name | NormalizerKind::Address => normalize_text(value),
        NormalizerKind::Phone => {
            let digits: String = value.chars().filter(char::is_ascii_digit).collect();
            digits.trim_start_matches('0').to_owned()
        }
        NormalizerKind::Year => first_four_digit_run(value).unwrap_or_default(),
        NormalizerKind::Generic => collapse_whitespace(&value.to_lowercase()),
    }
}

fn normalize_text(value: &str) -> String {
    let folded: String = value
        .to_lowercase()
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase();
    collapse_whitespace(&folded)
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_owned()
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn first_four_digit_run(value: &str) -> Option<String> {
    let chars: Vec<char> = value.chars().collect();
    chars
        .windows(4)
        .find(|w| w.iter().all(char::is_ascii_digit))
        .map(|w| w.iter().collect())
}
