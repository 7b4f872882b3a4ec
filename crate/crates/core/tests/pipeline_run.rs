use std::path::{Path, PathBuf};

use kgval::pipeline::{validate_kg, write_report, ReportFormat, RunConfig, REASON_INSUFFICIENT_MATCHING};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn hotel_config(edit: impl FnOnce(&mut serde_json::Value)) -> RunConfig {
    let path = fixtures().join("hotels/config.json");
    let mut value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    edit(&mut value);
    RunConfig::from_json(&value.to_string(), path.parent().unwrap()).unwrap()
}

#[test]
fn worker_count_does_not_change_the_report() {
    let one = validate_kg(&hotel_config(|v| v["concurrency"] = 1.into())).unwrap();
    let many = validate_kg(&hotel_config(|v| v["concurrency"] = 8.into())).unwrap();
    assert_eq!(one.canonical_json(), many.canonical_json());
    assert_ne!(one.run_id, many.run_id);
}

#[test]
fn rescoring_equals_a_fresh_run() {
    let mut report = validate_kg(&hotel_config(|_| {})).unwrap();
    report.rescore(Some(&[0.8, 0.1, 0.1]), Some(0.4)).unwrap();
    let fresh = validate_kg(&hotel_config(|v| {
        v["weights"] = serde_json::json!([0.8, 0.1, 0.1]);
        v["threshold"] = 0.4.into();
    }))
    .unwrap();
    assert_eq!(report.instances, fresh.instances);
    assert_eq!(report.metrics, fresh.metrics);
    assert_eq!(report.canonical_json(), fresh.canonical_json());
    assert_eq!(report.rescore_version, 1);
}

#[test]
fn scaled_weights_give_identical_scores() {
    let mut a = validate_kg(&hotel_config(|_| {})).unwrap();
    let mut b = a.clone();
    a.rescore(Some(&[2.0, 1.0, 1.0]), None).unwrap();
    b.rescore(Some(&[4.0, 2.0, 2.0]), None).unwrap();
    assert_eq!(a.canonical_json(), b.canonical_json());
}

#[test]
fn instance_without_geo_is_skipped_with_reason() {
    let report = validate_kg(&hotel_config(|_| {})).unwrap();
    assert_eq!(report.instances.len() + report.skipped.len(), 50);
    assert_eq!(report.skipped.len(), 1);
    assert_eq!(report.skipped[0].reason, REASON_INSUFFICIENT_MATCHING);
    assert!(report.canonical_json().contains("\"skipped\": [\n    {\n      \"reason\": \"insufficient matching properties\""));
}

#[test]
fn report_files() {
    let report = validate_kg(&hotel_config(|_| {})).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    write_report(&report, &json, ReportFormat::Json).unwrap();
    write_report(&report, dir.path().join("r2.json"), ReportFormat::Json).unwrap();
    assert_eq!(std::fs::read(&json).unwrap(), std::fs::read(dir.path().join("r2.json")).unwrap());

    let csv = dir.path().join("r.csv");
    write_report(&report, &csv, ReportFormat::CsvSummary).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + report.instances.len());

    let expected = std::fs::read_to_string(fixtures().join("hotels/expected_metrics.csv")).unwrap();
    assert_eq!(report.metrics_csv().unwrap(), expected);
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn single_instance_confirmed_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "kg.ttl",
        "@prefix s: <http://schema.org/> .\n<http://x/h1> a s:Hotel ; s:name \"Hotel Post\" ; \
         s:telephone \"+43 1 234\" ; s:streetAddress \"Weg 1\" ; s:latitude 47.0 ; s:longitude 11.0 .\n",
    );
    write(
        dir.path(),
        "ds.json",
        r#"{"name":"h","targetType":"Hotel","properties":["name","address","phone"],"matchingProperties":["name","geo"],
            "aliases":{"kg":{"telephone":"phone","streetAddress":"address"}}}"#,
    );
    write(
        dir.path(),
        "src.json",
        r#"{"sourceId":"a","records":[{"id":"1","name":"Hotel Post","lat":47.0,"lon":11.0,
            "properties":{"phone":["+43 1 234"],"address":["Weg 1"]}}]}"#,
    );
    write(
        dir.path(),
        "run.json",
        r#"{"input":{"turtle":"kg.ttl"},"domainSpec":"ds.json","sources":[{"id":"a","kind":"fixture","endpoint":"src.json"}]}"#,
    );
    let report = validate_kg(&RunConfig::load(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(report.instances.len(), 1);
    assert_eq!(report.instances[0].score.confidence, 1.0);
    assert!(report.instances[0].score.valid);
    assert!(report.metrics.is_none());
}
