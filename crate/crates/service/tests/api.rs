use std::path::PathBuf;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use kgval::confidence::SourceRegistry;
use kgval_service::api::{app, AppState, ServerConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

fn hotel_app() -> Router {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hotels/config.json");
    app(AppState::new(ServerConfig::load(path).unwrap()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn finished_run(app: &Router, body: Option<Value>) -> (String, Value) {
    let (status, submitted) = call(app, "POST", "/runs", body).await;
    assert_eq!(status, StatusCode::ACCEPTED, "{submitted}");
    let id = submitted["runId"].as_str().unwrap().to_owned();
    for _ in 0..600 {
        let (status, body) = call(app, "GET", &format!("/runs/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        match body["status"].as_str().unwrap() {
            "running" => tokio::time::sleep(Duration::from_millis(20)).await,
            "done" => return (id, body["report"].clone()),
            other => panic!("run ended as {other}: {body}"),
        }
    }
    panic!("run did not finish");
}

#[tokio::test]
async fn run_lifecycle() {
    let app = hotel_app();
    let (id, report) = finished_run(&app, None).await;
    assert_eq!(report["runId"], id.as_str());
    assert_eq!(report["instances"].as_array().unwrap().len(), 49);

    let (status, metrics) = call(&app, "GET", &format!("/runs/{id}/metrics"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(metrics["perProperty"]["name"]["f1"].as_f64().map(|f| (f * 1e4).round() / 1e4), Some(0.9767));

    assert_eq!(call(&app, "GET", "/runs/nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/runs/nope/metrics", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "POST", "/runs/nope/rescore", Some(json!({}))).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn second_submission_while_running_is_rejected() {
    // A source that accepts connections and never answers keeps the first run busy.
    let silent = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let hotels = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hotels");
    std::fs::copy(hotels.join("hotel_ds.json"), dir.path().join("hotel_ds.json")).unwrap();
    std::fs::write(
        dir.path().join("kg.ttl"),
        "<http://x/h1> a <http://schema.org/Hotel> ; <http://schema.org/name> \"A\" ; \
         <http://schema.org/latitude> 47.0 ; <http://schema.org/longitude> 11.0 .\n",
    )
    .unwrap();
    std::fs::write(
        dir.path().join("config.json"),
        json!({
            "input": {"turtle": "kg.ttl"},
            "domainSpec": "hotel_ds.json",
            "sources": [{"id": "g", "kind": "places-http", "endpoint": format!("http://{}/s", silent.local_addr().unwrap()), "timeoutMs": 1500}]
        })
        .to_string(),
    )
    .unwrap();
    let app = app(AppState::new(ServerConfig::load(dir.path().join("config.json")).unwrap()));

    let (first, body) = call(&app, "POST", "/runs", None).await;
    assert_eq!(first, StatusCode::ACCEPTED);
    let (second, err) = call(&app, "POST", "/runs", None).await;
    assert_eq!(second, StatusCode::CONFLICT, "{err}");
    let id = body["runId"].as_str().unwrap();
    assert_eq!(call(&app, "GET", &format!("/runs/{id}"), None).await.1["status"], "running");
    assert_eq!(call(&app, "POST", &format!("/runs/{id}/rescore"), None).await.0, StatusCode::CONFLICT);

    for _ in 0..500 {
        if call(&app, "GET", &format!("/runs/{id}"), None).await.1["status"] == "done" {
            assert_eq!(call(&app, "POST", "/runs", None).await.0, StatusCode::ACCEPTED);
            return;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    panic!("first run never finished");
}

#[tokio::test]
async fn invalid_payloads() {
    let app = hotel_app();
    for body in [json!([1]), json!({"threshold": 2.0}), json!({"weights": [1, 1]}), json!({"bogus": 1})] {
        let (status, err) = call(&app, "POST", "/runs", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert!(err["error"].is_string());
    }
    let request = Request::post("/runs").body(Body::from("{not json")).unwrap();
    assert_eq!(app.clone().oneshot(request).await.unwrap().status(), StatusCode::BAD_REQUEST);

    let (id, _) = finished_run(&app, None).await;
    let uri = format!("/runs/{id}/rescore");
    for body in [json!({"weights": [1.0, -1.0, 1.0]}), json!({"threshold": -0.1}), json!({"weights": [1.0]}), json!({"x": 1})] {
        assert_eq!(call(&app, "POST", &uri, Some(body.clone())).await.0, StatusCode::BAD_REQUEST, "{body}");
    }
}

/// Recomputes every weighted triple score from the stored similarities.
fn offline(report: &Value, weights: &[f64]) -> Vec<f64> {
    let w_sum: f64 = weights.iter().sum();
    let mut out = Vec::new();
    for instance in report["instances"].as_array().unwrap() {
        for triple in instance["triples"].as_array().unwrap() {
            let sims: Vec<f64> = triple["perSource"].as_array().unwrap().iter().map(|e| e["sim"].as_f64().unwrap()).collect();
            out.push(sims.iter().zip(weights).map(|(s, w)| s * w).sum::<f64>() / w_sum);
        }
    }
    out
}

fn weighted(report: &Value) -> Vec<f64> {
    report["instances"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|i| i["triples"].as_array().unwrap().iter().map(|t| t["weighted"].as_f64().unwrap()))
        .collect()
}

#[tokio::test]
async fn rescore_matches_offline_recomputation() {
    let app = hotel_app();
    let (id, before) = finished_run(&app, None).await;
    let uri = format!("/runs/{id}/rescore");
    let (status, after) = call(&app, "POST", &uri, Some(json!({"weights": [0.8, 0.1, 0.1]}))).await;
    assert_eq!(status, StatusCode::OK);
    let expected = offline(&before, &[0.8, 0.1, 0.1]);
    for (got, want) in weighted(&after).iter().zip(&expected) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert_eq!(after["rescoreVersion"], 1);
    assert_eq!(after["config"]["weights"], json!(SourceRegistry::new(vec!["a".into(), "b".into(), "c".into()], Some(&[0.8, 0.1, 0.1])).unwrap().weights()));

    let (_, stored) = call(&app, "GET", &format!("/runs/{id}"), None).await;
    assert_eq!(stored["report"], after);

    let (_, a) = call(&app, "POST", &uri, Some(json!({"weights": [2, 1, 1]}))).await;
    let (_, b) = call(&app, "POST", &uri, Some(json!({"weights": [4, 2, 2]}))).await;
    assert_eq!(a["instances"], b["instances"]);
    assert_eq!(a["metrics"], b["metrics"]);

    let (_, strict) = call(&app, "POST", &uri, Some(json!({"threshold": 1.0}))).await;
    assert!(strict["instances"].as_array().unwrap().iter().all(|i| i["valid"] == false));
}

#[tokio::test]
async fn submitted_overrides_apply() {
    let app = hotel_app();
    let (_, report) = finished_run(&app, Some(json!({"properties": ["phone"], "threshold": 0.3}))).await;
    assert_eq!(report["config"]["properties"], json!(["phone"]));
    assert_eq!(report["config"]["threshold"], 0.3);
}

#[tokio::test]
async fn sources_and_domain_specs() {
    let dir = tempfile::tempdir().unwrap();
    let hotels = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/hotels");
    std::fs::copy(hotels.join("hotel_ds.json"), dir.path().join("hotel_ds.json")).unwrap();
    std::fs::write(dir.path().join("other.json"), r#"{"not":"a spec"}"#).unwrap();
    std::fs::write(
        dir.path().join("config.json"),
        json!({
            "input": {"turtle": "kg.ttl"},
            "domainSpec": "hotel_ds.json",
            "sources": [
                {"id": "g", "kind": "places-http", "endpoint": "https://maps.example/search?key=s3cret", "apiKeyEnv": "KGVAL_TEST_NEVER_SET"},
                {"id": "osm", "kind": "fixture", "endpoint": "osm.json", "rateLimit": 2}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let app = app(AppState::new(ServerConfig::load(dir.path().join("config.json")).unwrap()));

    let (status, sources) = call(&app, "GET", "/sources", None).await;
    assert_eq!(status, StatusCode::OK);
    let text = sources.to_string();
    assert!(!text.contains("s3cret"), "{text}");
    assert_eq!(sources[0]["apiKeyEnv"], "KGVAL_TEST_NEVER_SET");
    assert_eq!(sources[0]["apiKeySet"], false);
    assert_eq!(sources[1]["rateLimit"], 2);

    let (status, specs) = call(&app, "GET", "/domain-specs", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(specs.as_array().unwrap().len(), 1);
    assert_eq!(specs[0]["file"], "hotel_ds.json");
    assert_eq!(specs[0]["properties"], json!(["name", "address", "phone"]));
}

#[tokio::test]
async fn failed_runs_report_their_error() {
    let app = hotel_app();
    let (_, submitted) = call(&app, "POST", "/runs", Some(json!({"input": {"turtle": "missing.ttl"}}))).await;
    let id = submitted["runId"].as_str().unwrap().to_owned();
    let mut last = Value::Null;
    for _ in 0..500 {
        last = call(&app, "GET", &format!("/runs/{id}"), None).await.1;
        if last["status"] != "running" {
            break;
        }
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    assert_eq!(last["status"], "failed");
    assert!(last["error"].as_str().unwrap().contains("missing.ttl"));
    assert_eq!(call(&app, "POST", &format!("/runs/{id}/rescore"), None).await.0, StatusCode::CONFLICT);
}
