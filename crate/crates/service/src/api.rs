//! JSON HTTP API over the validation pipeline.
//!
//! One validation job runs at a time. Finished reports are stored as
//! immutable snapshots; a rescore swaps in a new snapshot.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use kgval::kg::DomainSpecification;
use kgval::pipeline::{validate_kg, RunConfig, ValidationReport};
use kgval::sources::{SourceHandle, SourceKind};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// The configuration a server was started with. Submitted runs are
/// overlays on top of it.
#[derive(Debug, Clone)]
pub struct ServerConfig {
    raw: serde_json::Map<String, Value>,
    config: RunConfig,
}

impl ServerConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, kgval::pipeline::ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| kgval::pipeline::ConfigError::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, base)
    }

    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, kgval::pipeline::ConfigError> {
        let config = RunConfig::from_json(text, base_dir)?;
        let raw = match serde_json::from_str(text) {
            Ok(Value::Object(map)) => map,
            _ => unreachable!("parsed as a run configuration above"),
        };
        Ok(Self { raw, config })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Points every run at `dir` for caching, when set.
    pub fn override_cache_dir(&mut self, dir: Option<PathBuf>) {
        let Some(dir) = dir.filter(|d| !d.as_os_str().is_empty()) else { return };
        let dir = std::path::absolute(&dir).unwrap_or(dir).display().to_string();
        self.raw.insert("cacheDir".into(), Value::String(dir.clone()));
        self.config.cache_dir = Some(dir);
    }

    /// The server configuration with the top-level keys of `overlay` replaced.
    fn overlay(&self, overlay: &Value) -> Result<RunConfig, String> {
        let Value::Object(fields) = overlay else {
            return Err("run request must be a JSON object".into());
        };
        let mut merged = self.raw.clone();
        for (k, v) in fields {
            merged.insert(k.clone(), v.clone());
        }
        let config = RunConfig::from_json(&Value::Object(merged).to_string(), self.config.base_dir.clone())
            .map_err(|e| e.to_string())?;
        config.load_domain_spec().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

#[derive(Debug, Clone)]
enum RunState {
    Running,
    Done(Arc<ValidationReport>),
    Failed(String),
}

pub struct AppState {
    server: ServerConfig,
    runs: RwLock<HashMap<String, RunState>>,
    active: Mutex<Option<String>>,
}

impl AppState {
    pub fn new(server: ServerConfig) -> Arc<Self> {
        Arc::new(Self { server, runs: RwLock::default(), active: Mutex::default() })
    }

    fn get(&self, id: &str) -> Option<RunState> {
        self.runs.read().unwrap().get(id).cloned()
    }

    fn set(&self, id: &str, state: RunState) {
        self.runs.write().unwrap().insert(id.to_owned(), state);
    }
}

pub fn app(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/runs", post(submit))
        .route("/runs/{id}", get(run_status))
        .route("/runs/{id}/rescore", post(rescore))
        .route("/runs/{id}/metrics", get(metrics))
        .route("/sources", get(sources))
        .route("/domain-specs", get(domain_specs))
        .with_state(state)
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn not_found(id: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("unknown run `{id}`"))
}

fn not_done(id: &str) -> ApiError {
    ApiError(StatusCode::CONFLICT, format!("run `{id}` has not finished"))
}

fn parse_body(body: &Bytes) -> Result<Value, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(json!({}));
    }
    serde_json::from_slice(body).map_err(|e| bad_request(format!("invalid JSON: {e}")))
}

async fn submit(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let config = state.server.overlay(&parse_body(&body)?).map_err(bad_request)?;
    let id = uuid::Uuid::new_v4().to_string();
    {
        let mut active = state.active.lock().unwrap();
        if let Some(running) = active.as_ref() {
            return Err(ApiError(StatusCode::CONFLICT, format!("run `{running}` is still in progress")));
        }
        *active = Some(id.clone());
        state.set(&id, RunState::Running);
    }
    log::info!("run {id} started");

    let job = state.clone();
    let run_id = id.clone();
    tokio::spawn(async move {
        let outcome = tokio::task::spawn_blocking(move || validate_kg(&config)).await;
        let next = match outcome {
            Ok(Ok(mut report)) => {
                report.run_id = run_id.clone();
                RunState::Done(Arc::new(report))
            }
            Ok(Err(e)) => RunState::Failed(e.to_string()),
            Err(e) => RunState::Failed(format!("validation aborted: {e}")),
        };
        if let RunState::Failed(msg) = &next {
            log::error!("run {run_id} failed: {msg}");
        } else {
            log::info!("run {run_id} finished");
        }
        job.set(&run_id, next);
        *job.active.lock().unwrap() = None;
    });

    Ok((StatusCode::ACCEPTED, Json(json!({ "runId": id }))).into_response())
}

fn report_value(report: &ValidationReport) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

async fn run_status(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let body = match state.get(&id).ok_or_else(|| not_found(&id))? {
        RunState::Running => json!({ "runId": id, "status": "running" }),
        RunState::Done(report) => json!({ "runId": id, "status": "done", "report": report_value(&report) }),
        RunState::Failed(error) => json!({ "runId": id, "status": "failed", "error": error }),
    };
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RescoreRequest {
    weights: Option<Vec<f64>>,
    threshold: Option<f64>,
}

fn finished(state: &AppState, id: &str) -> Result<Arc<ValidationReport>, ApiError> {
    match state.get(id).ok_or_else(|| not_found(id))? {
        RunState::Done(report) => Ok(report),
        RunState::Running => Err(not_done(id)),
        RunState::Failed(e) => Err(ApiError(StatusCode::CONFLICT, format!("run `{id}` failed: {e}"))),
    }
}

async fn rescore(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let request: RescoreRequest =
        serde_json::from_value(parse_body(&body)?).map_err(|e| bad_request(format!("invalid rescore request: {e}")))?;
    let current = finished(&state, &id)?;
    let mut next = (*current).clone();
    next.rescore(request.weights.as_deref(), request.threshold).map_err(|e| bad_request(e.to_string()))?;
    let value = report_value(&next);
    state.set(&id, RunState::Done(Arc::new(next)));
    Ok(Json(value))
}

async fn metrics(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<Value>, ApiError> {
    let report = finished(&state, &id)?;
    match &report.metrics {
        Some(m) => Ok(Json(serde_json::to_value(m).expect("metrics serialize"))),
        None => Err(ApiError(StatusCode::NOT_FOUND, format!("run `{id}` was started without a baseline"))),
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SourceView {
    id: String,
    kind: SourceKind,
    endpoint: String,
    rate_limit: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    api_key_env: Option<String>,
    api_key_set: bool,
}

impl From<&SourceHandle> for SourceView {
    fn from(h: &SourceHandle) -> Self {
        Self {
            id: h.id.clone(),
            kind: h.kind,
            endpoint: redact_endpoint(&h.endpoint),
            rate_limit: h.rate_limit,
            api_key_env: h.api_key_env.clone(),
            api_key_set: h.api_key_env.as_ref().is_some_and(|v| std::env::var_os(v).is_some()),
        }
    }
}

const SECRET_PARAMS: [&str; 7] = ["key", "apikey", "api_key", "token", "access_token", "secret", "password"];

/// Hides credentials embedded in an endpoint URL.
pub fn redact_endpoint(endpoint: &str) -> String {
    let Ok(mut url) = url::Url::parse(endpoint) else {
        return endpoint.to_owned();
    };
    if url.password().is_some() {
        let _ = url.set_password(Some("***"));
    }
    if url.query().is_some() {
        let pairs: Vec<(String, String)> = url
            .query_pairs()
            .map(|(k, v)| {
                let secret = SECRET_PARAMS.contains(&k.to_ascii_lowercase().as_str());
                (k.into_owned(), if secret { "***".to_owned() } else { v.into_owned() })
            })
            .collect();
        url.query_pairs_mut().clear().extend_pairs(pairs);
    }
    url.to_string()
}

async fn sources(State(state): State<Arc<AppState>>) -> Json<Vec<SourceView>> {
    Json(state.server.config.sources.iter().map(SourceView::from).collect())
}

#[derive(Debug, Serialize)]
struct DomainSpecView {
    file: String,
    #[serde(flatten)]
    spec: DomainSpecification,
}

/// Every parseable domain specification next to the configured one.
async fn domain_specs(State(state): State<Arc<AppState>>) -> Result<Json<Vec<DomainSpecView>>, ApiError> {
    let config = &state.server.config;
    let configured = config.resolve(&config.domain_spec);
    let dir = configured.parent().map(Path::to_path_buf).unwrap_or_default();
    let entries = std::fs::read_dir(if dir.as_os_str().is_empty() { Path::new(".") } else { &dir })
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, format!("cannot list {}: {e}", dir.display())))?;
    let mut out: Vec<DomainSpecView> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .filter_map(|p| {
            let spec = DomainSpecification::load(&p).ok()?;
            Some(DomainSpecView { file: p.file_name()?.to_string_lossy().into_owned(), spec })
        })
        .collect();
    out.sort_by(|a, b| a.file.cmp(&b.file));
    Ok(Json(out))
}
