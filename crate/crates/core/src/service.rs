//! JSON-over-HTTP facade.
//!
//! Handlers are stateless apart from the shared read-only [`Store`]; every
//! graph is rebuilt per request. Errors are returned as
//! `{"code": ..., "message": ..., "field": ...}`.

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use crate::analytics::{self, TimeDiffReport};
use crate::error::Error;
use crate::evidence::{self, FeatureRanking, Scope};
use crate::ngot::NgotGraph;
use crate::pipeline::{self, GraphRequest};
use crate::store::{CorpusHandle, SentenceRecord, Store};
use crate::thesaurus::IntervalId;

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_LIMIT: usize = 50;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>, field: Option<&str>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                field: field.map(str::to_string),
            },
        }
    }

    fn invalid(field: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_param", message, Some(field))
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        match err {
            Error::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "not_found", message, None),
            Error::InvalidParam { field, .. } => ApiError::invalid(&field, message),
            Error::InvalidInput(_) | Error::GraphMismatch(_) | Error::ConflictingSymmetry { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_input", message, None)
            }
            Error::Json(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_body", message, None),
            Error::Parse { .. } | Error::Io(_) => {
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message, None)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> std::result::Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_body", e.to_string(), None))
}

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub port: u16,
    /// Allowed CORS origin; any origin when unset.
    pub cors_origin: Option<String>,
}

#[derive(Clone)]
struct AppState {
    store: Arc<Store>,
}

pub fn router(store: Arc<Store>, config: &ServiceConfig) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match config.cors_origin.as_deref().map(HeaderValue::from_str) {
        Some(Ok(origin)) => cors.allow_origin(origin),
        _ => cors.allow_origin(Any),
    };
    Router::new()
        .route("/api/corpora", get(corpora))
        .route("/api/corpora/{id}/intervals", get(intervals))
        .route("/api/graph", post(graph))
        .route("/api/graph/recluster", post(recluster))
        .route("/api/timediff", post(timediff))
        .route("/api/features", get(features))
        .route("/api/sentences", get(sentences))
        .layer(cors)
        .with_state(AppState { store })
}

pub async fn serve(store: Arc<Store>, config: ServiceConfig) -> std::io::Result<()> {
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(store, &config)).await
}

async fn corpora(State(state): State<AppState>) -> Json<Vec<CorpusHandle>> {
    Json(state.store.handles())
}

async fn intervals(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Vec<IntervalId>> {
    Ok(Json(state.store.corpus(&id)?.intervals().to_vec()))
}

fn build(store: &Store, request: &GraphRequest, seed: u64) -> std::result::Result<NgotGraph, ApiError> {
    let corpus = store.corpus(&request.corpus_id)?;
    Ok(pipeline::run(&corpus, request, seed)?)
}

async fn graph(State(state): State<AppState>, body: Bytes) -> ApiResult<NgotGraph> {
    let request: GraphRequest = parse_body(&body)?;
    let seed = request.seed_or_random();
    Ok(Json(build(&state.store, &request, seed)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReclusterRequest {
    pub request: GraphRequest,
    /// Fresh random seed when omitted.
    #[serde(default)]
    pub seed: Option<u64>,
}

async fn recluster(State(state): State<AppState>, body: Bytes) -> ApiResult<NgotGraph> {
    let body: ReclusterRequest = parse_body(&body)?;
    let mut request = body.request;
    request.seed = body.seed;
    let seed = request.seed_or_random();
    Ok(Json(build(&state.store, &request, seed)?))
}

/// Either a graph payload or a request to rebuild one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeDiffRequest {
    #[serde(default)]
    pub graph: Option<NgotGraph>,
    #[serde(default)]
    pub request: Option<GraphRequest>,
    pub reference_interval: usize,
}

async fn timediff(State(state): State<AppState>, body: Bytes) -> ApiResult<TimeDiffReport> {
    let body: TimeDiffRequest = parse_body(&body)?;
    let graph = match (body.graph, body.request) {
        (Some(graph), _) => graph,
        (None, Some(request)) => {
            let corpus = state.store.corpus(&request.corpus_id)?;
            pipeline::build_graph(&corpus, &request.params(&corpus))?
        }
        (None, None) => return Err(ApiError::invalid("graph", "provide either `graph` or `request`")),
    };
    Ok(Json(analytics::time_diff(&graph, body.reference_interval)?))
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct FeaturesQuery {
    pub corpus: Option<String>,
    pub words: Option<String>,
    pub scope: Option<String>,
    pub interval: Option<String>,
    pub limit: Option<String>,
}

fn required<'a>(value: &'a Option<String>, field: &str) -> std::result::Result<&'a str, ApiError> {
    value
        .as_deref()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| ApiError::invalid(field, format!("`{field}` is required")))
}

fn optional_number<T: std::str::FromStr>(value: &Option<String>, field: &str) -> std::result::Result<Option<T>, ApiError> {
    match value.as_deref().filter(|v| !v.is_empty()) {
        None => Ok(None),
        Some(v) => v
            .parse()
            .map(Some)
            .map_err(|_| ApiError::invalid(field, format!("`{field}` must be a non-negative integer"))),
    }
}

async fn features(State(state): State<AppState>, Query(q): Query<FeaturesQuery>) -> ApiResult<FeatureRanking> {
    let corpus = state.store.corpus(required(&q.corpus, "corpus")?)?;
    let members: BTreeSet<String> = required(&q.words, "words")?
        .split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect();
    let scope: Scope = match q.scope.as_deref() {
        None | Some("") => {
            if members.len() == 1 {
                Scope::Node
            } else {
                Scope::Cluster
            }
        }
        Some(s) => s.parse()?,
    };
    let interval = optional_number(&q.interval, "interval")?;
    let limit = optional_number(&q.limit, "limit")?.unwrap_or(DEFAULT_LIMIT);
    Ok(Json(evidence::rank_features(corpus.features(), &members, scope, interval, limit)?))
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct SentencesQuery {
    pub corpus: Option<String>,
    pub word: Option<String>,
    pub feature: Option<String>,
    pub interval: Option<String>,
    pub limit: Option<String>,
}

async fn sentences(State(state): State<AppState>, Query(q): Query<SentencesQuery>) -> ApiResult<Vec<SentenceRecord>> {
    let corpus = state.store.corpus(required(&q.corpus, "corpus")?)?;
    let word = required(&q.word, "word")?;
    let feature = q.feature.as_deref().filter(|f| !f.is_empty());
    let interval = optional_number(&q.interval, "interval")?;
    let limit = optional_number(&q.limit, "limit")?.unwrap_or(DEFAULT_LIMIT);
    Ok(Json(evidence::fetch_evidence(&corpus, word, feature, interval, limit)?))
}
