use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use super::store::{AnnotationStore, MeetingSummary, MeetingView, Progress};
use crate::corpus::AlignmentEntry;
use crate::error::Error;

/// JSON error body: `{code, message, details}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub details: Value,
    #[serde(skip)]
    status: u16,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>, details: Value) -> Self {
        ApiError {
            code: code.into(),
            message: message.into(),
            details,
            status: status.as_u16(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::NotFound(what) => ApiError::new(StatusCode::NOT_FOUND, "not_found", message, json!({ "resource": what })),
            Error::Conflict { expected, current } => ApiError::new(
                StatusCode::CONFLICT,
                "revision_conflict",
                message,
                json!({ "expected_revision": expected, "current_revision": current }),
            ),
            Error::SessionClosed(id) => {
                ApiError::new(StatusCode::CONFLICT, "session_closed", message, json!({ "meeting_id": id }))
            }
            Error::Monotonicity {
                t_seg,
                r_seg,
                neighbor_t_seg,
                neighbor_r_seg,
            } => ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "monotonicity",
                message,
                json!({
                    "t_seg": t_seg,
                    "r_seg": r_seg,
                    "neighbor": { "t_seg": neighbor_t_seg, "r_seg": neighbor_r_seg },
                }),
            ),
            Error::Validation(_) | Error::Config(_) | Error::DimensionMismatch { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message, Value::Null)
            }
            Error::Io { .. } | Error::Parse { .. } => {
                log::error!("{message}");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message, Value::Null)
            }
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", r.body_text(), Value::Null)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionRequest {
    pub r_seg: usize,
    #[serde(default)]
    pub irrelevant: bool,
    pub expected_revision: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionResponse {
    pub revision: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SubmitRequest {
    pub expected_revision: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitResponse {
    pub meeting_id: String,
    pub revision: u64,
    pub annotator_score: f64,
}

async fn list_meetings(State(store): State<Arc<AnnotationStore>>) -> Json<Vec<MeetingSummary>> {
    Json(store.list())
}

async fn get_meeting(State(store): State<Arc<AnnotationStore>>, UrlPath(id): UrlPath<String>) -> ApiResult<MeetingView> {
    let view = tokio::task::spawn_blocking(move || store.view(&id))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string(), Value::Null))??;
    Ok(Json(view))
}

async fn put_entry(
    State(store): State<Arc<AnnotationStore>>,
    UrlPath((id, t_seg)): UrlPath<(String, usize)>,
    body: std::result::Result<Json<CorrectionRequest>, JsonRejection>,
) -> ApiResult<CorrectionResponse> {
    let Json(req) = body?;
    let entry = AlignmentEntry {
        t_seg,
        r_seg: req.r_seg,
        irrelevant: req.irrelevant,
    };
    let revision = store.submit_correction(&id, entry, req.expected_revision)?;
    Ok(Json(CorrectionResponse { revision }))
}

async fn submit(
    State(store): State<Arc<AnnotationStore>>,
    UrlPath(id): UrlPath<String>,
    body: Option<Json<SubmitRequest>>,
) -> ApiResult<SubmitResponse> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let s = store.submit(&id, req.expected_revision)?;
    let score = crate::metrics::annotator_score(&s.pre_alignment, &s.working_alignment)?;
    Ok(Json(SubmitResponse {
        meeting_id: id,
        revision: s.revision,
        annotator_score: score,
    }))
}

async fn progress(State(store): State<Arc<AnnotationStore>>) -> ApiResult<Progress> {
    Ok(Json(store.progress()?))
}

/// API routes, plus static files from `ui_dir` at `/` when given.
pub fn router(store: Arc<AnnotationStore>, ui_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/meetings", get(list_meetings))
        .route("/api/meetings/{id}", get(get_meeting))
        .route("/api/meetings/{id}/entries/{t_seg}", put(put_entry))
        .route("/api/meetings/{id}/submit", post(submit))
        .route("/api/progress", get(progress))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(store: Arc<AnnotationStore>, addr: SocketAddr, ui_dir: Option<&Path>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("annotation service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store, ui_dir)).await
}
