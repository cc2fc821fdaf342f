//! HTTP/JSON transport for [`Explorer`].
//!
//! Errors come back as `{"error": <code>, "message": <text>}` where `code` is
//! [`Error::code`]. Lookups of unknown ids map to 404, malformed requests to
//! 400, a missing model to 409.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;

use super::{Explorer, DEFAULT_CURVE_SAMPLES, DEFAULT_SUBSAMPLE};
use crate::error::Error;
use crate::filter::{OpenBounds, DEFAULT_TOLERANCE};
use crate::neighbors::DEFAULT_K;

pub const DEFAULT_PORT: u16 = 7341;

struct ApiError(Error);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::UnknownDataset(_) | Error::UnknownSession(_) | Error::UnknownRow(_) => {
                StatusCode::NOT_FOUND
            }
            Error::ModelNotLoaded => StatusCode::CONFLICT,
            Error::Io(_) | Error::Csv(_) | Error::PortInUse(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        let body = json!({ "error": self.0.code(), "message": self.0.to_string() });
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> crate::Result<T> + Send + 'static,
) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError),
        Err(e) => Err(ApiError(Error::Io(std::io::Error::other(e.to_string())))),
    }
}

#[derive(Debug, Default, Deserialize)]
struct ColumnsQuery {
    dataset: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
struct CreateSession {
    dataset: Option<String>,
    n: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
struct BoundsRequest {
    #[serde(default)]
    bounds: OpenBounds,
    tolerance: Option<f64>,
    k: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct SensitivityRequest {
    axis: String,
    #[serde(default)]
    overrides: BTreeMap<String, f64>,
    n_samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct ExportRequest {
    rows: Vec<u64>,
}

async fn columns(
    State(ex): State<Arc<Explorer>>,
    q: axum::extract::Query<ColumnsQuery>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(ex.columns(q.dataset.as_deref())?))
}

async fn create_session(
    State(ex): State<Arc<Explorer>>,
    body: Option<Json<CreateSession>>,
) -> ApiResult<impl IntoResponse> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let info = blocking(move || {
        ex.create_session(
            req.dataset.as_deref(),
            req.n.unwrap_or(DEFAULT_SUBSAMPLE),
            req.seed.unwrap_or(0),
        )
    })
    .await?;
    Ok((StatusCode::CREATED, Json(info)))
}

async fn points(
    State(ex): State<Arc<Explorer>>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || ex.points(&id)).await?))
}

async fn bounds(
    State(ex): State<Arc<Explorer>>,
    Path(id): Path<String>,
    Json(req): Json<BoundsRequest>,
) -> ApiResult<impl IntoResponse> {
    let response = blocking(move || {
        let stats = ex.with_session(&id, |s| Ok(s.stats().clone()))?;
        let spec = req.bounds.resolve(&stats)?;
        ex.update_bounds(
            &id,
            spec,
            req.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            req.k.unwrap_or(DEFAULT_K),
        )
    })
    .await?;
    Ok(Json(response))
}

async fn sensitivity(
    State(ex): State<Arc<Explorer>>,
    Path(id): Path<String>,
    Json(req): Json<SensitivityRequest>,
) -> ApiResult<impl IntoResponse> {
    let curve = blocking(move || {
        ex.sensitivity(
            &id,
            &req.axis,
            &req.overrides,
            req.n_samples.unwrap_or(DEFAULT_CURVE_SAMPLES),
        )
    })
    .await?;
    Ok(Json(curve))
}

async fn export(
    State(ex): State<Arc<Explorer>>,
    Path(id): Path<String>,
    Json(req): Json<ExportRequest>,
) -> ApiResult<impl IntoResponse> {
    let csv = blocking(move || ex.export(&id, &req.rows)).await?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], csv))
}

async fn model(State(ex): State<Arc<Explorer>>) -> impl IntoResponse {
    Json(ex.model_status())
}

pub fn router(explorer: Arc<Explorer>) -> Router {
    Router::new()
        .route("/api/columns", get(columns))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/points", get(points))
        .route("/api/sessions/{id}/bounds", post(bounds))
        .route("/api/sessions/{id}/sensitivity", post(sensitivity))
        .route("/api/sessions/{id}/export", post(export))
        .route("/api/model", get(model))
        .with_state(explorer)
}

/// Binds a listener, reporting an occupied port as [`Error::PortInUse`].
pub async fn bind(addr: SocketAddr) -> crate::Result<TcpListener> {
    TcpListener::bind(addr).await.map_err(|e| {
        if e.kind() == std::io::ErrorKind::AddrInUse {
            Error::PortInUse(addr.port())
        } else {
            Error::Io(e)
        }
    })
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    explorer: Arc<Explorer>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> crate::Result<()> {
    axum::serve(listener, router(explorer))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}
