use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use pensionlab_core::{project, run_sweep, EngineError, ProjectionRequest, SweepSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::store::{NewScenario, ScenarioStore, ScenarioUpdate, StoreError};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<ScenarioStore>,
}

impl AppState {
    pub fn new(store: ScenarioStore) -> Self {
        AppState {
            store: Arc::new(store),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/project", post(project_handler))
        .route("/api/v1/sweep", post(sweep_handler))
        .route(
            "/api/v1/scenarios",
            get(list_scenarios).post(create_scenario),
        )
        .route(
            "/api/v1/scenarios/{id}",
            get(get_scenario)
                .put(update_scenario)
                .delete(delete_scenario),
        )
        .with_state(state)
}

/// Error payload: `{"error": kind, "message": ..., "field": ...}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub field: Option<String>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(
        status: StatusCode,
        kind: &str,
        message: impl Into<String>,
        field: Option<String>,
    ) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: kind.to_string(),
                message: message.into(),
                field,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let field = e.field_name().map(str::to_string);
        if e.is_validation() {
            ApiError::new(StatusCode::BAD_REQUEST, "validation", e.to_string(), field)
        } else {
            ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "domain",
                e.to_string(),
                field,
            )
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match &e {
            StoreError::NotFound(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string(), None)
            }
            StoreError::Stale { .. } => ApiError::new(
                StatusCode::CONFLICT,
                "stale",
                e.to_string(),
                Some("expected_updated_at".into()),
            ),
            StoreError::Invalid { field, .. } => ApiError::new(
                StatusCode::BAD_REQUEST,
                "validation",
                e.to_string(),
                Some(field.to_string()),
            ),
            StoreError::Corrupt { .. } | StoreError::Io(_) => ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "storage",
                e.to_string(),
                None,
            ),
        }
    }
}

/// Strict JSON body parsing with the failing path in the message.
fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "validation",
            "request body is empty",
            None,
        ));
    }
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = (path != ".").then_some(path);
        let message = match &field {
            Some(f) => format!("{f}: {}", e.inner()),
            None => e.inner().to_string(),
        };
        ApiError::new(StatusCode::BAD_REQUEST, "validation", message, field)
    })
}

async fn health() -> &'static str {
    "ok"
}

async fn project_handler(body: Bytes) -> Result<Response, ApiError> {
    let req: ProjectionRequest = parse_body(&body)?;
    let result = project(&req)?;
    Ok(Json(result).into_response())
}

#[derive(Debug, Deserialize)]
pub struct SweepQuery {
    format: Option<String>,
}

async fn sweep_handler(Query(q): Query<SweepQuery>, body: Bytes) -> Result<Response, ApiError> {
    let csv = match q.format.as_deref() {
        None | Some("json") => false,
        Some("csv") => true,
        Some(other) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "validation",
                format!("unknown format `{other}`"),
                Some("format".into()),
            ))
        }
    };
    let spec: SweepSpec = parse_body(&body)?;
    let table = tokio::task::spawn_blocking(move || run_sweep(&spec))
        .await
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                e.to_string(),
                None,
            )
        })?
        .stamped(Utc::now());
    if csv {
        Ok((
            [(header::CONTENT_TYPE, "text/csv; charset=utf-8")],
            table.to_csv(),
        )
            .into_response())
    } else {
        Ok(Json(table).into_response())
    }
}

async fn list_scenarios(State(state): State<AppState>) -> Response {
    Json(state.store.list()).into_response()
}

async fn get_scenario(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    Ok(Json(state.store.get(&id)?).into_response())
}

async fn create_scenario(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let new: NewScenario = parse_body(&body)?;
    let store = state.store.clone();
    let saved = tokio::task::spawn_blocking(move || store.create(new))
        .await
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                e.to_string(),
                None,
            )
        })??;
    Ok((StatusCode::CREATED, Json(saved)).into_response())
}

async fn update_scenario(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let update: ScenarioUpdate = parse_body(&body)?;
    let store = state.store.clone();
    let saved = tokio::task::spawn_blocking(move || store.update(&id, update))
        .await
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                e.to_string(),
                None,
            )
        })??;
    Ok(Json(saved).into_response())
}

async fn delete_scenario(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let store = state.store.clone();
    tokio::task::spawn_blocking(move || store.delete(&id))
        .await
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal",
                e.to_string(),
                None,
            )
        })??;
    Ok(StatusCode::NO_CONTENT.into_response())
}
