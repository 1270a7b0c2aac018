use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use tlx_core::store::StoreError;

/// JSON error body: `{"code", "message", "http_status"}`.
///
/// `code` is always one of the strings listed in the README's API section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    pub code: &'static str,
    pub message: String,
    pub http_status: u16,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            http_status: status.as_u16(),
        }
    }

    pub fn unauthorized() -> Self {
        ApiError::new(
            StatusCode::UNAUTHORIZED,
            "unauthorized",
            "missing or invalid bearer token",
        )
    }

    pub fn invalid_body(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_body", message)
    }

    pub fn not_found() -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal_error", message)
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        let message = err.to_string();
        let (status, code) = match &err {
            StoreError::InvalidName => (StatusCode::BAD_REQUEST, "invalid_name"),
            StoreError::Validation(e) => (StatusCode::BAD_REQUEST, e.code()),
            StoreError::UnknownExperiment(_) => (StatusCode::NOT_FOUND, "unknown_experiment"),
            StoreError::UnknownParticipant(_) => (StatusCode::NOT_FOUND, "unknown_participant"),
            StoreError::UnknownJoinCode(_) => (StatusCode::NOT_FOUND, "unknown_join_code"),
            StoreError::WrongState { .. } => (StatusCode::CONFLICT, "wrong_state"),
            StoreError::ConflictingResubmission { .. } => {
                (StatusCode::CONFLICT, "conflicting_resubmission")
            }
            StoreError::ExperimentClosed(_) => (StatusCode::GONE, "experiment_closed"),
            StoreError::Storage { .. }
            | StoreError::Corrupt { .. }
            | StoreError::UnsupportedFormat { .. } => {
                tracing::error!(error = %err, "store failure");
                (StatusCode::INTERNAL_SERVER_ERROR, "storage_failure")
            }
        };
        ApiError::new(status, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}
