use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tlx_core::dimension::{descriptors, DimensionDescriptor};
use tlx_core::export::{summarize, to_csv, to_json, ExperimentSummary};
use tlx_core::scoring::{ComparisonChoice, ComparisonSchedule, RatingInput, WorkloadResult};
use tlx_core::store::{
    ExperimentRecord, ParticipantRecord, SessionState, Store, StoreError, StoredResult,
};
use tlx_core::Timestamp;

use crate::auth::{tokens_match, Admin, BearerToken};
use crate::error::ApiError;
use crate::AppState;

/// Runs a store call on the blocking pool; store methods do file I/O.
async fn blocking<T, F>(state: &AppState, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Store) -> Result<T, StoreError> + Send + 'static,
{
    let store = state.store.clone();
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(ApiError::from)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid_body(e.to_string()))
}

/// Loads the participant and checks the session token against it.
async fn authorize_participant(
    state: &AppState,
    participant_id: &str,
    token: &str,
) -> Result<ParticipantRecord, ApiError> {
    let pid = participant_id.to_owned();
    let record = blocking(state, move |s| s.get_participant(&pid)).await?;
    if tokens_match(token, &record.session_token) {
        Ok(record)
    } else {
        Err(ApiError::unauthorized())
    }
}

// ---------------------------------------------------------------------------
// Experimenter routes

#[derive(Deserialize)]
struct CreateExperiment {
    name: String,
}

pub async fn create_experiment(
    _: Admin,
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<ExperimentRecord>), ApiError> {
    let req: CreateExperiment = parse_body(&body)?;
    let record = blocking(&state, move |s| s.create_experiment(&req.name)).await?;
    Ok((StatusCode::CREATED, Json(record)))
}

pub async fn list_experiments(
    _: Admin,
    State(state): State<AppState>,
) -> Result<Json<Vec<ExperimentRecord>>, ApiError> {
    Ok(Json(blocking(&state, |s| Ok(s.list_experiments())).await?))
}

pub async fn get_experiment(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ExperimentRecord>, ApiError> {
    Ok(Json(
        blocking(&state, move |s| s.get_experiment(&id)).await?,
    ))
}

pub async fn close_experiment(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ExperimentRecord>, ApiError> {
    Ok(Json(
        blocking(&state, move |s| s.close_experiment(&id)).await?,
    ))
}

/// Participant listing for experimenters; session tokens are never included.
#[derive(Serialize)]
pub struct ParticipantView {
    pub participant_id: String,
    pub state: SessionState,
    pub created_at: Timestamp,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub completed_at: Option<Timestamp>,
}

impl From<ParticipantRecord> for ParticipantView {
    fn from(r: ParticipantRecord) -> Self {
        ParticipantView {
            participant_id: r.participant_id,
            state: r.state,
            created_at: r.created_at,
            completed_at: r.completed_at,
        }
    }
}

pub async fn list_participants(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Vec<ParticipantView>>, ApiError> {
    let records = blocking(&state, move |s| s.list_participants(&id)).await?;
    Ok(Json(
        records.into_iter().map(ParticipantView::from).collect(),
    ))
}

pub async fn list_results(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Vec<StoredResult>>, ApiError> {
    Ok(Json(blocking(&state, move |s| s.list_results(&id)).await?))
}

pub async fn summary(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ExperimentSummary>, ApiError> {
    let results = blocking(&state, move |s| s.list_results(&id)).await?;
    Ok(Json(summarize(&results)))
}

pub async fn export(
    _: Admin,
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let format = query.get("format").map(String::as_str).unwrap_or("csv");
    let (content_type, extension) = match format {
        "csv" => ("text/csv; charset=utf-8", "csv"),
        "json" => ("application/json", "json"),
        other => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "invalid_format",
                format!("unsupported export format {other:?}, expected csv or json"),
            ))
        }
    };
    let (experiment, results) = blocking(&state, move |s| {
        Ok((s.get_experiment(&id)?, s.list_results(&id)?))
    })
    .await?;
    let body = match extension {
        "csv" => to_csv(&experiment, &results),
        _ => to_json(&experiment, &results),
    };
    let disposition = format!(
        "attachment; filename=\"{}.{extension}\"",
        experiment.experiment_id
    );
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static(content_type)),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&disposition)
                    .map_err(|e| ApiError::internal(e.to_string()))?,
            ),
        ],
        body,
    )
        .into_response())
}

// ---------------------------------------------------------------------------
// Participant routes

#[derive(Deserialize)]
struct JoinRequest {
    join_code: String,
}

#[derive(Serialize)]
pub struct ExperimentInfo {
    pub name: String,
}

#[derive(Serialize)]
pub struct JoinResponse {
    pub participant_id: String,
    pub session_token: String,
    pub state: SessionState,
    pub experiment: ExperimentInfo,
    pub dimensions: Vec<DimensionDescriptor>,
}

pub async fn join(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<JoinResponse>), ApiError> {
    let req: JoinRequest = parse_body(&body)?;
    let (experiment, participant) = blocking(&state, move |s| s.join(&req.join_code)).await?;
    Ok((
        StatusCode::CREATED,
        Json(JoinResponse {
            participant_id: participant.participant_id,
            session_token: participant.session_token,
            state: participant.state,
            experiment: ExperimentInfo {
                name: experiment.name,
            },
            dimensions: descriptors(),
        }),
    ))
}

#[derive(Serialize)]
pub struct SessionView {
    pub participant_id: String,
    pub state: SessionState,
}

pub async fn session(
    State(state): State<AppState>,
    Path(pid): Path<String>,
    BearerToken(token): BearerToken,
) -> Result<Json<SessionView>, ApiError> {
    let record = authorize_participant(&state, &pid, &token).await?;
    Ok(Json(SessionView {
        participant_id: record.participant_id,
        state: record.state,
    }))
}

pub async fn schedule(
    State(state): State<AppState>,
    Path(pid): Path<String>,
    BearerToken(token): BearerToken,
) -> Result<Json<ComparisonSchedule>, ApiError> {
    authorize_participant(&state, &pid, &token).await?;
    Ok(Json(blocking(&state, move |s| s.schedule(&pid)).await?))
}

#[derive(Deserialize)]
struct RatingsRequest {
    ratings: RatingInput,
}

pub async fn submit_ratings(
    State(state): State<AppState>,
    Path(pid): Path<String>,
    BearerToken(token): BearerToken,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    authorize_participant(&state, &pid, &token).await?;
    let req: RatingsRequest = parse_body(&body)?;
    let record = blocking(&state, move |s| s.save_ratings(&pid, &req.ratings)).await?;
    Ok(Json(SessionView {
        participant_id: record.participant_id,
        state: record.state,
    }))
}

#[derive(Deserialize)]
struct ComparisonsRequest {
    choices: Vec<ComparisonChoice>,
}

pub async fn submit_comparisons(
    State(state): State<AppState>,
    Path(pid): Path<String>,
    BearerToken(token): BearerToken,
    body: Bytes,
) -> Result<Json<WorkloadResult>, ApiError> {
    authorize_participant(&state, &pid, &token).await?;
    let req: ComparisonsRequest = parse_body(&body)?;
    let stored = blocking(&state, move |s| s.save_comparisons(&pid, &req.choices)).await?;
    Ok(Json(stored.result))
}

pub async fn result(
    State(state): State<AppState>,
    Path(pid): Path<String>,
    BearerToken(token): BearerToken,
) -> Result<Json<WorkloadResult>, ApiError> {
    authorize_participant(&state, &pid, &token).await?;
    let stored = blocking(&state, move |s| s.get_result(&pid)).await?;
    Ok(Json(stored.result))
}

pub async fn api_not_found() -> ApiError {
    ApiError::not_found()
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "method_not_allowed",
        "method not allowed on this route",
    )
}
