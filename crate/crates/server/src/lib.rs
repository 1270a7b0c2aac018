//! HTTP/JSON service for running NASA-TLX experiments.
//!
//! Experimenters manage experiments and read results under `/api/experiments`
//! with the admin bearer token. Participants join with a join code, then
//! submit ratings and comparisons under `/api/participants/{id}` with the
//! session token they received on joining. Anything outside `/api` is served
//! from the static UI directory.

mod auth;
pub mod config;
mod error;
mod routes;

use std::path::Path;
use std::sync::Arc;

use axum::response::Html;
use axum::routing::{get, post};
use axum::Router;
use tlx_core::store::Store;
use tower_http::services::{ServeDir, ServeFile};

pub use config::Config;
pub use error::ApiError;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub admin_token: Arc<str>,
}

impl AppState {
    pub fn new(store: Store, admin_token: impl Into<Arc<str>>) -> Self {
        AppState {
            store: Arc::new(store),
            admin_token: admin_token.into(),
        }
    }
}

const PLACEHOLDER_INDEX: &str = "<!doctype html>\n<html lang=\"en\"><head><meta charset=\"utf-8\"><title>NASA-TLX</title></head>\n<body><p>The web UI has not been built. The JSON API is available under <code>/api</code>.</p></body></html>\n";

fn api_router() -> Router<AppState> {
    Router::new()
        .route(
            "/experiments",
            post(routes::create_experiment).get(routes::list_experiments),
        )
        .route("/experiments/{id}", get(routes::get_experiment))
        .route("/experiments/{id}/close", post(routes::close_experiment))
        .route(
            "/experiments/{id}/participants",
            get(routes::list_participants),
        )
        .route("/experiments/{id}/results", get(routes::list_results))
        .route("/experiments/{id}/summary", get(routes::summary))
        .route("/experiments/{id}/export", get(routes::export))
        .route("/join", post(routes::join))
        .route("/participants/{pid}", get(routes::session))
        .route("/participants/{pid}/schedule", get(routes::schedule))
        .route("/participants/{pid}/ratings", post(routes::submit_ratings))
        .route(
            "/participants/{pid}/comparisons",
            post(routes::submit_comparisons),
        )
        .route("/participants/{pid}/result", get(routes::result))
        .fallback(routes::api_not_found)
        .method_not_allowed_fallback(routes::method_not_allowed)
}

/// Builds the application. `static_dir`, when it exists, is served at `/`
/// with `index.html` as the fallback for client-side routes.
pub fn app(state: AppState, static_dir: Option<&Path>) -> Router {
    let router = Router::new().nest("/api", api_router());
    let router = match static_dir.filter(|d| d.is_dir()) {
        Some(dir) => router
            .fallback_service(ServeDir::new(dir).fallback(ServeFile::new(dir.join("index.html")))),
        None => router.fallback(get(|| async { Html(PLACEHOLDER_INDEX) })),
    };
    router.with_state(state)
}
