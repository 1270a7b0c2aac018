#![allow(dead_code)]

use std::path::Path;

use reqwest::{Client, Response, StatusCode};
use serde_json::{json, Value};
use tempfile::TempDir;
use tlx_core::scoring::{all_pairs, ComparisonChoice};
use tlx_core::store::Store;
use tlx_core::Dimension;
use tlx_server::{app, AppState};

pub const ADMIN: &str = "admin-test-token";

pub struct TestServer {
    pub base: String,
    pub client: Client,
    pub dir: TempDir,
    task: tokio::task::JoinHandle<()>,
}

impl Drop for TestServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

pub async fn spawn(static_dir: Option<&Path>) -> TestServer {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let router = app(AppState::new(store, ADMIN), static_dir);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let task = tokio::spawn(async move {
        axum::serve(listener, router).await.unwrap();
    });
    TestServer {
        base: format!("http://{addr}/api"),
        client: Client::new(),
        dir,
        task,
    }
}

/// Comparison choices that rank `order[0]` above everything else, and so on.
pub fn ranked_choices(order: [Dimension; 6]) -> Vec<ComparisonChoice> {
    let rank = |d: Dimension| order.iter().position(|&x| x == d).unwrap();
    all_pairs()
        .into_iter()
        .map(|p| {
            let winner = if rank(p.a()) < rank(p.b()) {
                p.a()
            } else {
                p.b()
            };
            ComparisonChoice::new(p, winner)
        })
        .collect()
}

pub fn ratings_body(values: [i64; 6]) -> Value {
    let map: serde_json::Map<String, Value> = Dimension::ALL
        .iter()
        .zip(values)
        .map(|(d, v)| (d.id().to_owned(), json!(v)))
        .collect();
    json!({ "ratings": map })
}

pub fn choices_body(choices: &[ComparisonChoice]) -> Value {
    json!({ "choices": choices })
}

pub struct Session {
    pub participant_id: String,
    pub token: String,
}

impl TestServer {
    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn admin_get(&self, path: &str) -> Response {
        self.client
            .get(self.url(path))
            .bearer_auth(ADMIN)
            .send()
            .await
            .unwrap()
    }

    pub async fn admin_post(&self, path: &str, body: &Value) -> Response {
        self.client
            .post(self.url(path))
            .bearer_auth(ADMIN)
            .json(body)
            .send()
            .await
            .unwrap()
    }

    pub async fn create_experiment(&self, name: &str) -> Value {
        let resp = self
            .admin_post("/experiments", &json!({ "name": name }))
            .await;
        assert_eq!(resp.status(), StatusCode::CREATED);
        resp.json().await.unwrap()
    }

    pub async fn join(&self, code: &str) -> Response {
        self.client
            .post(self.url("/join"))
            .json(&json!({ "join_code": code }))
            .send()
            .await
            .unwrap()
    }

    pub async fn join_ok(&self, code: &str) -> Session {
        let resp = self.join(code).await;
        assert_eq!(resp.status(), StatusCode::CREATED);
        let body: Value = resp.json().await.unwrap();
        Session {
            participant_id: body["participant_id"].as_str().unwrap().to_owned(),
            token: body["session_token"].as_str().unwrap().to_owned(),
        }
    }

    pub async fn participant_get(&self, s: &Session, suffix: &str) -> Response {
        self.client
            .get(self.url(&format!("/participants/{}{suffix}", s.participant_id)))
            .bearer_auth(&s.token)
            .send()
            .await
            .unwrap()
    }

    pub async fn participant_post(&self, s: &Session, suffix: &str, body: &Value) -> Response {
        self.client
            .post(self.url(&format!("/participants/{}{suffix}", s.participant_id)))
            .bearer_auth(&s.token)
            .json(body)
            .send()
            .await
            .unwrap()
    }
}
