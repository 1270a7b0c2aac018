mod common;

use reqwest::StatusCode;
use serde_json::{json, Value};
use tlx_core::Dimension;

use common::{choices_body, ranked_choices, ratings_body, spawn, Session, TestServer, ADMIN};

async fn error_code(resp: reqwest::Response) -> (StatusCode, String) {
    let status = resp.status();
    let body: Value = resp.json().await.unwrap();
    assert_eq!(body["http_status"], status.as_u16());
    (status, body["code"].as_str().unwrap().to_owned())
}

async fn setup() -> (TestServer, String, String) {
    let server = spawn(None).await;
    let exp = server.create_experiment("Study").await;
    let id = exp["experiment_id"].as_str().unwrap().to_owned();
    let code = exp["join_code"].as_str().unwrap().to_owned();
    (server, id, code)
}

#[tokio::test]
async fn experimenter_routes_require_the_admin_token() {
    let (server, id, code) = setup().await;
    let s = server.join_ok(&code).await;

    let anon = server
        .client
        .get(server.url("/experiments"))
        .send()
        .await
        .unwrap();
    assert_eq!(
        error_code(anon).await,
        (StatusCode::UNAUTHORIZED, "unauthorized".into())
    );

    for path in [
        "/experiments".to_owned(),
        format!("/experiments/{id}/results"),
        format!("/experiments/{id}/export"),
    ] {
        let resp = server
            .client
            .get(server.url(&path))
            .bearer_auth(&s.token)
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), StatusCode::UNAUTHORIZED, "{path}");
    }
}

#[tokio::test]
async fn participant_routes_reject_the_admin_token_and_other_sessions() {
    let (server, _, code) = setup().await;
    let a = server.join_ok(&code).await;
    let b = server.join_ok(&code).await;

    let as_admin = Session {
        participant_id: a.participant_id.clone(),
        token: ADMIN.into(),
    };
    let resp = server.participant_get(&as_admin, "/schedule").await;
    assert_eq!(resp.status(), StatusCode::UNAUTHORIZED);

    let borrowed = Session {
        participant_id: a.participant_id.clone(),
        token: b.token.clone(),
    };
    let resp = server
        .participant_post(&borrowed, "/ratings", &ratings_body([50; 6]))
        .await;
    assert_eq!(resp.status(), StatusCode::UNAUTHORIZED);

    let state: Value = server.participant_get(&a, "").await.json().await.unwrap();
    assert_eq!(state["state"], "created");
}

#[tokio::test]
async fn out_of_range_rating_is_rejected_and_state_unchanged() {
    let (server, _, code) = setup().await;
    let s = server.join_ok(&code).await;
    let resp = server
        .participant_post(&s, "/ratings", &ratings_body([150, 0, 0, 0, 0, 0]))
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "rating_out_of_range".into())
    );
    let state: Value = server.participant_get(&s, "").await.json().await.unwrap();
    assert_eq!(state["state"], "created");

    let mut body = ratings_body([10; 6]);
    body["ratings"].as_object_mut().unwrap().remove("effort");
    let resp = server.participant_post(&s, "/ratings", &body).await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "missing_dimension".into())
    );

    let resp = server
        .client
        .post(server.url(&format!("/participants/{}/ratings", s.participant_id)))
        .bearer_auth(&s.token)
        .header("content-type", "application/json")
        .body("{not json")
        .send()
        .await
        .unwrap();
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "invalid_body".into())
    );
}

#[tokio::test]
async fn comparisons_before_ratings_conflict() {
    let (server, _, code) = setup().await;
    let s = server.join_ok(&code).await;
    let resp = server
        .participant_post(
            &s,
            "/comparisons",
            &choices_body(&ranked_choices(Dimension::ALL)),
        )
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::CONFLICT, "wrong_state".into())
    );

    let resp = server.participant_get(&s, "/result").await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::CONFLICT, "wrong_state".into())
    );
}

#[tokio::test]
async fn incomplete_comparison_set_is_rejected() {
    let (server, _, code) = setup().await;
    let s = server.join_ok(&code).await;
    server
        .participant_post(&s, "/ratings", &ratings_body([20; 6]))
        .await;
    let mut choices = ranked_choices(Dimension::ALL);
    choices.pop();
    let resp = server
        .participant_post(&s, "/comparisons", &choices_body(&choices))
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "missing_pair".into())
    );
}

#[tokio::test]
async fn retries_are_idempotent_and_changes_conflict() {
    let (server, _, code) = setup().await;
    let s = server.join_ok(&code).await;
    let ratings = ratings_body([55, 30, 45, 70, 60, 40]);
    for _ in 0..2 {
        let resp = server.participant_post(&s, "/ratings", &ratings).await;
        assert_eq!(resp.status(), StatusCode::OK);
    }
    let resp = server
        .participant_post(&s, "/ratings", &ratings_body([1; 6]))
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::CONFLICT, "conflicting_resubmission".into())
    );

    use Dimension::*;
    let choices = choices_body(&ranked_choices([
        Performance,
        Effort,
        MentalDemand,
        TemporalDemand,
        PhysicalDemand,
        Frustration,
    ]));
    let first: Value = server
        .participant_post(&s, "/comparisons", &choices)
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(first["weighted_score"], json!(58.33));
    assert_eq!(first["raw_score"], json!(50.0));
    assert_eq!(first["weights"]["performance"], 5);
    let retry: Value = server
        .participant_post(&s, "/comparisons", &choices)
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(first, retry);
    let fetched: Value = server
        .participant_get(&s, "/result")
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(first, fetched);

    let resp = server
        .participant_post(
            &s,
            "/comparisons",
            &choices_body(&ranked_choices(Dimension::ALL)),
        )
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::CONFLICT, "conflicting_resubmission".into())
    );
}

#[tokio::test]
async fn join_response_carries_dimensions_and_schedule_covers_every_pair() {
    let (server, _, code) = setup().await;
    let resp = server.join(&code.to_lowercase()).await;
    assert_eq!(resp.status(), StatusCode::CREATED);
    let body: Value = resp.json().await.unwrap();
    assert_eq!(body["state"], "created");
    assert_eq!(body["experiment"]["name"], "Study");
    let dims = body["dimensions"].as_array().unwrap();
    assert_eq!(dims.len(), 6);
    assert_eq!(dims[0]["id"], "mental_demand");

    let s = Session {
        participant_id: body["participant_id"].as_str().unwrap().into(),
        token: body["session_token"].as_str().unwrap().into(),
    };
    let sched: Value = server
        .participant_get(&s, "/schedule")
        .await
        .json()
        .await
        .unwrap();
    let again: Value = server
        .participant_get(&s, "/schedule")
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(sched, again);
    assert!(sched["seed"].is_string());
    let mut pairs: Vec<(String, String)> = sched["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|it| {
            (
                it["a"].as_str().unwrap().to_owned(),
                it["b"].as_str().unwrap().to_owned(),
            )
        })
        .collect();
    pairs.sort();
    pairs.dedup();
    assert_eq!(pairs.len(), 15);

    let resp = server.join("ZZZZZZ").await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::NOT_FOUND, "unknown_join_code".into())
    );
}

#[tokio::test]
async fn closed_experiments_refuse_new_participants() {
    let (server, id, code) = setup().await;
    let early = server.join_ok(&code).await;
    let closed: Value = server
        .admin_post(&format!("/experiments/{id}/close"), &json!({}))
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(closed["status"], "closed");

    let resp = server.join(&code).await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::GONE, "experiment_closed".into())
    );

    // Sessions already under way can still finish.
    server
        .participant_post(&early, "/ratings", &ratings_body([40; 6]))
        .await;
    let resp = server
        .participant_post(
            &early,
            "/comparisons",
            &choices_body(&ranked_choices(Dimension::ALL)),
        )
        .await;
    assert_eq!(resp.status(), StatusCode::OK);
}

#[tokio::test]
async fn export_headers_and_formats() {
    let (server, id, code) = setup().await;
    let s = server.join_ok(&code).await;
    server
        .participant_post(&s, "/ratings", &ratings_body([40; 6]))
        .await;
    server
        .participant_post(
            &s,
            "/comparisons",
            &choices_body(&ranked_choices(Dimension::ALL)),
        )
        .await;

    let resp = server.admin_get(&format!("/experiments/{id}/export")).await;
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "text/csv; charset=utf-8");
    assert_eq!(
        resp.headers()["content-disposition"],
        format!("attachment; filename=\"{id}.csv\"").as_str()
    );
    let csv = resp.text().await.unwrap();
    assert!(csv.starts_with("experiment_id,participant_id,completed_at,rating_mental,"));
    assert!(csv.ends_with(",40.00,40.00\n"));

    let resp = server
        .admin_get(&format!("/experiments/{id}/export?format=json"))
        .await;
    assert_eq!(resp.headers()["content-type"], "application/json");
    assert_eq!(
        resp.headers()["content-disposition"],
        format!("attachment; filename=\"{id}.json\"").as_str()
    );
    let body: Value = resp.json().await.unwrap();
    assert_eq!(body["format_version"], 1);
    assert_eq!(body["results"].as_array().unwrap().len(), 1);

    let resp = server
        .admin_get(&format!("/experiments/{id}/export?format=xlsx"))
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "invalid_format".into())
    );
}

#[tokio::test]
async fn experimenter_views() {
    let (server, id, code) = setup().await;
    let list: Value = server.admin_get("/experiments").await.json().await.unwrap();
    assert_eq!(list.as_array().unwrap().len(), 1);

    let empty: Value = server
        .admin_get(&format!("/experiments/{id}/summary"))
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(empty["n_complete"], 0);
    assert_eq!(empty["weighted_score"]["mean"], Value::Null);

    let s = server.join_ok(&code).await;
    let participants: Value = server
        .admin_get(&format!("/experiments/{id}/participants"))
        .await
        .json()
        .await
        .unwrap();
    assert_eq!(participants[0]["participant_id"], s.participant_id.as_str());
    assert!(participants[0].get("session_token").is_none());

    let resp = server.admin_get("/experiments/nope").await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::NOT_FOUND, "unknown_experiment".into())
    );

    let resp = server
        .admin_post("/experiments", &json!({ "name": "   " }))
        .await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::BAD_REQUEST, "invalid_name".into())
    );
}

#[tokio::test]
async fn unknown_api_paths_and_methods_get_json_errors() {
    let server = spawn(None).await;
    let resp = server.admin_get("/nothing/here").await;
    assert_eq!(
        error_code(resp).await,
        (StatusCode::NOT_FOUND, "not_found".into())
    );

    let resp = server
        .client
        .delete(server.url("/experiments"))
        .bearer_auth(ADMIN)
        .send()
        .await
        .unwrap();
    assert_eq!(
        error_code(resp).await,
        (StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed".into())
    );
}

#[tokio::test]
async fn serves_the_static_ui_with_spa_fallback() {
    let ui = tempfile::tempdir().unwrap();
    std::fs::write(ui.path().join("index.html"), "<html>tlx ui</html>").unwrap();
    std::fs::write(ui.path().join("app.js"), "console.log(1)").unwrap();
    let server = spawn(Some(ui.path())).await;
    let root = server.base.trim_end_matches("/api").to_owned();

    let get = |path: &str| server.client.get(format!("{root}{path}")).send();
    assert_eq!(
        get("/").await.unwrap().text().await.unwrap(),
        "<html>tlx ui</html>"
    );
    assert_eq!(
        get("/app.js").await.unwrap().text().await.unwrap(),
        "console.log(1)"
    );
    assert_eq!(
        get("/experiments/abc").await.unwrap().text().await.unwrap(),
        "<html>tlx ui</html>"
    );
    let api = get("/api/experiments").await.unwrap();
    assert_eq!(api.status(), StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn placeholder_page_without_a_built_ui() {
    let server = spawn(None).await;
    let root = server.base.trim_end_matches("/api").to_owned();
    let resp = server.client.get(format!("{root}/")).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert!(resp.text().await.unwrap().contains("/api"));
}
