//! Drive the HTTP API in-process: open a session, step it, read it back.

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::server::{router, AppState};
use hyperskolem::solver::SolveOptions;
use hyperskolem::syntax::parse_formula;
use hyperskolem::ts::TransitionSystem;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    serde_json::from_slice(&bytes).unwrap_or(Value::Null)
}

#[tokio::main]
async fn main() -> hyperskolem::Result<()> {
    let ts = TransitionSystem::parse(include_str!("../data/free.ts"))?;
    let inst = Instance::prepare(&ts, &parse_formula(include_str!("../data/copy.hltl"))?, 1_000_000)?;
    let Decision::Yes { witness, .. } = decide(&inst, SolveOptions::default())? else {
        println!("no witness");
        return Ok(());
    };
    let app = router(AppState::new(Some(witness), Some(ts), 1_000_000, None));
    let opened = call(&app, "POST", "/api/sessions", json!({})).await;
    println!("open: {opened}");
    let id = opened["id"].as_u64().unwrap();
    for block in [json!([[], ["a"]]), json!([["a"], []])] {
        let r = call(&app, "POST", &format!("/api/sessions/{id}/step"), json!({ "blocks": [block] })).await;
        println!("step: outputs {}", r["outputs"]);
    }
    let bad = call(&app, "POST", &format!("/api/sessions/{id}/step"), json!({ "blocks": [[["a"]]] })).await;
    println!("wrong length: {bad}");
    let view = call(&app, "GET", &format!("/api/sessions/{id}"), Value::Null).await;
    println!("history has {} entries", view["history"].as_array().map_or(0, Vec::len));
    Ok(())
}
