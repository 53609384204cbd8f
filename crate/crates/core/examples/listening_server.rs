//! Starts the listening-test service over a tiny synthetic corpus, drives one
//! session through the router in-process and prints the resulting confusion
//! summary. Pass `--serve` to keep it listening on 127.0.0.1:8080 instead.
//!
//! ```bash
//! cargo run -p voxemo --example listening_server
//! cargo run -p voxemo --example listening_server -- --serve
//! ```

use std::fs;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use serde_json::{json, Value};
use tower::ServiceExt;
use voxemo::annotation::{router, serve, AnnotationState};
use voxemo::audio::write_wav;
use voxemo::eval::{synth_corpus, SynthCorpusSpec};
use voxemo::manifest::{AgeBand, Manifest, ManifestEntry, Sex, UtteranceKind};

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("voxemo-listen-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let spec = SynthCorpusSpec {
        clips_per_class: 2,
        ..SynthCorpusSpec::default()
    };
    let mut entries = Vec::new();
    for c in synth_corpus(&spec)? {
        let path = format!("{}.wav", c.clip.source_id);
        fs::write(dir.join(&path), write_wav(&c.clip))?;
        entries.push(ManifestEntry {
            path,
            emotion: c.label.parse()?,
            speaker_id: "synth".into(),
            sex: Sex::Unknown,
            age_band: AgeBand::Unknown,
            kind: UtteranceKind::Sentence,
            text: None,
        });
    }
    let manifest = Manifest {
        entries,
        sample_rate: Some(spec.sample_rate),
        base_dir: dir.clone(),
    };
    let state = AnnotationState::open(manifest, dir.join("responses.jsonl"), 7)?;

    if std::env::args().any(|a| a == "--serve") {
        let addr = "127.0.0.1:8080".parse()?;
        println!("listening on http://{addr} (ctrl-c to stop)");
        serve(state, addr, None, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        return Ok(());
    }

    let app = router(state, None);
    let (_, session) = call(&app, "POST", "/sessions", None).await;
    let id = session["session_id"].as_str().unwrap().to_string();
    // A listener who always answers "Neutral".
    loop {
        let (_, next) = call(&app, "GET", &format!("/sessions/{id}/next"), None).await;
        if next["done"] == json!(true) {
            break;
        }
        let clip = next["clip_id"].as_str().unwrap();
        call(
            &app,
            "POST",
            &format!("/sessions/{id}/responses"),
            Some(json!({"clip_id": clip, "heard": "Neutral"})),
        )
        .await;
    }
    let (_, summary) = call(&app, "GET", "/results/confusion", None).await;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    fs::remove_dir_all(&dir)?;
    Ok(())
}
