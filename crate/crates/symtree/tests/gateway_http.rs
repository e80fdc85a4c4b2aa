mod support;

use std::sync::atomic::Ordering;
use std::time::Duration;

use symtree::core::render::Messages;
use symtree::gateway::{CachePolicy, Gateway, GatewayError, GenerationSettings, HttpEndpoint, RetryPolicy, TranscriptStore};

fn settings(url: &str) -> GenerationSettings {
    GenerationSettings { endpoint: url.to_string(), ..GenerationSettings::default() }
}

fn fast_retry(n: u32) -> RetryPolicy {
    RetryPolicy { max_retries: n, base_delay_ms: 1 }
}

#[test]
fn retries_transient_errors_and_sends_the_key() {
    let server = support::spawn(2, support::parity_answer);
    let endpoint = HttpEndpoint::new(&server.url, Some("sk-test".into()), Duration::from_secs(10));
    let gw = Gateway::new(settings(&server.url), CachePolicy::Live).with_endpoint(endpoint).with_retry(fast_retry(3));
    let text = gw.complete(&Messages::new("sys", "user")).unwrap();
    assert!(text.starts_with("Let me check"));
    assert_eq!(server.requests.load(Ordering::SeqCst), 3);
    assert!(server.auth.lock().unwrap().iter().all(|a| a == "Bearer sk-test"));
}

#[test]
fn gives_up_after_the_retry_budget() {
    let server = support::spawn(usize::MAX, support::parity_answer);
    let endpoint = HttpEndpoint::new(&server.url, None, Duration::from_secs(10));
    let gw = Gateway::new(settings(&server.url), CachePolicy::Live).with_endpoint(endpoint).with_retry(fast_retry(2));
    match gw.complete(&Messages::new("sys", "user")) {
        Err(GatewayError::EndpointError { status: 503, .. }) => {}
        other => panic!("expected a 503, got {other:?}"),
    }
    assert_eq!(server.requests.load(Ordering::SeqCst), 3);
}

#[test]
fn record_then_replay_without_the_server() {
    let server = support::spawn(0, support::parity_answer);
    let dir = tempfile::tempdir().unwrap();
    let batch: Vec<Messages> = (0..12).map(|i| Messages::new("sys", format!("question {i}"))).collect();

    let recorder = Gateway::new(settings(&server.url), CachePolicy::Record)
        .with_store(TranscriptStore::open(dir.path()).unwrap())
        .with_endpoint(HttpEndpoint::new(&server.url, None, Duration::from_secs(10)))
        .with_parallelism(4);
    let recorded: Vec<String> = recorder.complete_all(&batch).into_iter().map(Result::unwrap).collect();
    assert_eq!(server.requests.load(Ordering::SeqCst), 12);

    // a second record pass is served from the store
    let again: Vec<String> = recorder.complete_all(&batch).into_iter().map(Result::unwrap).collect();
    assert_eq!(again, recorded);
    assert_eq!(server.requests.load(Ordering::SeqCst), 12);

    let replayer = Gateway::new(settings("http://127.0.0.1:9/unused"), CachePolicy::Replay)
        .with_store(TranscriptStore::open(dir.path()).unwrap());
    let replayed: Vec<String> = replayer.complete_all(&batch).into_iter().map(Result::unwrap).collect();
    assert_eq!(replayed, recorded);
    assert!(matches!(replayer.complete(&Messages::new("sys", "unseen")), Err(GatewayError::CacheMiss(_))));
}
