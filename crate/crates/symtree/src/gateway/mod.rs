//! Chat-completion client with a content-addressed transcript cache.
//!
//! Every request is identified by the SHA-256 of its canonical JSON body, so
//! a recorded run can be replayed offline byte for byte.

mod scorer;
mod store;

use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symtree_core::render::{Message, Messages};
use thiserror::Error;

pub use scorer::{score_candidates, CandidateQuery, CandidateScorer, FixtureScorer, NoScorer};
pub use store::{Transcript, TranscriptStore, TRANSCRIPT_FORMAT_VERSION};

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const API_KEY_ENV: &str = "SYMTREE_API_KEY";
pub const ENDPOINT_ENV: &str = "SYMTREE_ENDPOINT";

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("no transcript for request {0}")]
    CacheMiss(String),
    #[error("endpoint returned status {status}: {body}")]
    EndpointError { status: u16, body: String },
    #[error("request timed out")]
    Timeout,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("malformed completion response: {0}")]
    BadResponse(String),
    #[error("the {0} cache policy needs a transcript store")]
    NoStore(CachePolicy),
    #[error("live requests need an endpoint")]
    NoEndpoint,
    #[error("no scoring mode or fixture for candidate query {0}")]
    ScorerUnavailable(String),
    #[error("candidate query needs at least one candidate")]
    NoCandidates,
    #[error("scorer returned {got} scores for {expected} candidates")]
    ScoreCount { expected: usize, got: usize },
    #[error("transcript store: {0}")]
    Store(String),
}

impl GatewayError {
    fn is_transient(&self) -> bool {
        match self {
            GatewayError::Timeout | GatewayError::Transport(_) => true,
            GatewayError::EndpointError { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// Sampling parameters and target. Only `model` and the sampling fields
/// enter the fingerprint; the endpoint URL does not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationSettings {
    pub model: String,
    pub endpoint: String,
    pub temperature: f64,
    pub top_p: f64,
    pub frequency_penalty: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        GenerationSettings {
            model: "gpt-3.5-turbo".to_string(),
            endpoint: DEFAULT_ENDPOINT.to_string(),
            temperature: 0.0,
            top_p: 1.0,
            frequency_penalty: 0.0,
            max_tokens: None,
        }
    }
}

/// The standard chat-completion request body. Field order is fixed, which
/// makes the serialization canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<Message>,
    pub temperature: f64,
    pub top_p: f64,
    pub frequency_penalty: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens: Option<u32>,
}

impl ChatRequest {
    pub fn new(messages: &Messages, settings: &GenerationSettings) -> Self {
        ChatRequest {
            model: settings.model.clone(),
            messages: messages.as_slice().to_vec(),
            temperature: settings.temperature,
            top_p: settings.top_p,
            frequency_penalty: settings.frequency_penalty,
            max_tokens: settings.max_tokens,
        }
    }

    pub fn body(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("request serializes")
    }

    pub fn fingerprint(&self) -> String {
        sha256_hex(&self.body())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Debug, Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Debug, Deserialize)]
struct ResponseMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Pulls `choices[0].message.content` out of a response body.
pub fn completion_text(body: &str) -> Result<String, GatewayError> {
    let resp: ChatResponse = serde_json::from_str(body).map_err(|e| GatewayError::BadResponse(e.to_string()))?;
    resp.choices
        .into_iter()
        .next()
        .and_then(|c| c.message.content)
        .ok_or_else(|| GatewayError::BadResponse("no choices[0].message.content".into()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CachePolicy {
    /// Always ask the endpoint; nothing is stored.
    Live,
    /// Serve hits from the store, ask the endpoint on a miss and store it.
    Record,
    /// Store only; a miss is an error.
    #[default]
    Replay,
}

impl CachePolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "live" => Some(CachePolicy::Live),
            "record" => Some(CachePolicy::Record),
            "replay" => Some(CachePolicy::Replay),
            _ => None,
        }
    }
}

impl std::fmt::Display for CachePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CachePolicy::Live => "live",
            CachePolicy::Record => "record",
            CachePolicy::Replay => "replay",
        })
    }
}

/// Something that accepts a request body and returns the raw response body.
pub trait ChatEndpoint: Send + Sync {
    fn post(&self, body: &[u8]) -> Result<String, GatewayError>;
}

impl<T: ChatEndpoint + ?Sized> ChatEndpoint for std::sync::Arc<T> {
    fn post(&self, body: &[u8]) -> Result<String, GatewayError> {
        (**self).post(body)
    }
}

pub struct HttpEndpoint {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
}

impl HttpEndpoint {
    pub fn new(url: impl Into<String>, api_key: Option<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build().into();
        HttpEndpoint { agent, url: url.into(), api_key }
    }
}

impl ChatEndpoint for HttpEndpoint {
    fn post(&self, body: &[u8]) -> Result<String, GatewayError> {
        let mut req = self.agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let map_err = |e: ureq::Error| match e {
            ureq::Error::Timeout(_) => GatewayError::Timeout,
            other => GatewayError::Transport(other.to_string()),
        };
        let resp = req.send(body).map_err(map_err)?;
        let status = resp.status().as_u16();
        let text = resp.into_body().read_to_string().map_err(map_err)?;
        if !(200..300).contains(&status) {
            return Err(GatewayError::EndpointError { status, body: text });
        }
        Ok(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 4, base_delay_ms: 500 }
    }
}

/// Spaces requests at least `interval` apart across all workers.
struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    fn acquire(&self) {
        if self.interval.is_zero() {
            return;
        }
        let wait = {
            let mut next = self.next.lock().expect("rate limiter lock");
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.interval);
            slot - now
        };
        if !wait.is_zero() {
            thread::sleep(wait);
        }
    }
}

pub struct Gateway {
    settings: GenerationSettings,
    policy: CachePolicy,
    store: Option<TranscriptStore>,
    endpoint: Option<Box<dyn ChatEndpoint>>,
    retry: RetryPolicy,
    limiter: RateLimiter,
    parallelism: usize,
}

impl Gateway {
    pub fn new(settings: GenerationSettings, policy: CachePolicy) -> Self {
        Gateway {
            settings,
            policy,
            store: None,
            endpoint: None,
            retry: RetryPolicy::default(),
            limiter: RateLimiter { interval: Duration::ZERO, next: Mutex::new(None) },
            parallelism: 4,
        }
    }

    pub fn with_store(mut self, store: TranscriptStore) -> Self {
        self.store = Some(store);
        self
    }

    pub fn with_endpoint(mut self, endpoint: impl ChatEndpoint + 'static) -> Self {
        self.endpoint = Some(Box::new(endpoint));
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    /// Minimum spacing between requests to the endpoint.
    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.limiter.interval = interval;
        self
    }

    pub fn with_parallelism(mut self, workers: usize) -> Self {
        self.parallelism = workers.max(1);
        self
    }

    pub fn settings(&self) -> &GenerationSettings {
        &self.settings
    }

    pub fn policy(&self) -> CachePolicy {
        self.policy
    }

    pub fn store(&self) -> Option<&TranscriptStore> {
        self.store.as_ref()
    }

    pub fn complete(&self, messages: &Messages) -> Result<String, GatewayError> {
        let request = ChatRequest::new(messages, &self.settings);
        let fp = request.fingerprint();
        match self.policy {
            CachePolicy::Live => self.call(&request),
            CachePolicy::Replay => {
                let store = self.store.as_ref().ok_or(GatewayError::NoStore(self.policy))?;
                store.get(&fp)?.map(|t| t.response).ok_or(GatewayError::CacheMiss(fp))
            }
            CachePolicy::Record => {
                let store = self.store.as_ref().ok_or(GatewayError::NoStore(self.policy))?;
                if let Some(t) = store.get(&fp)? {
                    return Ok(t.response);
                }
                let text = self.call(&request)?;
                let transcript = Transcript::new(&request, text, unix_now());
                if store.put(&transcript)? {
                    Ok(transcript.response)
                } else {
                    // another worker stored the same request first; its answer wins
                    store.get(&fp)?.map(|t| t.response).ok_or(GatewayError::CacheMiss(fp))
                }
            }
        }
    }

    /// Completes a batch on a bounded pool; results come back in input order.
    pub fn complete_all(&self, batch: &[Messages]) -> Vec<Result<String, GatewayError>> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.parallelism).build();
        match pool {
            Ok(pool) => pool.install(|| batch.par_iter().map(|m| self.complete(m)).collect()),
            Err(_) => batch.iter().map(|m| self.complete(m)).collect(),
        }
    }

    fn call(&self, request: &ChatRequest) -> Result<String, GatewayError> {
        let endpoint = self.endpoint.as_ref().ok_or(GatewayError::NoEndpoint)?;
        let body = request.body();
        let mut attempt = 0;
        loop {
            self.limiter.acquire();
            match endpoint.post(&body).and_then(|raw| completion_text(&raw)) {
                Ok(text) => return Ok(text),
                Err(e) if e.is_transient() && attempt < self.retry.max_retries => {
                    let delay = self.retry.base_delay_ms.saturating_mul(1 << attempt.min(16));
                    log::warn!("request {} failed ({e}); retry {} in {delay} ms", &request.fingerprint()[..12], attempt + 1);
                    thread::sleep(Duration::from_millis(delay));
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
