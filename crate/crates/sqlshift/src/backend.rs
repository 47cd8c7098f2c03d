//! Text-generation backends behind one contract: a deterministic mock, a
//! recorded-replay backend, and a live HTTP client. Only this module holds
//! transport configuration; nothing else in the crate touches the network.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::eval::{JUDGE_PROMPT_MARKER, MOCK_JUDGE_RESPONSE};
use crate::prompting::render_synthetic_response;
use sqlshift_core::{extract_prompt_template, tokenize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub temperature: f64,
    pub top_p: f64,
    pub top_k: Option<u32>,
    pub max_output_tokens: u32,
    pub model_name: String,
}

impl GenerationRequest {
    pub fn new(prompt: impl Into<String>, model_name: impl Into<String>) -> Self {
        GenerationRequest {
            prompt: prompt.into(),
            temperature: 0.0,
            top_p: 1.0,
            top_k: None,
            max_output_tokens: 8192,
            model_name: model_name.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationResult {
    pub text: String,
    pub latency_ms: u64,
    pub token_counts: Option<(u64, u64)>,
    pub backend_id: String,
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("rate limit retries exhausted after {attempts} attempts")]
    RateLimitExhausted { attempts: u32 },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no recorded fixture for prompt hash {key}")]
    FixtureMiss { key: String },
    #[error("fixture io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown backend id: {0}")]
    UnknownBackend(String),
}

pub trait Backend: Send + Sync {
    fn id(&self) -> &str;
    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError>;
}

impl Backend for Box<dyn Backend> {
    fn id(&self) -> &str {
        self.as_ref().id()
    }

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        self.as_ref().generate(req)
    }
}

/// Stable fixture key: hex SHA-256 of the exact rendered prompt. Any prompt
/// change invalidates fixtures loudly.
pub fn prompt_key(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Deterministic offline backend. Mapping prompts get an echo response under
/// the JSON output contract, built from the source queries listed in the
/// prompt; judge prompts get a fixed yes/yes verdict. Source questions may
/// carry test markers: "[refuse]" forces a null element, "[garble]" an
/// unparseable one.
pub struct MockBackend;

fn mock_map_response(prompt: &str) -> String {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let in_queries = prompt
        .split("# Source query:\n")
        .nth(1)
        .unwrap_or("")
        .split("# Output:")
        .next()
        .unwrap_or("");
    let mut question: Option<String> = None;
    for line in in_queries.lines() {
        let Some(rest) = line.strip_prefix('[') else { continue };
        let Some((_, body)) = rest.split_once("] ") else { continue };
        if let Some(q) = body.strip_prefix("Question: ") {
            question = Some(q.to_string());
        } else if let Some(s) = body.strip_prefix("SQL: ") {
            if let Some(q) = question.take() {
                pairs.push((q, s.to_string()));
            }
        }
    }
    let outputs: Vec<Option<(String, String, String, String)>> = pairs
        .iter()
        .map(|(q, s)| {
            if q.contains("[refuse]") {
                return None;
            }
            let template = tokenize(s)
                .map(|ts| extract_prompt_template(&ts).render())
                .unwrap_or_else(|_| "template unavailable".to_string());
            Some((
                template,
                "Echoed the source query structure onto the target schema.".to_string(),
                q.clone(),
                s.clone(),
            ))
        })
        .collect();
    let mut text = render_synthetic_response(&outputs);
    // A [garble] marker corrupts the matching element for parse-failure tests.
    for (i, (q, _)) in pairs.iter().enumerate() {
        if q.contains("[garble]") {
            let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
            v[i] = serde_json::Value::from(42);
            text = v.to_string();
        }
    }
    text
}

impl Backend for MockBackend {
    fn id(&self) -> &str {
        "mock"
    }

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        let text = if req.prompt.starts_with(JUDGE_PROMPT_MARKER) {
            MOCK_JUDGE_RESPONSE.to_string()
        } else {
            mock_map_response(&req.prompt)
        };
        Ok(GenerationResult {
            text,
            latency_ms: 0,
            token_counts: None,
            backend_id: "mock".to_string(),
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FixtureFile {
    key: String,
    prompt: String,
    response: String,
    model_name: String,
    created_at: String,
}

/// Replays recorded responses keyed by prompt hash; a pure function of the
/// fixture set and the prompt.
pub struct ReplayBackend {
    dir: PathBuf,
}

impl ReplayBackend {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayBackend { dir: dir.into() }
    }
}

impl Backend for ReplayBackend {
    fn id(&self) -> &str {
        "replay"
    }

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        let key = prompt_key(&req.prompt);
        let path = self.dir.join(format!("{key}.json"));
        if !path.exists() {
            return Err(BackendError::FixtureMiss { key });
        }
        let fixture: FixtureFile = serde_json::from_str(&std::fs::read_to_string(&path)?)
            .map_err(|e| BackendError::Transport(format!("corrupt fixture {key}: {e}")))?;
        Ok(GenerationResult {
            text: fixture.response,
            latency_ms: 0,
            token_counts: None,
            backend_id: "replay".to_string(),
        })
    }
}

/// Persists a (request, result) pair so replay can reproduce it offline.
/// Returns the fixture key.
pub fn record_fixture(
    req: &GenerationRequest,
    result: &GenerationResult,
    dir: &Path,
) -> Result<String, BackendError> {
    let key = prompt_key(&req.prompt);
    std::fs::create_dir_all(dir)?;
    let fixture = FixtureFile {
        key: key.clone(),
        prompt: req.prompt.clone(),
        response: result.text.clone(),
        model_name: req.model_name.clone(),
        created_at: "recorded".to_string(),
    };
    let text = serde_json::to_string_pretty(&fixture)
        .map_err(|e| BackendError::Transport(e.to_string()))?;
    std::fs::write(dir.join(format!("{key}.json")), text)?;
    Ok(key)
}

/// Wraps another backend and records every exchange as a replay fixture.
pub struct RecordingBackend<B: Backend> {
    inner: B,
    dir: PathBuf,
}

impl<B: Backend> RecordingBackend<B> {
    pub fn new(inner: B, dir: impl Into<PathBuf>) -> Self {
        RecordingBackend { inner, dir: dir.into() }
    }
}

impl<B: Backend> Backend for RecordingBackend<B> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        let result = self.inner.generate(req)?;
        record_fixture(req, &result, &self.dir)?;
        Ok(result)
    }
}

/// OpenAI-style chat-completions client with exponential backoff on
/// transient failures.
pub struct HttpBackend {
    api_url: String,
    api_key: String,
    max_retries: u32,
}

impl HttpBackend {
    pub fn new(api_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        HttpBackend { api_url: api_url.into(), api_key: api_key.into(), max_retries: 3 }
    }
}

impl Backend for HttpBackend {
    fn id(&self) -> &str {
        "http"
    }

    fn generate(&self, req: &GenerationRequest) -> Result<GenerationResult, BackendError> {
        if self.api_key.is_empty() {
            return Err(BackendError::Auth("SQLX_API_KEY is not set".to_string()));
        }
        if req.top_k.is_some() {
            log::info!("backend http ignores top_k");
        }
        let body = serde_json::json!({
            "model": req.model_name,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "top_p": req.top_p,
            "max_tokens": req.max_output_tokens,
        });
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(300))
            .build()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let started = Instant::now();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            let response = client
                .post(&self.api_url)
                .bearer_auth(&self.api_key)
                .json(&body)
                .send();
            let retryable = match &response {
                Ok(r) if r.status().as_u16() == 401 || r.status().as_u16() == 403 => {
                    return Err(BackendError::Auth(format!("status {}", r.status())));
                }
                Ok(r) if r.status().as_u16() == 429 || r.status().is_server_error() => true,
                Ok(_) => false,
                Err(_) => true,
            };
            if retryable {
                if attempt > self.max_retries {
                    return match response {
                        Ok(r) if r.status().as_u16() == 429 => {
                            Err(BackendError::RateLimitExhausted { attempts: attempt })
                        }
                        Ok(r) => Err(BackendError::Transport(format!("status {}", r.status()))),
                        Err(e) => Err(BackendError::Transport(e.to_string())),
                    };
                }
                std::thread::sleep(Duration::from_millis(250 * (1 << attempt.min(6))));
                continue;
            }
            let response = response.map_err(|e| BackendError::Transport(e.to_string()))?;
            let value: serde_json::Value = response
                .json()
                .map_err(|e| BackendError::Transport(e.to_string()))?;
            let text = value["choices"][0]["message"]["content"]
                .as_str()
                .ok_or_else(|| BackendError::Transport("missing completion text".to_string()))?
                .to_string();
            let usage = value.get("usage").map(|u| {
                (
                    u["prompt_tokens"].as_u64().unwrap_or(0),
                    u["completion_tokens"].as_u64().unwrap_or(0),
                )
            });
            return Ok(GenerationResult {
                text,
                latency_ms: started.elapsed().as_millis() as u64,
                token_counts: usage,
                backend_id: "http".to_string(),
            });
        }
    }
}

/// Builds a backend from SQLX_BACKEND / SQLX_FIXTURE_DIR / SQLX_API_KEY /
/// SQLX_API_URL. An explicit id overrides SQLX_BACKEND and an explicit
/// fixture directory overrides SQLX_FIXTURE_DIR. The id "record:<inner>"
/// wraps another backend and records every exchange into the fixture
/// directory for later replay.
pub fn backend_from_env(
    explicit: Option<&str>,
    fixture_dir: Option<&Path>,
) -> Result<Box<dyn Backend>, BackendError> {
    let id = match explicit {
        Some(id) => id.to_string(),
        None => std::env::var("SQLX_BACKEND").unwrap_or_else(|_| "mock".to_string()),
    };
    let resolve_dir = || -> Result<PathBuf, BackendError> {
        match fixture_dir {
            Some(dir) => Ok(dir.to_path_buf()),
            None => std::env::var("SQLX_FIXTURE_DIR").map(PathBuf::from).map_err(|_| {
                BackendError::Transport("SQLX_FIXTURE_DIR is not set".to_string())
            }),
        }
    };
    if let Some(inner) = id.strip_prefix("record:") {
        let dir = resolve_dir()?;
        let inner = backend_from_env(Some(inner), fixture_dir)?;
        return Ok(Box::new(RecordingBackend::new(inner, dir)));
    }
    match id.as_str() {
        "mock" => Ok(Box::new(MockBackend)),
        "replay" => Ok(Box::new(ReplayBackend::new(resolve_dir()?))),
        "http" => {
            let url = std::env::var("SQLX_API_URL")
                .map_err(|_| BackendError::Transport("SQLX_API_URL is not set".to_string()))?;
            let key = std::env::var("SQLX_API_KEY").unwrap_or_default();
            Ok(Box::new(HttpBackend::new(url, key)))
        }
        other => Err(BackendError::UnknownBackend(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prompting::{build_prompt, parse_response, Demonstration, OutputStatus};
    use crate::schema_io::{DatasetEntry, Split};
    use tempfile::TempDir;

    fn entry(i: usize, q: &str, sql: &str) -> DatasetEntry {
        DatasetEntry {
            id: format!("train:src:{i}"),
            question: q.to_string(),
            gold_sql: sql.to_string(),
            db_id: "src".to_string(),
            split: Split::Train,
        }
    }

    fn request(prompt: &str) -> GenerationRequest {
        GenerationRequest::new(prompt, "test-model")
    }

    #[test]
    fn mock_output_satisfies_json_contract() {
        let batch = vec![
            entry(0, "How many rows?", "SELECT COUNT(*) FROM t"),
            entry(1, "List names", "SELECT name FROM u WHERE age > 30"),
        ];
        let prompt =
            build_prompt("s\n", "t\n", "d\n", &batch, &Demonstration::builtin(), 20).unwrap();
        let result = MockBackend.generate(&request(&prompt.rendered)).unwrap();
        let ids: Vec<String> = batch.iter().map(|e| e.id.clone()).collect();
        let outs = parse_response(&result.text, &ids);
        assert!(outs.iter().all(|o| o.status == OutputStatus::Mapped));
        assert_eq!(outs[0].question, "How many rows?");
        assert!(outs[1].template_text.contains("table1"));
    }

    #[test]
    fn mock_markers_control_status() {
        let batch = vec![
            entry(0, "normal question", "SELECT 1"),
            entry(1, "[refuse] impossible one", "SELECT 2"),
            entry(2, "[garble] broken one", "SELECT 3"),
        ];
        let prompt =
            build_prompt("s\n", "t\n", "d\n", &batch, &Demonstration::builtin(), 20).unwrap();
        let result = MockBackend.generate(&request(&prompt.rendered)).unwrap();
        let ids: Vec<String> = batch.iter().map(|e| e.id.clone()).collect();
        let outs = parse_response(&result.text, &ids);
        assert_eq!(outs[0].status, OutputStatus::Mapped);
        assert_eq!(outs[1].status, OutputStatus::NullRefusal);
        assert_eq!(outs[2].status, OutputStatus::ParseFailure);
    }

    #[test]
    fn record_then_replay_is_byte_identical() {
        let dir = TempDir::new().unwrap();
        let req = request("some prompt");
        let result = GenerationResult {
            text: "recorded text".to_string(),
            latency_ms: 7,
            token_counts: Some((10, 5)),
            backend_id: "http".to_string(),
        };
        let key = record_fixture(&req, &result, dir.path()).unwrap();
        assert_eq!(key, prompt_key("some prompt"));
        let replay = ReplayBackend::new(dir.path());
        let got = replay.generate(&req).unwrap();
        assert_eq!(got.text, "recorded text");
    }

    #[test]
    fn replay_miss_names_the_hash() {
        let dir = TempDir::new().unwrap();
        let replay = ReplayBackend::new(dir.path());
        let req = request("never recorded");
        match replay.generate(&req) {
            Err(BackendError::FixtureMiss { key }) => {
                assert_eq!(key, prompt_key("never recorded"));
            }
            other => panic!("expected FixtureMiss, got {other:?}"),
        }
    }

    #[test]
    fn distinct_prompts_distinct_keys() {
        assert_ne!(prompt_key("a"), prompt_key("b"));
        assert_eq!(prompt_key("a"), prompt_key("a"));
    }

    #[test]
    fn fixture_round_trips_reserialization() {
        let dir = TempDir::new().unwrap();
        let req = request("round trip prompt");
        let result = MockBackend.generate(&req).unwrap();
        let key = record_fixture(&req, &result, dir.path()).unwrap();
        let path = dir.path().join(format!("{key}.json"));
        let first = std::fs::read_to_string(&path).unwrap();
        let parsed: FixtureFile = serde_json::from_str(&first).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap();
        assert_eq!(first, again);
    }

    #[test]
    fn recording_wrapper_enables_replay() {
        let dir = TempDir::new().unwrap();
        let recorder = RecordingBackend::new(MockBackend, dir.path());
        let req = request("wrapped prompt");
        let live = recorder.generate(&req).unwrap();
        let replayed = ReplayBackend::new(dir.path()).generate(&req).unwrap();
        assert_eq!(live.text, replayed.text);
    }

    #[test]
    fn env_selection() {
        assert_eq!(backend_from_env(Some("mock"), None).unwrap().id(), "mock");
        assert!(matches!(
            backend_from_env(Some("teleport"), None),
            Err(BackendError::UnknownBackend(_))
        ));
        let dir = TempDir::new().unwrap();
        let recorder = backend_from_env(Some("record:mock"), Some(dir.path())).unwrap();
        let req = request("recorded via env");
        let live = recorder.generate(&req).unwrap();
        let replay = backend_from_env(Some("replay"), Some(dir.path())).unwrap();
        assert_eq!(replay.generate(&req).unwrap().text, live.text);
    }
}
