use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::PromptBundle;
use super::LlmError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmEndpointConfig {
    /// Base URL; requests go to `{base_url}/chat/completions`.
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key. An unset or
    /// empty variable sends no `Authorization` header.
    pub api_key_env: String,
    pub temperature: f64,
    pub timeout_secs: f64,
    pub max_retries: usize,
    /// First retry delay; doubles on each further retry.
    pub backoff_base_secs: f64,
}

impl Default for LlmEndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "http://127.0.0.1:8000/v1".into(),
            model: "gpt-4o".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            temperature: 0.2,
            timeout_secs: 60.0,
            max_retries: 3,
            backoff_base_secs: 1.0,
        }
    }
}

impl LlmEndpointConfig {
    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: String| Err(LlmError::InvalidConfig(m));
        if !(self.timeout_secs > 0.0 && self.timeout_secs.is_finite()) {
            return bad(format!("timeout must be > 0 (got {})", self.timeout_secs));
        }
        if !(self.backoff_base_secs >= 0.0 && self.backoff_base_secs.is_finite()) {
            return bad(format!("backoff base must be >= 0 (got {})", self.backoff_base_secs));
        }
        if !self.temperature.is_finite() {
            return bad("temperature must be finite".into());
        }
        if self.base_url.is_empty() {
            return bad("base_url is empty".into());
        }
        Ok(())
    }

    pub fn max_attempts(&self) -> usize {
        self.max_retries + 1
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }

    /// Delay before retry number `n` (1-based).
    pub fn backoff(&self, n: usize) -> Duration {
        let exp = n.saturating_sub(1).min(30) as i32;
        Duration::from_secs_f64(self.backoff_base_secs * 2f64.powi(exp))
    }
}

/// Something that turns a system preamble and one user message into text.
///
/// `budget` is the number of requests the caller still allows; each attempt
/// decrements it, retries included.
pub trait Completion: Send + Sync {
    fn complete(&self, system: &str, user: &str, budget: &mut usize) -> Result<String, LlmError>;

    /// Attempts allowed for one logical request.
    fn max_attempts(&self) -> usize;
}

enum Attempt {
    Retry(LlmError),
    Fatal(LlmError),
}

/// Blocking chat-completions client. Holds no per-run state apart from the
/// call counter and an optional log, so it can be shared across runs.
#[derive(Debug)]
pub struct ChatClient {
    config: LlmEndpointConfig,
    agent: ureq::Agent,
    calls: AtomicUsize,
    log: Option<Mutex<File>>,
}

impl ChatClient {
    pub fn new(config: LlmEndpointConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build();
        Ok(Self {
            config,
            agent,
            calls: AtomicUsize::new(0),
            log: None,
        })
    }

    /// Appends every request and response, without credentials, to `path`
    /// as JSON lines.
    pub fn with_log(mut self, path: &Path) -> std::io::Result<Self> {
        let f = OpenOptions::new().create(true).append(true).open(path)?;
        self.log = Some(Mutex::new(f));
        Ok(self)
    }

    pub fn config(&self) -> &LlmEndpointConfig {
        &self.config
    }

    /// HTTP requests issued so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn request_body(&self, system: &str, user: &str) -> Value {
        json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        })
    }

    fn write_log(&self, entry: Value) {
        if let Some(log) = &self.log {
            if let Ok(mut f) = log.lock() {
                let _ = writeln!(f, "{entry}");
            }
        }
    }

    fn attempt(&self, body: &Value, attempts: usize) -> Result<String, Attempt> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let mut req = self
            .agent
            .post(&self.config.completions_url())
            .set("Content-Type", "application/json");
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            if !key.is_empty() {
                req = req.set("Authorization", &format!("Bearer {key}"));
            }
        }
        let result = req.send_string(&body.to_string());
        let (status, text) = match result {
            Ok(resp) => {
                let status = resp.status();
                (status, resp.into_string().map_err(|e| e.to_string()))
            }
            Err(ureq::Error::Status(status, resp)) => (status, Ok(resp.into_string().unwrap_or_default())),
            Err(ureq::Error::Transport(t)) => {
                let detail = t.to_string();
                self.write_log(json!({"attempt": attempts, "request": body, "error": detail}));
                return Err(Attempt::Retry(LlmError::EndpointUnreachable { attempts, detail }));
            }
        };
        let text = match text {
            Ok(t) => t,
            Err(detail) => {
                self.write_log(json!({"attempt": attempts, "request": body, "status": status, "error": detail}));
                return Err(Attempt::Retry(LlmError::EndpointUnreachable { attempts, detail }));
            }
        };
        self.write_log(json!({"attempt": attempts, "request": body, "status": status, "response": text}));
        let detail = || text.chars().take(200).collect::<String>();
        match status {
            200..=299 => extract_content(&text).map_err(Attempt::Fatal),
            401 | 403 => Err(Attempt::Fatal(LlmError::AuthFailure {
                status,
                detail: detail(),
            })),
            429 => Err(Attempt::Retry(LlmError::RateLimited { attempts })),
            500..=599 => Err(Attempt::Retry(LlmError::EndpointUnreachable {
                attempts,
                detail: format!("HTTP {status}: {}", detail()),
            })),
            _ => Err(Attempt::Fatal(LlmError::BadResponse(format!("HTTP {status}: {}", detail())))),
        }
    }
}

fn extract_content(body: &str) -> Result<String, LlmError> {
    let v: Value = serde_json::from_str(body).map_err(|e| LlmError::BadResponse(format!("body is not JSON: {e}")))?;
    v.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| LlmError::BadResponse("missing choices[0].message.content".into()))
}

impl Completion for ChatClient {
    fn complete(&self, system: &str, user: &str, budget: &mut usize) -> Result<String, LlmError> {
        let body = self.request_body(system, user);
        let mut attempts = 0;
        let mut last = None;
        while *budget > 0 {
            *budget -= 1;
            attempts += 1;
            match self.attempt(&body, attempts) {
                Ok(text) => return Ok(text),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) => {
                    last = Some(e);
                    if *budget > 0 {
                        std::thread::sleep(self.config.backoff(attempts));
                    }
                }
            }
        }
        Err(last.unwrap_or(LlmError::EndpointUnreachable {
            attempts,
            detail: "no attempts left".into(),
        }))
    }

    fn max_attempts(&self) -> usize {
        self.config.max_attempts()
    }
}

/// Sends one prompt and returns the assistant text, retrying on timeouts,
/// 5xx and 429 up to `endpoint.max_retries` times.
pub fn llm_propose(bundle: &PromptBundle, endpoint: &LlmEndpointConfig) -> Result<String, LlmError> {
    let client = ChatClient::new(endpoint.clone())?;
    let mut budget = endpoint.max_attempts();
    client.complete(&bundle.system_preamble, &bundle.user_message(), &mut budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backoff_doubles() {
        let c = LlmEndpointConfig::default();
        assert_eq!(c.backoff(1), Duration::from_secs(1));
        assert_eq!(c.backoff(2), Duration::from_secs(2));
        assert_eq!(c.backoff(3), Duration::from_secs(4));
    }

    #[test]
    fn url_joining() {
        let c = LlmEndpointConfig {
            base_url: "http://h:1/v1/".into(),
            ..Default::default()
        };
        assert_eq!(c.completions_url(), "http://h:1/v1/chat/completions");
    }

    #[test]
    fn config_checks() {
        let c = LlmEndpointConfig {
            timeout_secs: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn content_extraction() {
        let body = r#"{"choices":[{"message":{"role":"assistant","content":"hi"}}]}"#;
        assert_eq!(extract_content(body).unwrap(), "hi");
        assert!(matches!(extract_content("{}"), Err(LlmError::BadResponse(_))));
    }
}
