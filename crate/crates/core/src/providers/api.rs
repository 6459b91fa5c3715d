//! Batch-level HTTP clients for the live embedding APIs.
//!
//! Each client builds one JSON request per batch and parses one JSON
//! response. Request building and response parsing are pure functions so they
//! can be tested against captured payload shapes without a network. Retry,
//! batching and rate limiting live a level up in [`super::remote`].

use super::model::{ModelRef, Provider};
use super::ProviderError;
use serde_json::{json, Value};
use std::fmt;
use std::time::Duration;

/// One HTTP round trip gone wrong, classified for retry purposes.
#[derive(Debug)]
pub enum ApiError {
    /// 429: back off and retry, honoring the server's delay if given.
    RateLimited { retry_after: Option<Duration> },
    /// 5xx: transient server trouble, retryable.
    Server { status: u16, detail: String },
    /// Connection-level failure, retryable.
    Network { detail: String },
    /// Non-retryable rejection (4xx other than 429).
    Rejected { status: u16, detail: String },
    /// Response arrived but did not have the promised shape.
    Malformed { detail: String },
}

impl ApiError {
    /// Whether another attempt could plausibly succeed.
    pub fn retryable(&self) -> bool {
        matches!(
            self,
            ApiError::RateLimited { .. } | ApiError::Server { .. } | ApiError::Network { .. }
        )
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApiError::RateLimited { retry_after } => match retry_after {
                Some(d) => write!(f, "rate limited (retry after {:.1}s)", d.as_secs_f64()),
                None => write!(f, "rate limited"),
            },
            ApiError::Server { status, detail } => write!(f, "server error {status}: {detail}"),
            ApiError::Network { detail } => write!(f, "network error: {detail}"),
            ApiError::Rejected { status, detail } => write!(f, "rejected ({status}): {detail}"),
            ApiError::Malformed { detail } => write!(f, "malformed response: {detail}"),
        }
    }
}

impl std::error::Error for ApiError {}

/// A provider endpoint that embeds one batch of texts per call.
pub trait EmbeddingApi: Send + Sync {
    fn provider(&self) -> Provider;

    /// Embed one batch; must return exactly one vector per input text, in
    /// input order.
    fn embed_batch(&self, model: &ModelRef, texts: &[String]) -> Result<Vec<Vec<f64>>, ApiError>;
}

fn truncate_body(body: &str) -> String {
    const LIMIT: usize = 300;
    if body.len() <= LIMIT {
        body.to_string()
    } else {
        let mut end = LIMIT;
        while !body.is_char_boundary(end) {
            end -= 1;
        }
        format!("{}…", &body[..end])
    }
}

fn classify_status(status: u16, body: &str, retry_after: Option<Duration>) -> ApiError {
    let detail = truncate_body(body);
    if status == 429 {
        ApiError::RateLimited { retry_after }
    } else if status >= 500 {
        ApiError::Server { status, detail }
    } else {
        ApiError::Rejected { status, detail }
    }
}

fn as_vector(value: &Value, what: &str) -> Result<Vec<f64>, ApiError> {
    let arr = value.as_array().ok_or_else(|| ApiError::Malformed {
        detail: format!("{what} is not an array"),
    })?;
    let mut out = Vec::with_capacity(arr.len());
    for (i, v) in arr.iter().enumerate() {
        let f = v.as_f64().ok_or_else(|| ApiError::Malformed {
            detail: format!("{what}[{i}] is not a number"),
        })?;
        if !f.is_finite() {
            return Err(ApiError::Malformed {
                detail: format!("{what}[{i}] is not finite"),
            });
        }
        out.push(f);
    }
    if out.is_empty() {
        return Err(ApiError::Malformed {
            detail: format!("{what} is empty"),
        });
    }
    Ok(out)
}

/// Shared blocking HTTP plumbing for the JSON APIs.
struct HttpClient {
    client: reqwest::blocking::Client,
    api_key: String,
}

impl HttpClient {
    fn new(api_key: String) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("default TLS client");
        Self { client, api_key }
    }

    fn post_json(
        &self,
        url: &str,
        auth: Auth,
        body: &Value,
    ) -> Result<Value, ApiError> {
        let mut req = self.client.post(url).json(body);
        req = match auth {
            Auth::Bearer => req.bearer_auth(&self.api_key),
            Auth::GoogleHeader => req.header("x-goog-api-key", &self.api_key),
        };
        let resp = req.send().map_err(|e| ApiError::Network {
            detail: e.to_string(),
        })?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|s| s.trim().parse::<f64>().ok())
            .map(Duration::from_secs_f64);
        let text = resp.text().map_err(|e| ApiError::Network {
            detail: e.to_string(),
        })?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text, retry_after));
        }
        serde_json::from_str(&text).map_err(|e| ApiError::Malformed {
            detail: format!("response is not JSON: {e}"),
        })
    }
}

enum Auth {
    Bearer,
    GoogleHeader,
}

macro_rules! redacted_debug {
    ($ty:ident) => {
        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.debug_struct(stringify!($ty))
                    .field("base_url", &self.base_url)
                    .field("api_key", &"<redacted>")
                    .finish()
            }
        }
    };
}

// ---------------------------------------------------------------------------
// OpenAI
// ---------------------------------------------------------------------------

pub struct OpenAiApi {
    http: HttpClient,
    base_url: String,
}

redacted_debug!(OpenAiApi);

impl OpenAiApi {
    pub const DEFAULT_BASE_URL: &'static str = "https://api.openai.com/v1";

    pub fn new(api_key: String) -> Self {
        Self {
            http: HttpClient::new(api_key),
            base_url: Self::DEFAULT_BASE_URL.to_string(),
        }
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        let var = Provider::OpenAi.env_var().expect("remote provider");
        match std::env::var(var) {
            Ok(key) if !key.trim().is_empty() => Ok(Self::new(key)),
            _ => Err(ProviderError::MissingCredentials {
                provider: Provider::OpenAi,
                env_var: var,
            }),
        }
    }

    pub fn with_base_url(mut self, base_url: &str) -> Self {
        self.base_url = base_url.trim_end_matches('/').to_string();
        self
    }

    /// Request body for one batch.
    pub fn build_request(model: &ModelRef, texts: &[String]) -> Value {
        let mut body = json!({
            "model": model.name(),
            "input": texts,
        });
        if let Some(d) = model.requested_dim() {
            body["dimensions"] = json!(d);
        }
        body
    }

    /// Extract vectors from a response body, restoring request order from
    /// the per-item indices.
    pub fn parse_response(body: &Value, expected: usize) -> Result<Vec<Vec<f64>>, ApiError> {
        let data = body
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| ApiError::Malformed {
                detail: "missing data array".to_string(),
            })?;
        if data.len() != expected {
            return Err(ApiError::Malformed {
                detail: format!("expected {expected} embeddings, got {}", data.len()),
            });
        }
        let mut out: Vec<Option<Vec<f64>>> = vec![None; expected];
        for item in data {
            let idx = item
                .get("index")
                .and_then(Value::as_u64)
                .ok_or_else(|| ApiError::Malformed {
                    detail: "data item missing index".to_string(),
                })? as usize;
            if idx >= expected {
                return Err(ApiError::Malformed {
                    detail: format!("index {idx} out of range"),
                });
            }
            let vector = as_vector(
                item.get("embedding").unwrap_or(&Value::Null),
                &format!("embedding[{idx}]"),
            )?;
            if out[idx].replace(vector).is_some() {
                return Err(ApiError::Malformed {
                    detail: format!("duplicate index {idx}"),
                });
            }
        }
        Ok(out.into_iter().map(|v| v.expect("all indices seen")).collect())
    }
}

impl EmbeddingApi for OpenAiApi {
    fn provider(&self) -> Provider {
        Provider::OpenAi
    }

    fn embed_batch(&self, model: &ModelRef, texts: &[String]) -> Result<Vec<Vec<f64>>, ApiError> {
        let url = format!("{}/embeddings", self.base_url);
        let body = Self::build_request(model, texts);
        let resp = self.http.post_json(&url, Auth::Bearer, &body)?;
        Self::parse_response(&resp, texts.len())
    }
}

// ---------------------------------------------------------------------------
// Gemini
// ---------------------------------------------------------------------------

pub struct GeminiApi {
    http: HttpClient,
    base_url: String,
}

redacted_debug!(GeminiApi);

impl GeminiApi {
    pub const DEFAULT_BASE_URL: &'static str =
        "https://generativelanguage.googleapis.com/v1beta";

    pub fn new(api_key: String) -> Self {
        Self {
            http: HttpClient::new(api_key),
            base_url: Self::DEFAULT_BASE_URL.to_string(),
        }
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        let var = Provider::Gemini.env_var().expect("remote provider");
        match std::env::var(var) {
            Ok(key) if !key.trim().is_empty() => Ok(Self::new(key)),
            _ => Err(ProviderError::MissingCredentials {
                provider: Provider::Gemini,
                env_var: var,
            }),
        }
    }

    pub fn with_base_url(mut self, base_url: &str) -> Self {
        self.base_url = base_url.trim_end_matches('/').to_string();
        self
    }

    pub fn build_request(model: &ModelRef, texts: &[String]) -> Value {
        let qualified = format!("models/{}", model.name());
        let requests: Vec<Value> = texts
            .iter()
            .map(|t| {
                let mut req = json!({
                    "model": qualified,
                    "content": { "parts": [ { "text": t } ] },
                });
                if let Some(d) = model.requested_dim() {
                    req["outputDimensionality"] = json!(d);
                }
                req
            })
            .collect();
        json!({ "requests": requests })
    }

    pub fn parse_response(body: &Value, expected: usize) -> Result<Vec<Vec<f64>>, ApiError> {
        let embeddings = body
            .get("embeddings")
            .and_then(Value::as_array)
            .ok_or_else(|| ApiError::Malformed {
                detail: "missing embeddings array".to_string(),
            })?;
        if embeddings.len() != expected {
            return Err(ApiError::Malformed {
                detail: format!("expected {expected} embeddings, got {}", embeddings.len()),
            });
        }
        embeddings
            .iter()
            .enumerate()
            .map(|(i, item)| {
                as_vector(
                    item.get("values").unwrap_or(&Value::Null),
                    &format!("embeddings[{i}].values"),
                )
            })
            .collect()
    }
}

impl EmbeddingApi for GeminiApi {
    fn provider(&self) -> Provider {
        Provider::Gemini
    }

    fn embed_batch(&self, model: &ModelRef, texts: &[String]) -> Result<Vec<Vec<f64>>, ApiError> {
        let url = format!(
            "{}/models/{}:batchEmbedContents",
            self.base_url,
            model.name()
        );
        let body = Self::build_request(model, texts);
        let resp = self.http.post_json(&url, Auth::GoogleHeader, &body)?;
        Self::parse_response(&resp, texts.len())
    }
}

// ---------------------------------------------------------------------------
// Voyage
// ---------------------------------------------------------------------------

pub struct VoyageApi {
    http: HttpClient,
    base_url: String,
}

redacted_debug!(VoyageApi);

impl VoyageApi {
    pub const DEFAULT_BASE_URL: &'static str = "https://api.voyageai.com/v1";

    pub fn new(api_key: String) -> Self {
        Self {
            http: HttpClient::new(api_key),
            base_url: Self::DEFAULT_BASE_URL.to_string(),
        }
    }

    pub fn from_env() -> Result<Self, ProviderError> {
        let var = Provider::Voyage.env_var().expect("remote provider");
        match std::env::var(var) {
            Ok(key) if !key.trim().is_empty() => Ok(Self::new(key)),
            _ => Err(ProviderError::MissingCredentials {
                provider: Provider::Voyage,
                env_var: var,
            }),
        }
    }

    pub fn with_base_url(mut self, base_url: &str) -> Self {
        self.base_url = base_url.trim_end_matches('/').to_string();
        self
    }

    pub fn build_request(model: &ModelRef, texts: &[String]) -> Value {
        let mut body = json!({
            "model": model.name(),
            "input": texts,
        });
        if let Some(d) = model.requested_dim() {
            body["output_dimension"] = json!(d);
        }
        body
    }

    /// Voyage uses the same `data[].index`/`data[].embedding` shape as
    /// OpenAI.
    pub fn parse_response(body: &Value, expected: usize) -> Result<Vec<Vec<f64>>, ApiError> {
        OpenAiApi::parse_response(body, expected)
    }
}

impl EmbeddingApi for VoyageApi {
    fn provider(&self) -> Provider {
        Provider::Voyage
    }

    fn embed_batch(&self, model: &ModelRef, texts: &[String]) -> Result<Vec<Vec<f64>>, ApiError> {
        let url = format!("{}/embeddings", self.base_url);
        let body = Self::build_request(model, texts);
        let resp = self.http.post_json(&url, Auth::Bearer, &body)?;
        Self::parse_response(&resp, texts.len())
    }
}

/// Build the live API client for a remote model's provider from environment
/// credentials.
pub(super) fn api_from_env(provider: Provider) -> Result<Box<dyn EmbeddingApi>, ProviderError> {
    match provider {
        Provider::OpenAi => Ok(Box::new(OpenAiApi::from_env()?)),
        Provider::Gemini => Ok(Box::new(GeminiApi::from_env()?)),
        Provider::Voyage => Ok(Box::new(VoyageApi::from_env()?)),
        Provider::Synthetic => Err(ProviderError::InvalidModelSpec {
            detail: "synthetic models have no HTTP API".to_string(),
        }),
    }
}
