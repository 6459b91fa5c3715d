//! Batching, retry, rate limiting and bounded parallelism over an
//! [`EmbeddingApi`].
//!
//! [`RemoteEmbedder`] is the live-provider implementation of [`Embedder`]:
//! it slices the input into batches, runs up to a fixed number of worker
//! threads, retries transient failures with capped exponential backoff plus
//! jitter, and reassembles results in input order. The HTTP layer is
//! injectable, so every behavior here is testable offline.

use super::api::{api_from_env, ApiError, EmbeddingApi};
use super::model::{ModelRef, Provider};
use super::{Embedder, ProviderError};
use rand::Rng;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Tuning knobs for remote embedding runs.
#[derive(Debug, Clone)]
pub struct ProviderOptions {
    /// Texts per HTTP request.
    pub batch_size: usize,
    /// Attempts per batch before giving up on retryable failures.
    pub max_attempts: u32,
    /// First retry delay; doubles each retry.
    pub initial_backoff: Duration,
    /// Upper bound on any single retry delay.
    pub max_backoff: Duration,
    /// Client-side request budget; `None` disables throttling.
    pub requests_per_minute: Option<f64>,
    /// Concurrent in-flight batches.
    pub parallelism: usize,
}

impl Default for ProviderOptions {
    fn default() -> Self {
        Self {
            batch_size: 64,
            max_attempts: 5,
            initial_backoff: Duration::from_secs(1),
            max_backoff: Duration::from_secs(60),
            requests_per_minute: None,
            parallelism: 4,
        }
    }
}

/// Classic token bucket, decoupled from wall clocks for testability: the
/// caller supplies `now` and performs any sleeping itself.
#[derive(Debug)]
pub struct TokenBucket {
    capacity: f64,
    tokens: f64,
    refill_per_sec: f64,
    last: Instant,
}

impl TokenBucket {
    /// A bucket refilling at `rate_per_minute`, holding at most `burst`
    /// tokens, starting full at time `now`.
    pub fn new(rate_per_minute: f64, burst: f64, now: Instant) -> Self {
        let capacity = burst.max(1.0);
        Self {
            capacity,
            tokens: capacity,
            refill_per_sec: (rate_per_minute / 60.0).max(1e-9),
            last: now,
        }
    }

    /// Try to take one token at time `now`. `None` means the token was
    /// granted; `Some(wait)` asks the caller to wait before polling again.
    pub fn poll(&mut self, now: Instant) -> Option<Duration> {
        let elapsed = now.saturating_duration_since(self.last).as_secs_f64();
        self.last = now;
        self.tokens = (self.tokens + elapsed * self.refill_per_sec).min(self.capacity);
        if self.tokens >= 1.0 {
            self.tokens -= 1.0;
            None
        } else {
            Some(Duration::from_secs_f64(
                (1.0 - self.tokens) / self.refill_per_sec,
            ))
        }
    }
}

/// [`Embedder`] over a live (or injected) batch API.
pub struct RemoteEmbedder {
    model: ModelRef,
    api: Box<dyn EmbeddingApi>,
    opts: ProviderOptions,
    limiter: Option<Mutex<TokenBucket>>,
    requests: AtomicU64,
}

impl RemoteEmbedder {
    /// Connect to the model's provider using credentials from the
    /// environment.
    pub fn from_env(model: &ModelRef, opts: ProviderOptions) -> Result<Self, ProviderError> {
        let api = api_from_env(model.provider())?;
        Self::with_api(model, api, opts)
    }

    /// Use an explicit API implementation (tests inject fakes here).
    pub fn with_api(
        model: &ModelRef,
        api: Box<dyn EmbeddingApi>,
        opts: ProviderOptions,
    ) -> Result<Self, ProviderError> {
        if model.provider() == Provider::Synthetic {
            return Err(ProviderError::InvalidModelSpec {
                detail: format!("{} is not a remote model", model.canonical()),
            });
        }
        if opts.batch_size == 0 || opts.max_attempts == 0 {
            return Err(ProviderError::InvalidInput {
                detail: "batch_size and max_attempts must be positive".to_string(),
            });
        }
        let limiter = opts
            .requests_per_minute
            .map(|rpm| Mutex::new(TokenBucket::new(rpm, 1.0, Instant::now())));
        Ok(Self {
            model: model.clone(),
            api,
            opts,
            limiter,
            requests: AtomicU64::new(0),
        })
    }

    /// Total batch requests attempted so far, retries included.
    pub fn requests_sent(&self) -> u64 {
        self.requests.load(Ordering::Relaxed)
    }

    fn throttle(&self) {
        if let Some(limiter) = &self.limiter {
            loop {
                let wait = limiter.lock().expect("limiter lock").poll(Instant::now());
                match wait {
                    None => return,
                    Some(d) => std::thread::sleep(d),
                }
            }
        }
    }

    fn give_up(&self, err: ApiError, attempts: u32) -> ProviderError {
        match err {
            ApiError::RateLimited { .. } => ProviderError::RateLimitExhausted {
                model: self.model.canonical(),
                attempts,
                detail: err.to_string(),
            },
            ApiError::Server { status, detail } => ProviderError::Provider { status, detail },
            ApiError::Network { detail } => ProviderError::Network { detail },
            ApiError::Rejected { status, detail } => ProviderError::Provider { status, detail },
            ApiError::Malformed { detail } => ProviderError::MalformedResponse { detail },
        }
    }

    fn embed_batch_with_retry(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            self.throttle();
            self.requests.fetch_add(1, Ordering::Relaxed);
            match self.api.embed_batch(&self.model, texts) {
                Ok(rows) => {
                    if rows.len() != texts.len() {
                        return Err(ProviderError::MalformedResponse {
                            detail: format!(
                                "{} texts sent but {} vectors returned",
                                texts.len(),
                                rows.len()
                            ),
                        });
                    }
                    if let Some(want) = self.model.requested_dim() {
                        for row in &rows {
                            if row.len() != want as usize {
                                return Err(ProviderError::DimensionMismatch {
                                    expected: want as usize,
                                    got: row.len(),
                                });
                            }
                        }
                    }
                    return Ok(rows);
                }
                Err(err) if !err.retryable() => return Err(self.give_up(err, attempt)),
                Err(err) if attempt >= self.opts.max_attempts => {
                    return Err(self.give_up(err, attempt))
                }
                Err(err) => {
                    let exp = self
                        .opts
                        .initial_backoff
                        .saturating_mul(1u32 << (attempt - 1).min(20))
                        .min(self.opts.max_backoff);
                    let base = match &err {
                        ApiError::RateLimited {
                            retry_after: Some(server_wait),
                        } => exp.max(*server_wait).min(self.opts.max_backoff),
                        _ => exp,
                    };
                    let jitter = base.mul_f64(rand::thread_rng().gen_range(0.0..0.5));
                    std::thread::sleep(base + jitter);
                }
            }
        }
    }
}

impl Embedder for RemoteEmbedder {
    fn model(&self) -> &ModelRef {
        &self.model
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let batches: Vec<&[String]> = texts.chunks(self.opts.batch_size).collect();
        let workers = self.opts.parallelism.max(1).min(batches.len());

        let mut slots: Vec<Option<Vec<Vec<f64>>>> = Vec::new();
        if workers == 1 {
            for batch in &batches {
                slots.push(Some(self.embed_batch_with_retry(batch)?));
            }
        } else {
            let results: Mutex<Vec<Option<Vec<Vec<f64>>>>> =
                Mutex::new((0..batches.len()).map(|_| None).collect());
            let first_error: Mutex<Option<ProviderError>> = Mutex::new(None);
            let next = AtomicUsize::new(0);
            let stop = AtomicBool::new(false);
            std::thread::scope(|scope| {
                for _ in 0..workers {
                    scope.spawn(|| loop {
                        if stop.load(Ordering::Relaxed) {
                            break;
                        }
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= batches.len() {
                            break;
                        }
                        match self.embed_batch_with_retry(batches[i]) {
                            Ok(rows) => {
                                results.lock().expect("results lock")[i] = Some(rows);
                            }
                            Err(e) => {
                                stop.store(true, Ordering::Relaxed);
                                let mut slot = first_error.lock().expect("error lock");
                                if slot.is_none() {
                                    *slot = Some(e);
                                }
                                break;
                            }
                        }
                    });
                }
            });
            if let Some(e) = first_error.into_inner().expect("error lock") {
                return Err(e);
            }
            slots = results.into_inner().expect("results lock");
        }

        let mut rows = Vec::with_capacity(texts.len());
        for slot in slots {
            rows.extend(slot.expect("all batches resolved"));
        }
        debug_assert_eq!(rows.len(), texts.len());
        let dim = rows.first().map(Vec::len).unwrap_or(0);
        for row in &rows {
            if row.len() != dim {
                return Err(ProviderError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        Ok(rows)
    }
}
