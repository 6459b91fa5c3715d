//! Embedding providers: model references, live HTTP clients, deterministic
//! synthetic embedders, the on-disk vector cache, and embedding files.
//!
//! Everything funnels through the [`Embedder`] trait so the metrics layer
//! never knows whether vectors came from an HTTP API, the cache, or a
//! synthetic construction.

mod api;
mod cache;
mod file;
mod model;
mod remote;
mod synthetic;

pub use api::{ApiError, EmbeddingApi, GeminiApi, OpenAiApi, VoyageApi};
pub use cache::{cached_embed, text_key, CacheStore};
pub use file::{
    dataset_fingerprint, read_embeddings, texts_fingerprint, write_embeddings, EmbeddingFile,
    EMBEDDING_FORMAT_VERSION,
};
pub use model::{ModelRef, Provider};
pub use remote::{ProviderOptions, RemoteEmbedder, TokenBucket};
pub use synthetic::{SyntheticEmbedder, SyntheticSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("unknown model {name:?}: not a recognized remote model or synthetic spec")]
    UnknownModel { name: String },
    #[error("invalid model spec: {detail}")]
    InvalidModelSpec { detail: String },
    #[error("missing credentials for {provider}: set {env_var}")]
    MissingCredentials {
        provider: Provider,
        env_var: &'static str,
    },
    #[error("rate limit retries exhausted for {model} after {attempts} attempts: {detail}")]
    RateLimitExhausted {
        model: String,
        attempts: u32,
        detail: String,
    },
    #[error("provider rejected the request (status {status}): {detail}")]
    Provider { status: u16, detail: String },
    #[error("network failure: {detail}")]
    Network { detail: String },
    #[error("malformed provider response: {detail}")]
    MalformedResponse { detail: String },
    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("corrupt cache shard {shard} at line {line}: {detail}")]
    CacheCorrupt {
        shard: String,
        line: usize,
        detail: String,
    },
    #[error("text {text:?} needs {needed} slots but the embedder has {available}")]
    SlotOverflow {
        text: String,
        needed: usize,
        available: usize,
    },
    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A model that can turn a batch of texts into vectors.
///
/// Implementations must be pure with respect to the text: the vector for a
/// given string never depends on batch position or neighbors.
pub trait Embedder {
    /// The fully resolved model this embedder serves.
    fn model(&self) -> &ModelRef;

    /// Embed each text, one vector per input, in input order.
    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError>;
}

/// A validated rows-as-samples embedding matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl EmbeddingMatrix {
    /// Wrap row vectors, rejecting empty, ragged, or non-finite input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ProviderError> {
        if rows.is_empty() {
            return Err(ProviderError::InvalidInput {
                detail: "no embedding rows".to_string(),
            });
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(ProviderError::InvalidInput {
                detail: "zero-dimensional embeddings".to_string(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(ProviderError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(ProviderError::InvalidInput {
                    detail: format!("non-finite value at row {i}, column {j}"),
                });
            }
        }
        Ok(Self { rows, dim })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }

    /// Copy into a dense matrix for the numerics layer.
    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows.len(), self.dim, |i, j| self.rows[i][j])
    }

    /// Keep only the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            dim: self.dim,
        }
    }
}
