//! Subcommand implementations plus the plumbing they share.

pub mod embed;
pub mod evaluate;
pub mod generate;
pub mod plot;
pub mod report;
pub mod run_all;

use crate::config::Settings;
use crate::errors::CliError;
use numprobe::numgen::{dataset_seed, generate, Family, PrecisionSpec, ScalarDataset};
use numprobe::providers::{
    cached_embed, CacheStore, Embedder, EmbeddingApi, GeminiApi, OpenAiApi, ProviderError,
    RemoteEmbedder, SyntheticEmbedder, VoyageApi,
};
use numprobe::{ModelRef, Provider};

/// The per-level dataset every stage regenerates from the master seed.
pub fn dataset_for(
    settings: &Settings,
    family: Family,
    level: u32,
) -> Result<ScalarDataset, CliError> {
    let spec = PrecisionSpec::new(family, level)?;
    Ok(generate(
        spec,
        settings.n,
        dataset_seed(settings.seed, family, level, settings.n),
    )?)
}

fn build_api(
    provider: Provider,
    base_url: Option<&str>,
) -> Result<Box<dyn EmbeddingApi>, ProviderError> {
    Ok(match provider {
        Provider::OpenAi => {
            let api = OpenAiApi::from_env()?;
            Box::new(match base_url {
                Some(url) => api.with_base_url(url),
                None => api,
            })
        }
        Provider::Gemini => {
            let api = GeminiApi::from_env()?;
            Box::new(match base_url {
                Some(url) => api.with_base_url(url),
                None => api,
            })
        }
        Provider::Voyage => {
            let api = VoyageApi::from_env()?;
            Box::new(match base_url {
                Some(url) => api.with_base_url(url),
                None => api,
            })
        }
        Provider::Synthetic => {
            return Err(ProviderError::InvalidInput {
                detail: "synthetic models have no HTTP backend".into(),
            })
        }
    })
}

/// Synthetic models run in-process; remote ones get a configured HTTP
/// client and credentials from the environment.
pub fn build_embedder(model: &ModelRef, settings: &Settings) -> Result<Box<dyn Embedder>, CliError> {
    if model.provider() == Provider::Synthetic {
        return Ok(Box::new(SyntheticEmbedder::new(model)?));
    }
    let api = build_api(model.provider(), settings.base_url_override(model.provider()))?;
    let embedder = RemoteEmbedder::with_api(model, api, settings.provider_options(model.provider()))?;
    Ok(Box::new(embedder))
}

pub fn open_cache(settings: &Settings) -> Result<Option<CacheStore>, CliError> {
    Ok(match &settings.cache {
        Some(root) => Some(CacheStore::open(root)?),
        None => None,
    })
}

pub fn embed_rows(
    embedder: &dyn Embedder,
    cache: Option<&CacheStore>,
    texts: &[String],
) -> Result<Vec<Vec<f64>>, CliError> {
    Ok(match cache {
        Some(store) => cached_embed(store, embedder, texts)?,
        None => embedder.embed_texts(texts)?,
    })
}
