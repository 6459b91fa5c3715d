//! Model references: parsing, canonicalization and provider resolution.
//!
//! Grammar:
//!
//! * remote models: `name` or `name@dim`, e.g. `text-embedding-3-large@256`;
//!   the provider is inferred from a table of known model names, falling back
//!   to name-prefix rules for newer models of the same lines.
//! * synthetic models: `synthetic:kind` with optional `/key=value` segments,
//!   e.g. `synthetic:linear/d=64/sigma=0.1`. Parameters are validated and
//!   defaults filled in at parse time, so equal models always render equal
//!   canonical strings.

use super::synthetic;
use super::ProviderError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Where a model's vectors come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provider {
    Gemini,
    OpenAi,
    Voyage,
    Synthetic,
}

impl Provider {
    pub fn name(&self) -> &'static str {
        match self {
            Provider::Gemini => "gemini",
            Provider::OpenAi => "openai",
            Provider::Voyage => "voyage",
            Provider::Synthetic => "synthetic",
        }
    }

    /// Environment variable holding this provider's API key.
    pub fn env_var(&self) -> Option<&'static str> {
        match self {
            Provider::OpenAi => Some("OPENAI_API_KEY"),
            Provider::Gemini => Some("GEMINI_API_KEY"),
            Provider::Voyage => Some("VOYAGE_API_KEY"),
            Provider::Synthetic => None,
        }
    }
}

impl fmt::Display for Provider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const KNOWN_REMOTE_MODELS: &[(&str, Provider)] = &[
    ("text-embedding-3-small", Provider::OpenAi),
    ("text-embedding-3-large", Provider::OpenAi),
    ("text-embedding-ada-002", Provider::OpenAi),
    ("gemini-embedding-001", Provider::Gemini),
    ("voyage-3-large", Provider::Voyage),
    ("voyage-3.5", Provider::Voyage),
    ("voyage-3.5-lite", Provider::Voyage),
    ("voyage-code-3", Provider::Voyage),
];

const PREFIX_RULES: &[(&str, Provider)] = &[
    ("text-embedding-", Provider::OpenAi),
    ("gemini-", Provider::Gemini),
    ("voyage-", Provider::Voyage),
];

/// A fully resolved reference to an embedding model.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModelRef {
    provider: Provider,
    /// Base model name (remote) or synthetic kind (e.g. `linear`).
    name: String,
    /// Dimension requested from a remote API, from an `@dim` suffix.
    requested_dim: Option<u32>,
    /// Synthetic parameters, complete with defaults, in canonical order.
    params: BTreeMap<String, String>,
}

impl ModelRef {
    /// Parse a model string in the grammar above.
    pub fn parse(s: &str) -> Result<ModelRef, ProviderError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ProviderError::InvalidModelSpec {
                detail: "empty model name".to_string(),
            });
        }
        if let Some(rest) = s.strip_prefix("synthetic:") {
            return Self::parse_synthetic(rest);
        }
        if s.contains(':') || s.contains('/') {
            return Err(ProviderError::InvalidModelSpec {
                detail: format!(
                    "{s:?}: only synthetic models use ':' or '/' (as in synthetic:linear/d=64)"
                ),
            });
        }
        let (name, requested_dim) = match s.split_once('@') {
            Some((base, dim)) => {
                let parsed: u32 = dim.parse().map_err(|_| ProviderError::InvalidModelSpec {
                    detail: format!("bad dimension suffix {dim:?} in {s:?}"),
                })?;
                if parsed == 0 {
                    return Err(ProviderError::InvalidModelSpec {
                        detail: format!("zero dimension in {s:?}"),
                    });
                }
                (base, Some(parsed))
            }
            None => (s, None),
        };
        let provider = KNOWN_REMOTE_MODELS
            .iter()
            .find(|(known, _)| *known == name)
            .map(|(_, p)| *p)
            .or_else(|| {
                PREFIX_RULES
                    .iter()
                    .find(|(prefix, _)| name.starts_with(prefix))
                    .map(|(_, p)| *p)
            })
            .ok_or_else(|| ProviderError::UnknownModel {
                name: name.to_string(),
            })?;
        Ok(ModelRef {
            provider,
            name: name.to_string(),
            requested_dim,
            params: BTreeMap::new(),
        })
    }

    fn parse_synthetic(rest: &str) -> Result<ModelRef, ProviderError> {
        let mut segments = rest.split('/');
        let kind = segments.next().unwrap_or_default();
        if kind.is_empty() {
            return Err(ProviderError::InvalidModelSpec {
                detail: "synthetic model is missing a kind (e.g. synthetic:linear)".to_string(),
            });
        }
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for seg in segments {
            let (key, value) = seg.split_once('=').ok_or_else(|| {
                ProviderError::InvalidModelSpec {
                    detail: format!("parameter segment {seg:?} is not key=value"),
                }
            })?;
            if key.is_empty() || value.is_empty() {
                return Err(ProviderError::InvalidModelSpec {
                    detail: format!("parameter segment {seg:?} has an empty key or value"),
                });
            }
            if raw.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ProviderError::InvalidModelSpec {
                    detail: format!("duplicate parameter {key:?}"),
                });
            }
        }
        let params = synthetic::normalize_params(kind, &raw)?;
        Ok(ModelRef {
            provider: Provider::Synthetic,
            name: kind.to_string(),
            requested_dim: None,
            params,
        })
    }

    pub fn provider(&self) -> Provider {
        self.provider
    }

    /// Base model name (remote) or synthetic kind.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn requested_dim(&self) -> Option<u32> {
        self.requested_dim
    }

    /// Synthetic parameters in canonical order (empty for remote models).
    pub fn params(&self) -> &BTreeMap<String, String> {
        &self.params
    }

    /// Canonical string form; equal models always render identically.
    pub fn canonical(&self) -> String {
        match self.provider {
            Provider::Synthetic => {
                let mut out = format!("synthetic:{}", self.name);
                for key in synthetic::param_order(&self.name) {
                    if let Some(value) = self.params.get(*key) {
                        out.push('/');
                        out.push_str(key);
                        out.push('=');
                        out.push_str(value);
                    }
                }
                out
            }
            _ => match self.requested_dim {
                Some(d) => format!("{}@{d}", self.name),
                None => self.name.clone(),
            },
        }
    }

    /// Filesystem-safe identifier derived from the canonical form.
    pub fn slug(&self) -> String {
        self.canonical()
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                    c
                } else {
                    '_'
                }
            })
            .collect()
    }
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl Serialize for ModelRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical())
    }
}

impl<'de> Deserialize<'de> for ModelRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ModelRef::parse(&s).map_err(serde::de::Error::custom)
    }
}
