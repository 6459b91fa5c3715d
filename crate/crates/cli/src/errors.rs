//! CLI error taxonomy: every failure is folded into one of five classes,
//! each with a fixed process exit code, and reported as a single JSON
//! record on stderr.

use numprobe::metrics::MetricsError;
use numprobe::numgen::NumgenError;
use numprobe::providers::ProviderError;
use numprobe::report::ReportError;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// Missing or unusable API credentials (exit 3).
    Credentials(String),
    /// Provider/network/cached-data failures (exit 4).
    Provider(String),
    /// Dataset or evaluation degenerate (exit 5).
    Degenerate(String),
    /// Everything else (exit 1).
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Credentials(_) => 3,
            CliError::Provider(_) => 4,
            CliError::Degenerate(_) => 5,
            CliError::Other(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Credentials(_) => "credentials",
            CliError::Provider(_) => "provider",
            CliError::Degenerate(_) => "degenerate",
            CliError::Other(_) => "error",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Credentials(m)
            | CliError::Provider(m)
            | CliError::Degenerate(m)
            | CliError::Other(m) => m,
        }
    }

    /// One machine-readable line on stderr.
    pub fn emit(&self) {
        let record = serde_json::json!({
            "kind": self.kind(),
            "exit": self.exit_code(),
            "message": self.message(),
        });
        eprintln!("{record}");
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<ProviderError> for CliError {
    fn from(e: ProviderError) -> Self {
        let text = e.to_string();
        match e {
            ProviderError::UnknownModel { .. }
            | ProviderError::InvalidModelSpec { .. }
            | ProviderError::SlotOverflow { .. } => CliError::Config(text),
            ProviderError::MissingCredentials { .. } => CliError::Credentials(text),
            ProviderError::RateLimitExhausted { .. }
            | ProviderError::Provider { .. }
            | ProviderError::Network { .. }
            | ProviderError::MalformedResponse { .. }
            | ProviderError::DimensionMismatch { .. }
            | ProviderError::CacheCorrupt { .. } => CliError::Provider(text),
            ProviderError::InvalidInput { .. } | ProviderError::Io(_) => CliError::Other(text),
        }
    }
}

impl From<NumgenError> for CliError {
    fn from(e: NumgenError) -> Self {
        let text = e.to_string();
        match e {
            NumgenError::DegenerateDataset { .. } => CliError::Degenerate(text),
            NumgenError::PrecisionRange { .. }
            | NumgenError::InvalidSampleCount { .. }
            | NumgenError::TooFewSamples { .. }
            | NumgenError::InvalidFoldCount => CliError::Config(text),
            NumgenError::InvalidDigits { .. }
            | NumgenError::Io(_)
            | NumgenError::Parse { .. }
            | NumgenError::Integrity { .. } => CliError::Other(text),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::AllFoldsDegenerate => CliError::Degenerate(e.to_string()),
            MetricsError::EmptyLevels => CliError::Config(e.to_string()),
            MetricsError::Numgen(inner) => inner.into(),
            MetricsError::Provider(inner) => inner.into(),
            MetricsError::ShapeMismatch { .. }
            | MetricsError::FoldMismatch { .. }
            | MetricsError::Numerics(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::EmptyInput
            | ReportError::MixedFamilies { .. }
            | ReportError::DuplicateModel { .. } => CliError::Config(e.to_string()),
            ReportError::Metrics(inner) => inner.into(),
            ReportError::Numgen(inner) => inner.into(),
            ReportError::Provider(inner) => inner.into(),
            ReportError::Numerics(_) => CliError::Other(e.to_string()),
            ReportError::Io(inner) => CliError::Other(inner.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
