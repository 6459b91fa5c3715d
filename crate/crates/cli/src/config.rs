//! Layered settings: built-in defaults, then an optional TOML file, then
//! command-line flags. Unknown config keys are hard errors.

use crate::errors::CliError;
use numprobe::metrics::EvalOptions;
use numprobe::numgen::Family;
use numprobe::providers::{Provider, ProviderOptions};
use numprobe::report::TableFormat;
use numprobe::ModelRef;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::time::Duration;

pub const DEFAULT_N: usize = 500;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_MAX_PRECISION: u32 = 6;
pub const DEFAULT_MAGNITUDE_BOUND: i64 = 1000;

/// On-disk configuration. Every field is optional; the resolver fills in
/// defaults and command-line overrides.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub models: Option<Vec<String>>,
    pub families: Option<Vec<String>>,
    pub max_precision: Option<u32>,
    pub n: Option<usize>,
    pub folds: Option<usize>,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub normalize: Option<bool>,
    pub ridge: Option<f64>,
    pub global_pca: Option<bool>,
    pub magnitude_bound: Option<i64>,
    #[serde(default)]
    pub providers: ProvidersConfig,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvidersConfig {
    pub openai: Option<ProviderConfig>,
    pub gemini: Option<ProviderConfig>,
    pub voyage: Option<ProviderConfig>,
}

/// Per-provider HTTP tuning; anything unset keeps the built-in default.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub base_url: Option<String>,
    pub batch_size: Option<usize>,
    pub max_attempts: Option<u32>,
    pub initial_backoff_ms: Option<u64>,
    pub max_backoff_ms: Option<u64>,
    pub requests_per_minute: Option<f64>,
    pub parallelism: Option<usize>,
}

impl ProviderConfig {
    pub fn to_options(&self) -> ProviderOptions {
        let defaults = ProviderOptions::default();
        ProviderOptions {
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            max_attempts: self.max_attempts.unwrap_or(defaults.max_attempts),
            initial_backoff: self
                .initial_backoff_ms
                .map(Duration::from_millis)
                .unwrap_or(defaults.initial_backoff),
            max_backoff: self
                .max_backoff_ms
                .map(Duration::from_millis)
                .unwrap_or(defaults.max_backoff),
            requests_per_minute: self.requests_per_minute.or(defaults.requests_per_minute),
            parallelism: self.parallelism.unwrap_or(defaults.parallelism),
        }
    }
}

pub fn load_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
}

/// Command-line values that may override the file, collected by the parser.
#[derive(Debug, Default, Clone)]
pub struct CliOverrides {
    pub seed: Option<u64>,
    pub models: Vec<String>,
    pub families: Vec<String>,
    pub max_precision: Option<u32>,
    pub n: Option<usize>,
    pub folds: Option<usize>,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub normalize: bool,
    pub ridge: Option<f64>,
    pub global_pca: bool,
    pub dry_run: bool,
}

/// Fully resolved settings every command runs against.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub models: Vec<ModelRef>,
    pub families: Vec<Family>,
    pub levels: Vec<u32>,
    pub n: usize,
    pub folds: usize,
    pub cache: Option<PathBuf>,
    pub out: PathBuf,
    pub formats: Vec<TableFormat>,
    pub eval: EvalOptions,
    pub magnitude_bound: i64,
    pub dry_run: bool,
    providers: ProvidersConfig,
}

impl Settings {
    pub fn resolve(file: FileConfig, cli: CliOverrides) -> Result<Settings, CliError> {
        let seed = cli.seed.or(file.seed).unwrap_or(0);
        let n = cli.n.or(file.n).unwrap_or(DEFAULT_N);
        let folds = cli.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS);
        let max_precision = cli
            .max_precision
            .or(file.max_precision)
            .unwrap_or(DEFAULT_MAX_PRECISION);
        if n < 2 {
            return Err(CliError::Config(format!("n must be at least 2, got {n}")));
        }
        if folds < 2 {
            return Err(CliError::Config(format!(
                "folds must be at least 2, got {folds}"
            )));
        }
        if !(1..=numprobe::numgen::MAX_PRECISION).contains(&max_precision) {
            return Err(CliError::Config(format!(
                "max-precision must be in 1..={}, got {max_precision}",
                numprobe::numgen::MAX_PRECISION
            )));
        }

        let model_specs = if cli.models.is_empty() {
            file.models.unwrap_or_default()
        } else {
            cli.models
        };
        let mut models = Vec::with_capacity(model_specs.len());
        for spec in &model_specs {
            let model = ModelRef::parse(spec).map_err(|e| CliError::Config(e.to_string()))?;
            if models.iter().any(|m: &ModelRef| m.canonical() == model.canonical()) {
                return Err(CliError::Config(format!(
                    "model {} listed twice",
                    model.canonical()
                )));
            }
            models.push(model);
        }

        let family_names = if cli.families.is_empty() {
            file.families.unwrap_or_default()
        } else {
            cli.families
        };
        let families = if family_names.is_empty() {
            Family::ALL.to_vec()
        } else {
            let mut out = Vec::with_capacity(family_names.len());
            for name in &family_names {
                let family = Family::parse(name).ok_or_else(|| {
                    CliError::Config(format!(
                        "unknown family {name:?} (expected one of {})",
                        Family::ALL
                            .iter()
                            .map(|f| f.name())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ))
                })?;
                if out.contains(&family) {
                    return Err(CliError::Config(format!("family {name} listed twice")));
                }
                out.push(family);
            }
            out
        };

        let formats = match cli.format.or(file.format) {
            None => TableFormat::ALL.to_vec(),
            Some(name) => vec![TableFormat::parse(&name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown table format {name:?} (expected md, csv, or tex)"
                ))
            })?],
        };

        let ridge = cli.ridge.or(file.ridge);
        if let Some(r) = ridge {
            if !(r.is_finite() && r >= 0.0) {
                return Err(CliError::Config(format!(
                    "ridge must be a non-negative finite number, got {r}"
                )));
            }
        }
        let magnitude_bound = file.magnitude_bound.unwrap_or(DEFAULT_MAGNITUDE_BOUND);
        if magnitude_bound < 2 {
            return Err(CliError::Config(format!(
                "magnitude_bound must be at least 2, got {magnitude_bound}"
            )));
        }

        Ok(Settings {
            seed,
            models,
            families,
            levels: (1..=max_precision).collect(),
            n,
            folds,
            cache: cli.cache.or(file.cache),
            out: cli.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            formats,
            eval: EvalOptions {
                ridge,
                normalize: cli.normalize || file.normalize.unwrap_or(false),
                global_pca: cli.global_pca || file.global_pca.unwrap_or(false),
                ..EvalOptions::default()
            },
            magnitude_bound,
            dry_run: cli.dry_run,
            providers: file.providers,
        })
    }

    /// HTTP options for one provider, honoring config overrides.
    pub fn provider_options(&self, provider: Provider) -> ProviderOptions {
        self.provider_config(provider)
            .map(|c| c.to_options())
            .unwrap_or_default()
    }

    pub fn base_url_override(&self, provider: Provider) -> Option<&str> {
        self.provider_config(provider)
            .and_then(|c| c.base_url.as_deref())
    }

    fn provider_config(&self, provider: Provider) -> Option<&ProviderConfig> {
        match provider {
            Provider::OpenAi => self.providers.openai.as_ref(),
            Provider::Gemini => self.providers.gemini.as_ref(),
            Provider::Voyage => self.providers.voyage.as_ref(),
            Provider::Synthetic => None,
        }
    }

    /// Commands that need at least one model call this first.
    pub fn require_models(&self) -> Result<(), CliError> {
        if self.models.is_empty() {
            return Err(CliError::Config(
                "no models given: pass --models or set `models` in the config".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(file: FileConfig, cli: CliOverrides) -> Settings {
        Settings::resolve(file, cli).unwrap()
    }

    #[test]
    fn defaults_fill_everything() {
        let s = resolve(FileConfig::default(), CliOverrides::default());
        assert_eq!(s.seed, 0);
        assert_eq!(s.n, DEFAULT_N);
        assert_eq!(s.folds, DEFAULT_FOLDS);
        assert_eq!(s.levels, (1..=DEFAULT_MAX_PRECISION).collect::<Vec<_>>());
        assert_eq!(s.families, Family::ALL.to_vec());
        assert_eq!(s.formats.len(), 3);
        assert_eq!(s.out, PathBuf::from("out"));
        assert!(s.models.is_empty());
        assert!(s.require_models().is_err());
    }

    #[test]
    fn cli_flags_override_file_values() {
        let file: FileConfig = toml::from_str(
            r#"
            seed = 3
            n = 40
            models = ["synthetic:isotropic/d=4"]
            format = "csv"
            "#,
        )
        .unwrap();
        let cli = CliOverrides {
            seed: Some(9),
            models: vec!["synthetic:linear/d=8".into()],
            format: Some("tex".into()),
            ..CliOverrides::default()
        };
        let s = resolve(file, cli);
        assert_eq!(s.seed, 9);
        assert_eq!(s.n, 40);
        assert_eq!(s.models[0].canonical(), "synthetic:linear/d=8/seed=0/sigma=0");
        assert_eq!(s.formats, vec![TableFormat::Latex]);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = toml::from_str::<FileConfig>("mystery = 1").unwrap_err();
        assert!(err.to_string().contains("mystery"));
        let err = toml::from_str::<FileConfig>("[providers.openai]\nspeed = 9").unwrap_err();
        assert!(err.to_string().contains("speed"));
    }

    #[test]
    fn invalid_values_fail_resolution() {
        let cases: Vec<(FileConfig, &str)> = vec![
            (toml::from_str("n = 1").unwrap(), "n must be"),
            (toml::from_str("folds = 1").unwrap(), "folds must be"),
            (toml::from_str("max_precision = 99").unwrap(), "max-precision"),
            (toml::from_str("ridge = -1.0").unwrap(), "ridge"),
            (toml::from_str("magnitude_bound = 1").unwrap(), "magnitude_bound"),
            (
                toml::from_str("families = [\"decimалs\"]").unwrap(),
                "unknown family",
            ),
            (
                toml::from_str("models = [\"wat:?\"]").unwrap(),
                "",
            ),
            (
                toml::from_str("models = [\"synthetic:linear\", \"synthetic:linear/d=256\"]")
                    .unwrap(),
                "listed twice",
            ),
            (toml::from_str("format = \"pdf\"").unwrap(), "format"),
        ];
        for (file, needle) in cases {
            let err = Settings::resolve(file, CliOverrides::default()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{err}");
            assert!(err.message().contains(needle), "{err}");
        }
    }

    #[test]
    fn provider_overrides_build_options() {
        let file: FileConfig = toml::from_str(
            r#"
            [providers.voyage]
            base_url = "http://localhost:9"
            batch_size = 8
            requests_per_minute = 120.0
            parallelism = 2
            "#,
        )
        .unwrap();
        let s = resolve(file, CliOverrides::default());
        let opts = s.provider_options(Provider::Voyage);
        assert_eq!(opts.batch_size, 8);
        assert_eq!(opts.parallelism, 2);
        assert_eq!(opts.requests_per_minute, Some(120.0));
        assert_eq!(s.base_url_override(Provider::Voyage), Some("http://localhost:9"));
        assert_eq!(s.base_url_override(Provider::OpenAi), None);
        let defaults = s.provider_options(Provider::OpenAi);
        assert_eq!(defaults.batch_size, 64);
    }

    #[test]
    fn eval_flags_merge_with_or_semantics() {
        let file: FileConfig = toml::from_str("normalize = true").unwrap();
        let s = resolve(
            file,
            CliOverrides {
                global_pca: true,
                ..CliOverrides::default()
            },
        );
        assert!(s.eval.normalize);
        assert!(s.eval.global_pca);
        assert_eq!(s.eval.ridge, None);
    }
}
