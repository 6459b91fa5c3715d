//! Deterministic synthetic embedders with known geometric structure.
//!
//! These give the metrics pipeline ground truth: each construction encodes
//! the number in a way whose linear-readability is known in advance, so the
//! measured scores can be checked against exact expectations.
//!
//! * `linear`: value times a fixed unit direction plus optional isotropic
//!   noise — perfectly linearly decodable at `sigma = 0`.
//! * `digit-circular`: each digit mapped to a point on a circle in its own
//!   two coordinates, sign in the last coordinate — decodable but spread
//!   over many directions, so no single component dominates.
//! * `sign-split`: a dominant sign coordinate plus compressed magnitude
//!   coordinates — the leading component tracks the sign, not the value.
//! * `isotropic`: seeded Gaussian noise per text — no value structure at all.

use super::model::{ModelRef, Provider};
use super::{Embedder, ProviderError};
use crate::numerics::random_orthogonal;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Canonical parameter order for each synthetic kind.
pub(super) fn param_order(kind: &str) -> &'static [&'static str] {
    match kind {
        "linear" => &["d", "seed", "sigma"],
        "digit-circular" => &["slots"],
        "sign-split" => &["d", "scale"],
        "isotropic" => &["d", "seed"],
        _ => &[],
    }
}

fn invalid(detail: String) -> ProviderError {
    ProviderError::InvalidModelSpec { detail }
}

fn parse_usize(kind: &str, key: &str, value: &str, min: usize) -> Result<usize, ProviderError> {
    let v: usize = value
        .parse()
        .map_err(|_| invalid(format!("{kind}: {key}={value:?} is not a whole number")))?;
    if v < min {
        return Err(invalid(format!("{kind}: {key} must be at least {min}")));
    }
    Ok(v)
}

fn parse_u64(kind: &str, key: &str, value: &str) -> Result<u64, ProviderError> {
    value
        .parse()
        .map_err(|_| invalid(format!("{kind}: {key}={value:?} is not a whole number")))
}

fn parse_f64(kind: &str, key: &str, value: &str) -> Result<f64, ProviderError> {
    let v: f64 = value
        .parse()
        .map_err(|_| invalid(format!("{kind}: {key}={value:?} is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(format!("{kind}: {key} must be finite")));
    }
    Ok(v)
}

/// Validate raw `key=value` parameters for `kind`, fill in defaults, and
/// render every value in its canonical spelling.
pub(super) fn normalize_params(
    kind: &str,
    raw: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, String>, ProviderError> {
    let spec = SyntheticSpec::from_raw(kind, raw)?;
    Ok(spec.canonical_params())
}

/// A fully resolved synthetic model configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticSpec {
    Linear { dim: usize, seed: u64, sigma: f64 },
    DigitCircular { slots: usize },
    SignSplit { dim: usize, scale: f64 },
    Isotropic { dim: usize, seed: u64 },
}

impl SyntheticSpec {
    fn from_raw(kind: &str, raw: &BTreeMap<String, String>) -> Result<Self, ProviderError> {
        let allowed = param_order(kind);
        if allowed.is_empty() {
            return Err(invalid(format!(
                "unknown synthetic kind {kind:?} (expected linear, digit-circular, sign-split or isotropic)"
            )));
        }
        if let Some(key) = raw.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(invalid(format!(
                "{kind}: unknown parameter {key:?} (allowed: {})",
                allowed.join(", ")
            )));
        }
        let get = |key: &str| raw.get(key).map(String::as_str);
        match kind {
            "linear" => {
                let dim = match get("d") {
                    Some(v) => parse_usize(kind, "d", v, 1)?,
                    None => 256,
                };
                let seed = match get("seed") {
                    Some(v) => parse_u64(kind, "seed", v)?,
                    None => 0,
                };
                let sigma = match get("sigma") {
                    Some(v) => {
                        let s = parse_f64(kind, "sigma", v)?;
                        if s < 0.0 {
                            return Err(invalid("linear: sigma must be >= 0".to_string()));
                        }
                        s
                    }
                    None => 0.0,
                };
                Ok(SyntheticSpec::Linear { dim, seed, sigma })
            }
            "digit-circular" => {
                let slots = match get("slots") {
                    Some(v) => parse_usize(kind, "slots", v, 3)?,
                    None => 24,
                };
                Ok(SyntheticSpec::DigitCircular { slots })
            }
            "sign-split" => {
                let dim = match get("d") {
                    Some(v) => parse_usize(kind, "d", v, 3)?,
                    None => 8,
                };
                let scale = match get("scale") {
                    Some(v) => {
                        let s = parse_f64(kind, "scale", v)?;
                        if s <= 0.0 {
                            return Err(invalid("sign-split: scale must be > 0".to_string()));
                        }
                        s
                    }
                    None => 1e-3,
                };
                Ok(SyntheticSpec::SignSplit { dim, scale })
            }
            "isotropic" => {
                let dim = match get("d") {
                    Some(v) => parse_usize(kind, "d", v, 1)?,
                    None => 8,
                };
                let seed = match get("seed") {
                    Some(v) => parse_u64(kind, "seed", v)?,
                    None => 0,
                };
                Ok(SyntheticSpec::Isotropic { dim, seed })
            }
            _ => unreachable!("guarded by allowed-params check"),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SyntheticSpec::Linear { .. } => "linear",
            SyntheticSpec::DigitCircular { .. } => "digit-circular",
            SyntheticSpec::SignSplit { .. } => "sign-split",
            SyntheticSpec::Isotropic { .. } => "isotropic",
        }
    }

    /// Output dimensionality.
    pub fn dim(&self) -> usize {
        match *self {
            SyntheticSpec::Linear { dim, .. } => dim,
            SyntheticSpec::DigitCircular { slots } => slots,
            SyntheticSpec::SignSplit { dim, .. } => dim,
            SyntheticSpec::Isotropic { dim, .. } => dim,
        }
    }

    fn canonical_params(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self {
            SyntheticSpec::Linear { dim, seed, sigma } => {
                out.insert("d".to_string(), dim.to_string());
                out.insert("seed".to_string(), seed.to_string());
                out.insert("sigma".to_string(), format_f64(*sigma));
            }
            SyntheticSpec::DigitCircular { slots } => {
                out.insert("slots".to_string(), slots.to_string());
            }
            SyntheticSpec::SignSplit { dim, scale } => {
                out.insert("d".to_string(), dim.to_string());
                out.insert("scale".to_string(), format_f64(*scale));
            }
            SyntheticSpec::Isotropic { dim, seed } => {
                out.insert("d".to_string(), dim.to_string());
                out.insert("seed".to_string(), seed.to_string());
            }
        }
        out
    }
}

fn format_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Seeded per-text RNG: identical text always yields identical noise, so
/// embeddings never depend on batch composition.
fn text_rng(model_canonical: &str, text: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(model_canonical.as_bytes());
    h.update(b"|");
    h.update(text.as_bytes());
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    ChaCha8Rng::seed_from_u64(u64::from_le_bytes(first))
}

/// Offline embedder for any `synthetic:` model.
pub struct SyntheticEmbedder {
    model: ModelRef,
    spec: SyntheticSpec,
    canonical: String,
    /// Unit direction for the linear construction.
    direction: Option<DVector<f64>>,
}

impl SyntheticEmbedder {
    pub fn new(model: &ModelRef) -> Result<Self, ProviderError> {
        if model.provider() != Provider::Synthetic {
            return Err(invalid(format!(
                "{} is not a synthetic model",
                model.canonical()
            )));
        }
        let spec = SyntheticSpec::from_raw(model.name(), model.params())?;
        let direction = match spec {
            SyntheticSpec::Linear { dim, seed, .. } => {
                let q = random_orthogonal(dim, seed).map_err(|e| {
                    invalid(format!("linear: could not build direction: {e}"))
                })?;
                Some(q.column(0).into_owned())
            }
            _ => None,
        };
        Ok(Self {
            model: model.clone(),
            canonical: model.canonical(),
            spec,
            direction,
        })
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn parse_value(text: &str) -> Result<f64, ProviderError> {
        let v: f64 = text.parse().map_err(|_| ProviderError::InvalidInput {
            detail: format!("{text:?} is not a decimal number"),
        })?;
        if !v.is_finite() {
            return Err(ProviderError::InvalidInput {
                detail: format!("{text:?} is out of range"),
            });
        }
        Ok(v)
    }

    fn embed_one(&self, text: &str) -> Result<Vec<f64>, ProviderError> {
        match &self.spec {
            SyntheticSpec::Linear { dim, sigma, .. } => {
                let x = Self::parse_value(text)?;
                let q = self.direction.as_ref().expect("set for linear");
                let mut v: Vec<f64> = q.iter().map(|qi| qi * x).collect();
                if *sigma > 0.0 {
                    let mut rng = text_rng(&self.canonical, text);
                    for vi in v.iter_mut().take(*dim) {
                        let eps: f64 = StandardNormal.sample(&mut rng);
                        *vi += sigma * eps;
                    }
                }
                Ok(v)
            }
            SyntheticSpec::DigitCircular { slots } => {
                let (sign, digits) = split_sign_digits(text)?;
                let needed = 2 * digits.len() + 1;
                if needed > *slots {
                    return Err(ProviderError::SlotOverflow {
                        text: text.to_string(),
                        needed,
                        available: *slots,
                    });
                }
                let mut v = vec![0.0; *slots];
                for (p, g) in digits.iter().enumerate() {
                    let angle = TAU * f64::from(*g) / 10.0;
                    v[2 * p] = angle.cos();
                    v[2 * p + 1] = angle.sin();
                }
                v[*slots - 1] = f64::from(sign);
                Ok(v)
            }
            SyntheticSpec::SignSplit { dim, scale } => {
                let x = Self::parse_value(text)?;
                let mut v = vec![0.0; *dim];
                v[0] = 3.0 * sign_of(x);
                v[1] = (1.0 + x.abs()).log10();
                v[2] = x * scale;
                Ok(v)
            }
            SyntheticSpec::Isotropic { dim, .. } => {
                let mut rng = text_rng(&self.canonical, text);
                Ok((0..*dim)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect())
            }
        }
    }
}

fn sign_of(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn split_sign_digits(text: &str) -> Result<(i8, Vec<u8>), ProviderError> {
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1i8, rest),
        None => (1i8, text),
    };
    let mut digits = Vec::with_capacity(body.len());
    for c in body.chars() {
        if c.is_ascii_digit() {
            digits.push(c as u8 - b'0');
        } else if c != '.' {
            return Err(ProviderError::InvalidInput {
                detail: format!("{text:?} contains non-decimal character {c:?}"),
            });
        }
    }
    if digits.is_empty() {
        return Err(ProviderError::InvalidInput {
            detail: format!("{text:?} has no digits"),
        });
    }
    Ok((sign, digits))
}

impl Embedder for SyntheticEmbedder {
    fn model(&self) -> &ModelRef {
        &self.model
    }

    fn embed_texts(&self, texts: &[String]) -> Result<Vec<Vec<f64>>, ProviderError> {
        texts.iter().map(|t| self.embed_one(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn embedder(spec: &str) -> SyntheticEmbedder {
        SyntheticEmbedder::new(&ModelRef::parse(spec).unwrap()).unwrap()
    }

    fn embed(e: &SyntheticEmbedder, text: &str) -> Vec<f64> {
        e.embed_texts(&[text.to_string()]).unwrap().remove(0)
    }

    #[test]
    fn linear_is_value_times_unit_direction() {
        let e = embedder("synthetic:linear/d=16");
        let v1 = embed(&e, "1");
        let norm: f64 = v1.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        let v2 = embed(&e, "2");
        for (a, b) in v1.iter().zip(&v2) {
            assert_relative_eq!(2.0 * a, *b, epsilon = 1e-12);
        }
        let zero = embed(&e, "0.0");
        assert!(zero.iter().all(|&z| z == 0.0));
    }

    #[test]
    fn linear_noise_is_per_text_deterministic() {
        let e = embedder("synthetic:linear/d=8/sigma=0.5");
        let a = embed(&e, "0.25");
        let b = embed(&e, "0.25");
        assert_eq!(a, b);
        // Same text embedded in different batch positions gives the same
        // vector.
        let batch = e
            .embed_texts(&["0.7".into(), "0.25".into(), "0.1".into()])
            .unwrap();
        assert_eq!(batch[1], a);
        // Noise actually perturbs the clean construction.
        let clean = embedder("synthetic:linear/d=8");
        assert_ne!(embed(&clean, "0.25"), a);
        // A different seed yields a different direction and noise stream.
        let other = embedder("synthetic:linear/d=8/seed=1/sigma=0.5");
        assert_ne!(embed(&other, "0.25"), a);
    }

    #[test]
    fn digit_circular_places_digits_on_circles() {
        let e = embedder("synthetic:digit-circular/slots=8");
        let v = embed(&e, "0.5");
        // digit '0' at slots 0-1, digit '5' at slots 2-3
        assert_relative_eq!(v[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(v[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(v[2], (TAU * 0.5).cos(), epsilon = 1e-12);
        assert_relative_eq!(v[3], (TAU * 0.5).sin(), epsilon = 1e-12);
        assert_eq!(v[7], 1.0);
        let neg = embed(&e, "-0.5");
        assert_eq!(neg[7], -1.0);
        assert_eq!(&neg[..4], &v[..4]);
    }

    #[test]
    fn digit_circular_adjacent_digits_are_nearer_than_distant_ones() {
        let e = embedder("synthetic:digit-circular/slots=8");
        let d = |a: &str, b: &str| {
            let va = embed(&e, a);
            let vb = embed(&e, b);
            va.iter()
                .zip(&vb)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        // 0.1 vs 0.2 differ by one digit step; 0.1 vs 0.5 by four; 0.1 vs
        // 0.9 wraps around the circle (9 -> 0 -> 1) to just two steps, the
        // same separation as 0.1 vs 0.3.
        assert!(d("0.1", "0.2") < d("0.1", "0.5"));
        assert!(d("0.1", "0.9") < d("0.1", "0.5"));
        assert_relative_eq!(d("0.1", "0.9"), d("0.1", "0.3"), epsilon = 1e-12);
    }

    #[test]
    fn digit_circular_rejects_overflow_and_junk() {
        let e = embedder("synthetic:digit-circular/slots=8");
        // "0.123" needs 2*4+1 = 9 slots.
        let err = e.embed_texts(&["0.123".to_string()]).unwrap_err();
        assert!(matches!(
            err,
            ProviderError::SlotOverflow {
                needed: 9,
                available: 8,
                ..
            }
        ));
        assert!(e.embed_texts(&["1e3".to_string()]).is_err());
        assert!(e.embed_texts(&["-".to_string()]).is_err());
    }

    #[test]
    fn sign_split_puts_sign_first_and_shrinks_value() {
        let e = embedder("synthetic:sign-split/d=4");
        let pos = embed(&e, "500");
        assert_eq!(pos[0], 3.0);
        assert_relative_eq!(pos[1], 501.0f64.log10(), epsilon = 1e-12);
        assert_relative_eq!(pos[2], 0.5, epsilon = 1e-12);
        assert_eq!(pos[3], 0.0);
        let neg = embed(&e, "-500");
        assert_eq!(neg[0], -3.0);
        assert_relative_eq!(neg[1], pos[1], epsilon = 1e-15);
        assert_relative_eq!(neg[2], -0.5, epsilon = 1e-12);
        let zero = embed(&e, "0");
        assert_eq!(zero[0], 0.0);
    }

    #[test]
    fn isotropic_ignores_value_structure_but_keeps_purity() {
        let e = embedder("synthetic:isotropic/d=6/seed=2");
        let a = embed(&e, "0.5");
        assert_eq!(a.len(), 6);
        assert_eq!(a, embed(&e, "0.5"));
        assert_ne!(a, embed(&e, "0.50"));
        let other_seed = embedder("synthetic:isotropic/d=6/seed=3");
        assert_ne!(a, embed(&other_seed, "0.5"));
    }

    #[test]
    fn non_synthetic_models_are_rejected() {
        let remote = ModelRef::parse("voyage-3.5").unwrap();
        assert!(SyntheticEmbedder::new(&remote).is_err());
    }

    #[test]
    fn spec_accessors_report_dimensions() {
        assert_eq!(embedder("synthetic:linear/d=32").dim(), 32);
        assert_eq!(embedder("synthetic:digit-circular").dim(), 24);
        assert_eq!(embedder("synthetic:sign-split").dim(), 8);
        assert_eq!(embedder("synthetic:isotropic").dim(), 8);
        assert_eq!(embedder("synthetic:linear").spec().kind(), "linear");
    }
}
