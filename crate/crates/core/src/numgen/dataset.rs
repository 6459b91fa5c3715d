//! Value families, grid sampling and fold assignment.

use super::exact::ExactDecimal;
use super::NumgenError;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

/// Highest supported precision level (decimal or integer places).
pub const MAX_PRECISION: u32 = 20;

/// The three value families the harness sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Decimals in [0, 1] with a fixed number of decimal places.
    PositiveDecimals,
    /// Decimals in [-1, 1] with a fixed number of decimal places.
    MixedSignDecimals,
    /// Integers strictly between -10^a and 10^a.
    MixedSignIntegers,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::PositiveDecimals,
        Family::MixedSignDecimals,
        Family::MixedSignIntegers,
    ];

    /// Stable kebab-case name used in files, paths and manifests.
    pub fn name(&self) -> &'static str {
        match self {
            Family::PositiveDecimals => "positive-decimals",
            Family::MixedSignDecimals => "mixed-sign-decimals",
            Family::MixedSignIntegers => "mixed-sign-integers",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }

    /// Letter conventionally attached to this family's precision level:
    /// `b` for decimal places, `a` for integer places.
    pub fn precision_symbol(&self) -> char {
        match self {
            Family::MixedSignIntegers => 'a',
            _ => 'b',
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A family plus the precision level that fixes its value grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionSpec {
    family: Family,
    /// Integer places: 1 for the decimal families, `a` for integers.
    int_places: u32,
    /// Decimal places: `b` for the decimal families, 0 for integers.
    dec_places: u32,
}

impl PrecisionSpec {
    /// Spec for `family` at precision `level` (`b` for decimals, `a` for
    /// integers). Decimal levels run 1..=20; integer levels 0..=20, with
    /// `a = 0` yielding a degenerate single-value grid that generation
    /// rejects.
    pub fn new(family: Family, level: u32) -> Result<Self, NumgenError> {
        match family {
            Family::PositiveDecimals | Family::MixedSignDecimals => {
                if level < 1 || level > MAX_PRECISION {
                    return Err(NumgenError::PrecisionRange {
                        family: family.name(),
                        value: level,
                        min: 1,
                        max: MAX_PRECISION,
                    });
                }
                Ok(Self {
                    family,
                    int_places: 1,
                    dec_places: level,
                })
            }
            Family::MixedSignIntegers => {
                if level > MAX_PRECISION {
                    return Err(NumgenError::PrecisionRange {
                        family: family.name(),
                        value: level,
                        min: 0,
                        max: MAX_PRECISION,
                    });
                }
                Ok(Self {
                    family,
                    int_places: level,
                    dec_places: 0,
                })
            }
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Integer places (`a`).
    pub fn int_places(&self) -> u32 {
        self.int_places
    }

    /// Decimal places (`b`).
    pub fn dec_places(&self) -> u32 {
        self.dec_places
    }

    /// The precision level that varies for this family.
    pub fn level(&self) -> u32 {
        match self.family {
            Family::MixedSignIntegers => self.int_places,
            _ => self.dec_places,
        }
    }

    /// Number of distinct representable values on this grid.
    pub fn grid_size(&self) -> u128 {
        match self.family {
            // {k * 10^-b : 0 <= k <= 10^b}
            Family::PositiveDecimals => pow10(self.dec_places) + 1,
            // {k * 10^-b : -10^b <= k <= 10^b}
            Family::MixedSignDecimals => 2 * pow10(self.dec_places) + 1,
            // integers in (-10^a, 10^a)
            Family::MixedSignIntegers => 2 * pow10(self.int_places) - 1,
        }
    }

    /// The exact value at grid position `idx` (0-based, ascending order).
    fn value_at(&self, idx: u128) -> ExactDecimal {
        let build = |sign: i8, magnitude: u128| -> ExactDecimal {
            match self.family {
                Family::MixedSignIntegers => {
                    ExactDecimal::new(sign, magnitude.to_string(), String::new())
                }
                _ => {
                    let scale = pow10(self.dec_places);
                    let int_part = (magnitude / scale).to_string();
                    let frac_part = format!(
                        "{:0width$}",
                        magnitude % scale,
                        width = self.dec_places as usize
                    );
                    ExactDecimal::new(sign, int_part, frac_part)
                }
            }
            .expect("grid values are canonical by construction")
        };
        match self.family {
            Family::PositiveDecimals => build(1, idx),
            Family::MixedSignDecimals => {
                let half = pow10(self.dec_places);
                if idx < half {
                    build(-1, half - idx)
                } else {
                    build(1, idx - half)
                }
            }
            Family::MixedSignIntegers => {
                let half = pow10(self.int_places) - 1;
                if idx < half {
                    build(-1, half - idx)
                } else {
                    build(1, idx - half)
                }
            }
        }
    }
}

fn pow10(exp: u32) -> u128 {
    10u128.pow(exp)
}

/// One generated number: canonical text, nearest double, and the exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberSample {
    pub text: String,
    pub value: f64,
    pub exact: ExactDecimal,
}

impl NumberSample {
    pub(crate) fn from_exact(exact: ExactDecimal) -> Self {
        Self {
            text: exact.canonical_format(),
            value: exact.value(),
            exact,
        }
    }
}

/// A sampled dataset: the precision settings that defined its grid, the seed
/// that drew it, and the samples in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarDataset {
    pub spec: PrecisionSpec,
    pub seed: u64,
    pub samples: Vec<NumberSample>,
}

impl ScalarDataset {
    pub fn size(&self) -> usize {
        self.samples.len()
    }

    pub fn texts(&self) -> Vec<String> {
        self.samples.iter().map(|s| s.text.clone()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }
}

/// Draw up to `n` values uniformly without replacement from the grid of
/// `spec`, in shuffled order. Grids smaller than `n` are taken whole.
pub fn generate(spec: PrecisionSpec, n: usize, seed: u64) -> Result<ScalarDataset, NumgenError> {
    if n == 0 {
        return Err(NumgenError::InvalidSampleCount { n });
    }
    let grid = spec.grid_size();
    if grid < 2 {
        return Err(NumgenError::DegenerateDataset {
            detail: format!(
                "{} at {}={} has a single-value grid",
                spec.family().name(),
                spec.family().precision_symbol(),
                spec.level()
            ),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = sample_without_replacement(grid, n, &mut rng);
    let samples = indices
        .into_iter()
        .map(|idx| NumberSample::from_exact(spec.value_at(idx)))
        .collect();
    Ok(ScalarDataset {
        spec,
        seed,
        samples,
    })
}

/// Decimals in [0, 1] with `b` decimal places.
pub fn gen_positive_decimals(b: u32, n: usize, seed: u64) -> Result<ScalarDataset, NumgenError> {
    generate(PrecisionSpec::new(Family::PositiveDecimals, b)?, n, seed)
}

/// Decimals in [-1, 1] with `b` decimal places.
pub fn gen_mixed_sign_decimals(b: u32, n: usize, seed: u64) -> Result<ScalarDataset, NumgenError> {
    generate(PrecisionSpec::new(Family::MixedSignDecimals, b)?, n, seed)
}

/// Integers strictly between -10^a and 10^a.
pub fn gen_mixed_sign_integers(a: u32, n: usize, seed: u64) -> Result<ScalarDataset, NumgenError> {
    generate(PrecisionSpec::new(Family::MixedSignIntegers, a)?, n, seed)
}

/// Up to `n` integers drawn uniformly without replacement from `[lo, hi]`,
/// used by the magnitude-sweep figures where bounds are not powers of ten.
pub fn gen_integer_range(
    lo: i128,
    hi: i128,
    n: usize,
    seed: u64,
) -> Result<Vec<NumberSample>, NumgenError> {
    if n == 0 {
        return Err(NumgenError::InvalidSampleCount { n });
    }
    if lo >= hi {
        return Err(NumgenError::DegenerateDataset {
            detail: format!("integer range [{lo}, {hi}] holds fewer than two values"),
        });
    }
    let grid = (hi - lo) as u128 + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = sample_without_replacement(grid, n, &mut rng);
    indices
        .into_iter()
        .map(|idx| {
            let v = lo + idx as i128;
            let sign = if v < 0 { -1 } else { 1 };
            let exact = ExactDecimal::new(sign, v.unsigned_abs().to_string(), String::new())?;
            Ok(NumberSample::from_exact(exact))
        })
        .collect()
}

/// Uniform sample of `min(n, grid)` distinct indices from `0..grid`.
///
/// Small grids are enumerated and shuffled; large ones are rejection-sampled,
/// which stays fast because `n` is far below the grid size whenever the grid
/// is large.
fn sample_without_replacement(grid: u128, n: usize, rng: &mut ChaCha8Rng) -> Vec<u128> {
    if grid <= n as u128 {
        let mut all: Vec<u128> = (0..grid).collect();
        all.shuffle(rng);
        return all;
    }
    let mut seen: HashSet<u128> = HashSet::with_capacity(n);
    let mut picked: Vec<u128> = Vec::with_capacity(n);
    while picked.len() < n {
        let idx = rng.gen_range(0..grid);
        if seen.insert(idx) {
            picked.push(idx);
        }
    }
    picked
}

/// Assignment of dataset rows to `k` cross-validation folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    k: usize,
    fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    /// Fold index of row `i`.
    pub fn fold_of(&self, i: usize) -> usize {
        self.fold_of[i]
    }

    /// Rows held out in `fold`, in row order.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    /// Rows trained on for `fold`, in row order.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }
}

/// Deterministic `k`-fold split of `n` rows: a seeded shuffle dealt
/// round-robin, so fold sizes differ by at most one.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldAssignment, NumgenError> {
    if k == 0 {
        return Err(NumgenError::InvalidFoldCount);
    }
    if n < k {
        return Err(NumgenError::TooFewSamples { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut fold_of = vec![0usize; n];
    for (j, &row) in order.iter().enumerate() {
        fold_of[row] = j % k;
    }
    Ok(FoldAssignment { k, fold_of })
}
