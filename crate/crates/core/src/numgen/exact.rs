//! Arbitrary-precision signed decimals stored as digit strings.

use super::NumgenError;
use std::cmp::Ordering;
use std::fmt;

/// Maximum number of integer digits a value may carry (covers 10^20).
pub(crate) const MAX_INT_DIGITS: usize = 21;

/// An exact signed decimal: sign, integer digits and fraction digits kept as
/// ASCII strings so no precision is lost at any supported scale.
///
/// The fraction length *is* the number of decimal places — trailing zeros are
/// significant for formatting ("0.50" has two places). Zero always carries a
/// positive sign; there is no "-0".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactDecimal {
    sign: i8,
    int_digits: String,
    frac_digits: String,
}

impl ExactDecimal {
    /// Build a value from its parts, validating the digit-string rules.
    pub fn new(
        sign: i8,
        int_digits: impl Into<String>,
        frac_digits: impl Into<String>,
    ) -> Result<Self, NumgenError> {
        let int_digits = int_digits.into();
        let frac_digits = frac_digits.into();
        if sign != 1 && sign != -1 {
            return Err(NumgenError::InvalidDigits {
                detail: format!("sign must be +1 or -1, got {sign}"),
            });
        }
        if int_digits.is_empty() {
            return Err(NumgenError::InvalidDigits {
                detail: "integer part must not be empty".into(),
            });
        }
        if int_digits.len() > MAX_INT_DIGITS {
            return Err(NumgenError::InvalidDigits {
                detail: format!(
                    "integer part has {} digits, maximum is {MAX_INT_DIGITS}",
                    int_digits.len()
                ),
            });
        }
        if !int_digits.bytes().all(|b| b.is_ascii_digit())
            || !frac_digits.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(NumgenError::InvalidDigits {
                detail: format!("non-digit character in \"{int_digits}.{frac_digits}\""),
            });
        }
        if int_digits.len() > 1 && int_digits.starts_with('0') {
            return Err(NumgenError::InvalidDigits {
                detail: format!("integer part \"{int_digits}\" has a leading zero"),
            });
        }
        let is_zero = int_digits.bytes().all(|b| b == b'0') && frac_digits.bytes().all(|b| b == b'0');
        Ok(Self {
            // Normalize: zero is always positive, so "-0.0" cannot exist.
            sign: if is_zero { 1 } else { sign },
            int_digits,
            frac_digits,
        })
    }

    /// `+1` or `-1`; zero is always `+1`.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn int_digits(&self) -> &str {
        &self.int_digits
    }

    pub fn frac_digits(&self) -> &str {
        &self.frac_digits
    }

    /// Number of decimal places (the fraction-digit count, zeros included).
    pub fn decimal_places(&self) -> usize {
        self.frac_digits.len()
    }

    pub fn is_zero(&self) -> bool {
        self.int_digits.bytes().all(|b| b == b'0') && self.frac_digits.bytes().all(|b| b == b'0')
    }

    /// Canonical fixed-point rendering: optional ASCII minus, integer digits,
    /// and a fraction part only when decimal places exist. Never "-0.0", no
    /// exponents, no plus signs, no separators.
    pub fn canonical_format(&self) -> String {
        let mut out = String::with_capacity(
            self.int_digits.len() + self.frac_digits.len() + 2,
        );
        if self.sign < 0 {
            out.push('-');
        }
        out.push_str(&self.int_digits);
        if !self.frac_digits.is_empty() {
            out.push('.');
            out.push_str(&self.frac_digits);
        }
        out
    }

    /// Parse a canonical rendering back into its parts (strict inverse of
    /// [`Self::canonical_format`]).
    pub fn parse(text: &str) -> Result<Self, NumgenError> {
        let (sign, rest) = match text.strip_prefix('-') {
            Some(rest) => (-1i8, rest),
            None => (1i8, text),
        };
        let (int_part, frac_part) = match rest.split_once('.') {
            Some((i, f)) => {
                if f.is_empty() {
                    return Err(NumgenError::InvalidDigits {
                        detail: format!("\"{text}\" has a trailing decimal point"),
                    });
                }
                (i, f)
            }
            None => (rest, ""),
        };
        let value = Self::new(sign, int_part, frac_part)?;
        if value.sign != sign {
            // new() normalized a negative zero away; reject "-0", "-0.00" etc.
            return Err(NumgenError::InvalidDigits {
                detail: format!("\"{text}\" writes zero with a minus sign"),
            });
        }
        Ok(value)
    }

    /// The IEEE-754 double nearest to this exact value.
    ///
    /// The canonical text goes through the standard library parser, which is
    /// correctly rounded for arbitrarily many digits.
    pub fn value(&self) -> f64 {
        self.canonical_format()
            .parse::<f64>()
            .expect("canonical decimal text always parses")
    }

    /// Exact numeric ordering.
    ///
    /// Distinct from `Eq`/`PartialEq`, which compare representations:
    /// "0.5" and "0.50" are numerically equal but not the same value object.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if self.is_zero() && other.is_zero() {
            return Ordering::Equal;
        }
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let magnitude = self.cmp_magnitude(other);
        if self.sign < 0 {
            magnitude.reverse()
        } else {
            magnitude
        }
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        // Integer parts have no leading zeros: longer means larger.
        match self
            .int_digits
            .len()
            .cmp(&other.int_digits.len())
            .then_with(|| self.int_digits.cmp(&other.int_digits))
        {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Fractions compare digit by digit, missing digits count as zero.
        let longest = self.frac_digits.len().max(other.frac_digits.len());
        let digit = |s: &str, i: usize| s.as_bytes().get(i).copied().unwrap_or(b'0');
        for i in 0..longest {
            match digit(&self.frac_digits, i).cmp(&digit(&other.frac_digits, i)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for ExactDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_format())
    }
}
