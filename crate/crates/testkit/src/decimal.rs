//! Big-integer oracle for decimal-string-to-double conversion.
//!
//! Converts an exact decimal given as digit strings into the nearest IEEE-754
//! double using only integer arithmetic (round to nearest, ties to even).
//! This is the reference the production path — which leans on the standard
//! library's float parser — is checked against for inputs with up to 20
//! significant places.

use num_bigint::BigUint;

/// Nearest double to `sign * (int_digits "." frac_digits)`.
///
/// `sign` is `+1`/`-1`, both digit strings are plain ASCII digits and
/// `frac_digits` may be empty. Values are expected to stay far away from
/// double overflow/underflow (magnitudes between 1e-25 and 1e25), which holds
/// for every dataset this harness generates.
pub fn nearest_double(sign: i8, int_digits: &str, frac_digits: &str) -> f64 {
    assert!(sign == 1 || sign == -1, "sign must be +/-1");
    let digits: String = [int_digits, frac_digits].concat();
    let numerator = BigUint::parse_bytes(digits.as_bytes(), 10)
        .expect("digit strings must be ASCII digits");
    if numerator == BigUint::from(0u8) {
        return 0.0;
    }
    let denominator = BigUint::from(10u8).pow(frac_digits.len() as u32);

    // Find t with floor(numerator * 2^t / denominator) exactly 54 bits wide:
    // 53 mantissa bits plus one rounding bit, with the division remainder as
    // the sticky bit.
    let mut t: i64 = 54 - (numerator.bits() as i64 - denominator.bits() as i64) - 2;
    loop {
        let shifted = if t >= 0 {
            &numerator << t as usize
        } else {
            &numerator >> (-t) as usize
        };
        let q = &shifted / &denominator;
        let width = q.bits() as i64;
        if width < 54 {
            t += 1;
            continue;
        }
        if width > 54 {
            t -= 1;
            continue;
        }
        let rem = &shifted % &denominator;
        // q = 2*mantissa + round_bit, exact value = (q + rem/denom) * 2^-t
        let q_u64: u64 = q.to_u64_digits()[0];
        let mut mantissa = q_u64 >> 1;
        let round_bit = q_u64 & 1 == 1;
        let sticky = rem != BigUint::from(0u8) || t < 0 && {
            // bits shifted out below the quotient also count as sticky
            let mask = (BigUint::from(1u8) << (-t) as usize) - BigUint::from(1u8);
            (&numerator & mask) != BigUint::from(0u8)
        };
        if round_bit && (sticky || mantissa & 1 == 1) {
            mantissa += 1; // may carry to 2^53; exactly representable either way
        }
        let magnitude = mantissa as f64 * 2.0_f64.powi((1 - t) as i32);
        return if sign < 0 { -magnitude } else { magnitude };
    }
}

/// Nearest double to a canonical decimal text like `-12.0345` or `708`.
pub fn nearest_double_of_text(text: &str) -> f64 {
    let (sign, rest) = match text.strip_prefix('-') {
        Some(r) => (-1i8, r),
        None => (1i8, text),
    };
    let (int_digits, frac_digits) = match rest.split_once('.') {
        Some((i, f)) => (i, f),
        None => (rest, ""),
    };
    nearest_double(sign, int_digits, frac_digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_simple_values() {
        assert_eq!(nearest_double(1, "0", "5"), 0.5);
        assert_eq!(nearest_double(1, "1", ""), 1.0);
        assert_eq!(nearest_double(-1, "2", "25"), -2.25);
        assert_eq!(nearest_double(1, "0", ""), 0.0);
        assert_eq!(nearest_double(1, "0", "1"), 0.1);
        assert_eq!(nearest_double(-1, "0", "1"), -0.1);
    }

    #[test]
    fn matches_std_parser_on_long_fractions() {
        // The standard library parser is correctly rounded, so the two
        // independent routes must agree bit for bit.
        let cases = [
            "0.12345678901234567890",
            "-0.99999999999999999999",
            "0.00000000000000000001",
            "1.00000000000000000000",
            "-0.68791852330721945643",
            "12345678901234567890",
            "-99999999999999999999",
            "0.3",
            "-271.828",
        ];
        for text in cases {
            let oracle = nearest_double_of_text(text);
            let std_parsed: f64 = text.parse().unwrap();
            assert_eq!(
                oracle.to_bits(),
                std_parsed.to_bits(),
                "mismatch for {text}: oracle {oracle:e}, std {std_parsed:e}"
            );
        }
    }

    #[test]
    fn exhaustive_two_place_grid_matches_std() {
        for k in 0..=200i32 {
            let sign = if k < 100 { "-" } else { "" };
            let mag = (k - 100).unsigned_abs();
            let text = format!("{sign}{}.{:02}", mag / 100, mag % 100);
            let oracle = nearest_double_of_text(&text);
            let std_parsed: f64 = text.parse().unwrap();
            assert_eq!(oracle.to_bits(), std_parsed.to_bits(), "mismatch for {text}");
        }
    }
}
