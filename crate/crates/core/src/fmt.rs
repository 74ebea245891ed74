//! Deterministic number formatting for text, CSV and JSON output.
//!
//! All printed floats carry 12 significant digits, rounded half to even on
//! the exact binary value, with no locale dependence.

pub const SIG_DIGITS: usize = 12;

/// Formats `x` with [`SIG_DIGITS`] significant digits.
///
/// Plain decimal notation is used for exponents in `-6..=14`, scientific
/// notation otherwise. Trailing zeros are trimmed.
pub fn sig(x: f64) -> String {
    sig_with(x, SIG_DIGITS)
}

pub fn sig_with(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let raw: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let trimmed = raw.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if !(-6..=14).contains(&exp) {
        out.push_str(&trimmed[..1]);
        if trimmed.len() > 1 {
            out.push('.');
            out.push_str(&trimmed[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
        return out;
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(trimmed);
    } else {
        let int_len = exp as usize + 1;
        if trimmed.len() <= int_len {
            out.push_str(trimmed);
            for _ in trimmed.len()..int_len {
                out.push('0');
            }
        } else {
            out.push_str(&trimmed[..int_len]);
            out.push('.');
            out.push_str(&trimmed[int_len..]);
        }
    }
    out
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits, for JSON emission.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    sig(x).parse().unwrap_or(x)
}

/// JSON number (or `null` for non-finite values) rounded like [`sig`].
pub fn json_num(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig(x))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_values() {
        assert_eq!(sig(0.2), "0.2");
        assert_eq!(sig(-65.0), "-65");
        assert_eq!(sig(623.5), "623.5");
        assert_eq!(sig(0.0), "0");
        assert_eq!(sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig(123456.0), "123456");
        assert_eq!(sig(0.000123), "0.000123");
    }

    #[test]
    fn ties_round_to_even() {
        // 0.125 and 0.375 are exact in binary.
        assert_eq!(sig_with(0.125, 2), "0.12");
        assert_eq!(sig_with(0.375, 2), "0.38");
        assert_eq!(sig_with(2.5, 1), "2");
    }

    #[test]
    fn extreme_exponents_use_scientific() {
        assert_eq!(sig(1.5e-9), "1.5e-9");
        assert_eq!(sig(2.0e20), "2e20");
        assert_eq!(sig(f64::NAN), "NaN");
    }

    #[test]
    fn json_matches_text() {
        let x = 0.6 * 1.2f64.ln() + 0.4 * 0.8f64.ln();
        assert_eq!(json_num(x).to_string(), sig(x));
    }
}
