//! Locale-independent number formatting with 12 significant digits.

use hotelling_core::Gamma;

const DIGITS: i32 = 12;

/// Formats `x` like C's `%.12g`: fixed notation for exponents in
/// `[-4, 12)`, scientific otherwise, trailing zeros removed. Negative zero
/// prints as `0`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim(mantissa), exp.abs());
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn optional(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

pub fn gamma(g: Gamma) -> String {
    match g {
        Gamma::Infinite => "inf".into(),
        Gamma::Finite(v) => number(v),
    }
}
