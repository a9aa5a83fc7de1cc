//! Stable number formatting for reports.

use crate::linalg::Amplitude;

/// Significant digits used in table output.
pub const SIG_DIGITS: usize = 12;

/// Components smaller than this print as `0` in table output.
pub const DISPLAY_FLOOR: f64 = 1e-14;

/// Format a real with 12 significant digits, trailing zeros trimmed and
/// negative zero printed as `0`.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 || x.abs() < DISPLAY_FLOOR {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `a+bi` / `a-bi` with both parts formatted by [`real`].
pub fn complex(z: Amplitude) -> String {
    let re = real(z.re);
    let im = real(z.im);
    match im.strip_prefix('-') {
        Some(mag) => format!("{re}-{mag}i"),
        None => format!("{re}+{im}i"),
    }
}
