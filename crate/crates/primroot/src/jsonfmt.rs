//! Deterministic numeric formatting for machine-readable output.
//!
//! Every float that reaches JSON or CSV output is first rounded to 12
//! significant digits, so identical invocations produce byte-identical
//! output and diffs between runs are meaningful.

/// Round to 12 significant decimal digits. Negative zero normalizes to zero.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    if x == 0.0 {
        return 0.0;
    }
    // 11 fractional digits in scientific notation = 12 significant digits.
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Decimal string of the 12-significant-digit rounding.
pub fn fmt_sig12(x: f64) -> String {
    let r = round_sig12(x);
    if r == 0.0 {
        return "0".to_string();
    }
    let mag = r.abs().log10();
    // Plain decimal for moderate magnitudes, scientific for the extremes.
    if (-5.0..12.0).contains(&mag) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Serde helper: serialize an `f64` rounded to 12 significant digits.
pub fn ser_f64_12<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*x))
}
