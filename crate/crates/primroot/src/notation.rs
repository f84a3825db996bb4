//! Shared numeric conventions.

/// How iterated logarithms are evaluated in statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogLogMode {
    /// `max(1, ln ln x)` — the convention used by every headline statistic.
    /// It keeps the summand `loglog q / log q` bounded away from 0 for tiny q.
    #[default]
    Capped,
    /// Plain `ln ln x`, exposed for sensitivity analysis.
    Raw,
}

/// Iterated logarithm under the chosen convention. Requires x > 1.
pub fn loglog(x: f64, mode: LogLogMode) -> f64 {
    let v = x.ln().ln();
    match mode {
        LogLogMode::Capped => v.max(1.0),
        LogLogMode::Raw => v,
    }
}

/// The constant 1/(4√e) ≈ 0.1516, the base exponent in every size bound.
pub fn quarter_inv_sqrt_e() -> f64 {
    0.25 * (-0.5f64).exp()
}
