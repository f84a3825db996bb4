//! The Dickman–de Bruijn function ρ and its inverse.
//!
//! ρ is the continuous solution of the delay differential equation
//! `u·ρ'(u) + ρ(u−1) = 0` with ρ ≡ 1 on [0, 1]; equivalently, on each unit
//! interval it satisfies the integral form
//!
//! ```text
//! ρ(u) = ρ(n) − ∫_n^u ρ(t−1)/t dt,      u ∈ [n, n+1].
//! ```
//!
//! [`DickmanTable`] marches this integral form across a dense grid (default
//! step 10⁻³, cubic interpolation between nodes, adaptive Simpson quadrature
//! per step with tolerance 10⁻¹²). Accuracy: absolute error stays near the
//! f64 rounding floor (~10⁻¹⁴) across the whole grid — far inside the 10⁻¹⁰
//! contract — and relative error stays below ~10⁻⁸ through u ≈ 7, the range
//! every inversion in this crate lives in. Past u ≈ 12 the true values sink
//! beneath that absolute floor, so the tail of the table is meaningful in
//! absolute terms only (it stays positive and strictly decreasing).
//!
//! ρ is strictly decreasing for u > 1 and positive everywhere, so the value
//! u(d) with ρ(u(d)) = 1/d is well defined for d > 1 and found by bisection.
//! Note u(d) increases with d: pushing the density 1/d down forces u up.
//! In particular u(2) = √e and u(3) = e^{2/3}, from ρ(u) = 1 − ln u on \[1, 2\].

use serde::Serialize;

use crate::{Error, Result};

/// Default table extent.
pub const DEFAULT_U_MAX: u32 = 50;
/// Default nodes per unit interval (grid step 10⁻³).
pub const DEFAULT_STEP_INV: u32 = 1000;
/// Hard ceiling for on-demand extension: ρ(120) ≈ 10⁻²⁷⁹ is still normal in
/// f64; much past that the values denormalize.
pub const MAX_U_MAX: u32 = 120;

const STEP_TOLERANCE: f64 = 1e-12;

/// Dense grid of ρ values on [0, u_max] supporting interpolation & inversion.
#[derive(Debug, Clone)]
pub struct DickmanTable {
    step_inv: u32,
    u_max: u32,
    /// values[k] = ρ(k / step_inv), k = 0 ..= u_max * step_inv
    values: Vec<f64>,
}

impl Default for DickmanTable {
    fn default() -> Self {
        Self::new()
    }
}

impl DickmanTable {
    /// Table on [0, 50] with grid step 10⁻³.
    pub fn new() -> Self {
        Self::with_params(DEFAULT_U_MAX, DEFAULT_STEP_INV).expect("default parameters are valid")
    }

    /// Table on [0, u_max] with `step_inv` nodes per unit interval.
    pub fn with_params(u_max: u32, step_inv: u32) -> Result<Self> {
        if u_max < 2 {
            return Err(Error::domain("u_max must be at least 2"));
        }
        if u_max > MAX_U_MAX {
            return Err(Error::range(format!("u_max capped at {MAX_U_MAX}")));
        }
        if step_inv < 4 {
            return Err(Error::domain(
                "need at least 4 grid nodes per unit interval (step <= 1/4)",
            ));
        }
        let k = step_inv as usize;
        let mut values = Vec::with_capacity(u_max as usize * k + 1);
        values.extend(std::iter::repeat(1.0).take(k + 1)); // ρ = 1 on [0,1]
        let mut table = DickmanTable {
            step_inv,
            u_max: 1,
            values,
        };
        table.extend_to(u_max)?;
        Ok(table)
    }

    /// Extends the grid in place up to `new_u_max`.
    pub fn extend_to(&mut self, new_u_max: u32) -> Result<()> {
        if new_u_max > MAX_U_MAX {
            return Err(Error::range(format!("u_max capped at {MAX_U_MAX}")));
        }
        let k = self.step_inv as usize;
        let h = 1.0 / self.step_inv as f64;
        while self.u_max < new_u_max {
            let n = self.u_max;
            for j in 0..k {
                let idx = n as usize * k + j;
                let a = idx as f64 * h;
                let b = (idx + 1) as f64 * h;
                // the integrand only looks back at [a-1, b-1], already built
                let integral = adaptive_simpson(
                    |t| self.interpolate(t - 1.0) / t,
                    a,
                    b,
                    STEP_TOLERANCE,
                );
                let next = self.values[idx] - integral;
                self.values.push(next);
            }
            self.u_max += 1;
        }
        Ok(())
    }

    pub fn u_max(&self) -> f64 {
        self.u_max as f64
    }

    pub fn step(&self) -> f64 {
        1.0 / self.step_inv as f64
    }

    /// Grid nodes (u, ρ(u)).
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = self.step();
        self.values.iter().enumerate().map(move |(i, &v)| (i as f64 * h, v))
    }

    /// Cubic interpolation of the grid. The stencil never crosses an integer
    /// node: ρ is only C^{n-1} at u = n, and a stencil across the kink would
    /// lose the error budget.
    fn interpolate(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return 1.0;
        }
        let k = self.step_inv as usize;
        let unit = (u.floor() as usize).min(self.u_max as usize - 1);
        let base = unit * k;
        let s = (u - unit as f64) * self.step_inv as f64;
        let j = (s.floor() as usize).min(k - 1);
        let lo = j.saturating_sub(1).min(k - 3);
        // Lagrange cubic on nodes lo .. lo+3 of this unit interval.
        let mut acc = 0.0;
        for i in lo..lo + 4 {
            let mut w = 1.0;
            for m in lo..lo + 4 {
                if m != i {
                    w *= (s - m as f64) / (i as f64 - m as f64);
                }
            }
            acc += w * self.values[base + i];
        }
        acc
    }

    /// ρ(u) to absolute accuracy 10⁻¹⁰ (far better in practice).
    ///
    /// Exactly 1 for u ≤ 1; domain error for u < 0; range error past the
    /// table end (extend with [`extend_to`](Self::extend_to)).
    pub fn rho(&self, u: f64) -> Result<f64> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::domain(format!("rho requires u >= 0, got {u}")));
        }
        if u > self.u_max as f64 {
            return Err(Error::range(format!(
                "u = {u} exceeds table u_max = {}; extend the table",
                self.u_max
            )));
        }
        if u <= 1.0 {
            return Ok(1.0);
        }
        Ok(self.interpolate(u))
    }

    /// The unique u with ρ(u) = 1/d, for d > 1, by bisection on [1, u_max].
    ///
    /// By convention u(1) = 1 (the largest u with ρ(u) = 1); d < 1 is a
    /// domain error since ρ never exceeds 1. Range error if the table is too
    /// short to bracket the root.
    pub fn u_of(&self, d: f64) -> Result<f64> {
        if !d.is_finite() || d < 1.0 {
            return Err(Error::domain(format!(
                "u_of requires d >= 1 (rho never exceeds 1), got {d}"
            )));
        }
        if d == 1.0 {
            return Ok(1.0);
        }
        let target = 1.0 / d;
        let end = self.u_max as f64;
        if self.interpolate(end) > target {
            return Err(Error::range(format!(
                "rho(u_max={end}) > 1/d for d = {d:e}; extend the table to bracket u(d)"
            )));
        }
        let (mut lo, mut hi) = (1.0f64, end);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.interpolate(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// [`u_of`](Self::u_of), doubling the table extent until the root is
    /// bracketed (ρ decays super-exponentially, so brackets are cheap).
    pub fn u_of_extending(&mut self, d: f64) -> Result<f64> {
        loop {
            match self.u_of(d) {
                Err(Error::Range(_)) if self.u_max < MAX_U_MAX => {
                    let next = (self.u_max * 2).min(MAX_U_MAX);
                    self.extend_to(next)?;
                }
                other => return other,
            }
        }
    }
}

/// Adaptive Simpson quadrature with absolute tolerance.
fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 24)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Leading asymptotic approximation to 1/u(n) with its error scale.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UAsymptotic {
    /// (ln ln n − 1) / ln n
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub leading: f64,
    /// ln ln ln n / (ln ln n · ln n), the scale of the neglected term
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub error_scale: f64,
}

/// Leading-order approximation (ln ln n − 1)/ln n to 1/u(n), together with
/// the error-scale term, so callers can report an uncertainty band.
/// Requires n ≥ 20 (so that ln ln n > 1).
pub fn u_asymptotic_reciprocal(n: f64) -> Result<UAsymptotic> {
    if n.is_nan() || n < 20.0 {
        return Err(Error::domain(format!(
            "asymptotic inverse requires n >= 20, got {n}"
        )));
    }
    let ln = n.ln();
    let ll = ln.ln();
    Ok(UAsymptotic {
        leading: (ll - 1.0) / ln,
        error_scale: ll.ln() / (ll * ln),
    })
}

/// de Bruijn main term exp(−u ln u − u ln ln u + u); diagnostic only.
/// Domain error for u < 3, where the expansion is meaningless.
pub fn rho_debruijn(u: f64) -> Result<f64> {
    if u.is_nan() || u < 3.0 {
        return Err(Error::domain(format!(
            "de Bruijn main term requires u >= 3, got {u}"
        )));
    }
    Ok((-u * u.ln() - u * u.ln().ln() + u).exp())
}
