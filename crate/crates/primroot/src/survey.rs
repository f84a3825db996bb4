//! Prime-sweep statistics harness.
//!
//! Sweeps all odd primes p ≤ x, building one [`PrimeSurveyRecord`] per prime
//! (roughness, least primitive root, the constructed non-residue and its
//! exponent, the two divisor-structure conditions, ω(p−1, t) counts, and the
//! totient ratio), then aggregates the records into a [`SurveyReport`].
//!
//! The sweep is data-parallel over contiguous prime shards; records are
//! merged in prime order and every aggregate is recomputed by a separate
//! serial pass over the merged records, so a sharded run is bit-identical to
//! a serial one. Probability estimates carry exact integer numerators and
//! denominators; no float accumulates a count.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, FactoredInteger};
use crate::constructor::{self, construct_simultaneous_nonresidue};
use crate::dickman::DickmanTable;
use crate::jsonfmt;
use crate::notation::{self, LogLogMode};
use crate::structure::JacobsthalCache;
use crate::{Error, Result};

/// Subset enumeration cap for condition (1): 2^20 subsets is the budget.
pub const CONDITION1_OMEGA_CAP: u32 = 20;

/// Histogram bin width for exponent distributions.
const EXPONENT_BIN_WIDTH: f64 = 0.02;
/// Histogram range: exponents land in [0, 1.6); one overflow bin on top.
const EXPONENT_BINS: usize = 80;

/// Sweep parameters.
#[derive(Debug, Clone, Serialize)]
pub struct SurveyConfig {
    /// sweep over primes p ≤ x_limit
    pub x_limit: u64,
    /// roughness threshold
    pub y: u64,
    /// ε in the exponent threshold 1/(4√e) + ε and condition (2)
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub epsilon: f64,
    /// target exception budget (echoed into the report)
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub delta: f64,
    /// thresholds t for the ω(p−1, t) moment tables
    pub t_list: Vec<u64>,
    /// number of contiguous shards for the parallel sweep (1 = serial);
    /// a throughput knob, not part of the semantic config — output is
    /// shard-invariant, so the report does not echo it
    #[serde(skip)]
    pub shards: usize,
}

impl Default for SurveyConfig {
    fn default() -> Self {
        SurveyConfig {
            x_limit: 10_000,
            y: 3,
            epsilon: 0.01,
            delta: 0.1,
            t_list: vec![100],
            shards: 1,
        }
    }
}

impl SurveyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.y < 3 {
            return Err(Error::domain("roughness threshold y must be >= 3"));
        }
        // x_limit < 3 is the legal empty sweep (no odd primes at all);
        // otherwise the range must cover the roughness threshold
        if self.x_limit >= 3 && self.x_limit < self.y {
            return Err(Error::domain("need x_limit >= y"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain("epsilon must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::domain("delta must lie in (0, 1)"));
        }
        if self.shards == 0 {
            return Err(Error::domain("shards must be >= 1"));
        }
        Ok(())
    }
}

/// Everything the sweep records about one odd prime.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeSurveyRecord {
    pub p: u64,
    /// factorization of p−1; every flag below is recomputable from it
    pub p_minus_1_factors: Vec<(u64, u32)>,
    pub rough: bool,
    /// least primitive root (brute-force oracle)
    pub g_p: u64,
    /// the constructed simultaneous non-residue
    pub constructed: u64,
    /// log(∏ g(A_i)^{m_i}) / log p
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub realized_exponent: f64,
    /// construction exponents m_1 … m_s
    pub exponents: Vec<u64>,
    /// condition (1): j(d) ≤ 10ω(d) over all squarefree divisors d | p−1
    pub cond1: bool,
    /// subsets skipped for capacity (0 = the check is complete)
    pub cond1_skipped_subsets: u32,
    /// condition (2) sum Σ loglog q / log q over odd q | p−1
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub cond2_sum: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub level_bound_exp: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub prefix_bound_exp: f64,
    pub bound_used_surrogate: bool,
    /// ω(p−1, t) for each t in the config's t_list
    pub omega_counts: Vec<u32>,
    /// max over squarefree d | p−1 of d/φ(d), attained at rad(p−1)
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub totient_ratio_max: f64,
}

impl PrimeSurveyRecord {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serialization is infallible")
    }
}

/// Exact-count probability: numerator, denominator, and the quotient.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub value: f64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Ratio {
            num,
            den,
            value: if den == 0 { 0.0 } else { num as f64 / den as f64 },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveyCounts {
    pub odd_primes: u64,
    pub rough: u64,
    pub cond1_holds_rough: u64,
    pub cond2_holds_rough: u64,
    pub both_hold_rough: u64,
    pub cond1_failures_rough: u64,
    /// result == g_p (construction exactly matched the least root)
    pub construction_tight: u64,
}

/// Moment table row for ω(p−1, t), integer sums carried exactly.
#[derive(Debug, Clone, Serialize)]
pub struct OmegaMomentRow {
    pub t: u64,
    pub count: u64,
    pub sum: u64,
    pub sum_sq: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub mean: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub variance: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub loglog_t: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoughDensity {
    pub x: u64,
    pub y: u64,
    pub primes: u64,
    pub rough: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub empirical: f64,
    /// ∏_{2<q≤y} (1 − 1/(q−1)), the inclusion–exclusion prediction
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub mertens_prediction: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentHistogram {
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub bin_width: f64,
    /// counts per bin [k·w, (k+1)·w); final bin collects the overflow
    pub realized: Vec<u64>,
    pub g_exponent: Vec<u64>,
}

/// Aggregates over one sweep. Serializable as JSON; [`csv_tables`] renders
/// the per-topic CSV views.
///
/// [`csv_tables`]: SurveyReport::csv_tables
#[derive(Debug, Clone, Serialize)]
pub struct SurveyReport {
    pub config: SurveyConfig,
    pub counts: SurveyCounts,
    pub p_cond1_given_rough: Ratio,
    pub p_cond2_given_rough: Ratio,
    pub p_both_given_rough: Ratio,
    /// exponent threshold 1/(4√e) + ε
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub threshold_exponent: f64,
    /// fraction of odd primes with g(p) ≤ p^threshold
    pub p_g_below_threshold: Ratio,
    /// fraction with the realized construction exponent ≤ threshold
    pub p_realized_below_threshold: Ratio,
    pub p_totient_ratio_holds: Ratio,
    pub omega_moments: Vec<OmegaMomentRow>,
    pub rough_density: RoughDensity,
    pub histograms: ExponentHistogram,
    pub truncated: bool,
}

// ---------------------------------------------------------------------------
// Per-operation statistics (usable without a full sweep)
// ---------------------------------------------------------------------------

/// Condition (1) verdict for one prime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Condition1 {
    /// j(d) ≤ 10ω(d) held for every checked squarefree divisor
    pub holds: bool,
    /// subsets skipped because the Jacobsthal scan hit its budget;
    /// a nonzero count means "unknown", reported conservatively as not-pass
    pub skipped_subsets: u32,
}

/// Checks j(d) ≤ 10·ω(d) over the squarefree divisors d | p−1 (squarefree
/// suffices: j and ω both depend only on rad(d)).
pub fn condition1_check(p_minus_1: &FactoredInteger, cache: &mut JacobsthalCache) -> Condition1 {
    let primes: Vec<u64> = p_minus_1.distinct_primes().collect();
    let omega = primes.len() as u32;
    if omega == 0 {
        return Condition1 {
            holds: true,
            skipped_subsets: 0,
        };
    }
    if omega > CONDITION1_OMEGA_CAP {
        return Condition1 {
            holds: false,
            skipped_subsets: (1u32 << CONDITION1_OMEGA_CAP) - 1,
        };
    }
    let mut holds = true;
    let mut skipped = 0u32;
    let mut subset: Vec<u64> = Vec::with_capacity(primes.len());
    for mask in 1u32..(1 << omega) {
        subset.clear();
        for (i, &q) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                subset.push(q);
            }
        }
        match cache.j_of_primes(&subset) {
            Ok(j) => {
                if j > 10 * subset.len() as u64 {
                    holds = false;
                }
            }
            Err(_) => skipped += 1,
        }
    }
    Condition1 {
        holds: holds && skipped == 0,
        skipped_subsets: skipped,
    }
}

/// Empirical moments and tail of ω(p−1, t) over primes p ≤ x.
#[derive(Debug, Clone, Serialize)]
pub struct OmegaStatistics {
    pub x: u64,
    pub t: u64,
    pub count: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub mean: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub variance: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub loglog_t: f64,
    /// t ≤ x^0.24 — the regime where the second-moment argument is clean;
    /// statistics outside it are still computed, just flagged
    pub regime_ok: bool,
    /// (ξ, empirical P(|ω − loglog t| ≥ ξ·√(loglog t)))
    pub tails: Vec<(f64, Ratio)>,
}

/// Mean / variance / tails of ω(p−1, t) over all primes p ≤ x (p = 2
/// contributes ω(1, t) = 0).
pub fn omega_statistics(x: u64, t: u64, xi_grid: &[f64]) -> Result<OmegaStatistics> {
    if t < 3 {
        return Err(Error::domain("need t >= 3"));
    }
    if x < 3 {
        return Err(Error::domain("need x >= 3"));
    }
    let small: Vec<u64> = arith::sieve_primes(t - 1)?; // primes < t
    let mut count = 0u64;
    let mut sum = 0u64;
    let mut sum_sq = 0u64;
    let mut omegas: Vec<u32> = Vec::new();
    arith::for_each_prime(x, |p| {
        let m = p - 1;
        let om = small.iter().filter(|&&q| m % q == 0).count() as u32;
        count += 1;
        sum += om as u64;
        sum_sq += (om as u64) * (om as u64);
        omegas.push(om);
    });
    let mean = sum as f64 / count as f64;
    let variance = sum_sq as f64 / count as f64 - mean * mean;
    let llt = notation::loglog(t as f64, LogLogMode::Capped);
    let tails = xi_grid
        .iter()
        .map(|&xi| {
            let dev = xi * llt.sqrt();
            let n = omegas
                .iter()
                .filter(|&&om| (om as f64 - llt).abs() >= dev)
                .count() as u64;
            (xi, Ratio::new(n, count))
        })
        .collect();
    Ok(OmegaStatistics {
        x,
        t,
        count,
        mean,
        variance,
        loglog_t: llt,
        regime_ok: (t as f64) <= (x as f64).powf(0.24),
        tails,
    })
}

/// Fraction of primes whose ω(p−1, ·) spikes past the checkpoint scale.
#[derive(Debug, Clone, Serialize)]
pub struct SupOmegaReport {
    pub x: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub a: f64,
    /// checkpoints (j, t_j = e^{e^j}) with a < t_j < x
    pub checkpoints: Vec<(u32, f64)>,
    /// fraction of p ≤ x with ω(p−1, t_j) > j² at some checkpoint t_j < p−1
    pub fraction: Ratio,
    /// (loglog a)^{−2}, the scale the fraction is compared against
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub comparison_scale: f64,
}

/// Checkpoint supremum check: at t_j = e^{e^j} the normalizer (ln ln t_j)²
/// is exactly j².
pub fn sup_omega_check(x: u64, a: f64) -> Result<SupOmegaReport> {
    if a.is_nan() || a < 16.0 {
        return Err(Error::domain("need a >= 16 so that loglog a >= 1"));
    }
    if x < 3 {
        return Err(Error::domain("need x >= 3"));
    }
    let lla = a.ln().ln();
    let j_min = lla.ceil().max(1.0) as u32;
    let mut checkpoints: Vec<(u32, f64)> = Vec::new();
    let mut j = j_min;
    loop {
        let t = (j as f64).exp().exp();
        if t >= x as f64 {
            break;
        }
        if t > a {
            checkpoints.push((j, t));
        }
        j += 1;
    }
    let mut count = 0u64;
    let mut bad = 0u64;
    if checkpoints.is_empty() {
        arith::for_each_prime(x, |_| count += 1);
    } else {
        let largest_t = checkpoints.last().unwrap().1;
        let small: Vec<u64> = arith::sieve_primes(largest_t as u64)?;
        arith::for_each_prime(x, |p| {
            count += 1;
            let m = p - 1;
            for &(j, t) in &checkpoints {
                if t < m as f64 {
                    let om = small
                        .iter()
                        .take_while(|&&q| (q as f64) < t)
                        .filter(|&&q| m % q == 0)
                        .count() as u64;
                    if om > (j as u64) * (j as u64) {
                        bad += 1;
                        break;
                    }
                }
            }
        });
    }
    Ok(SupOmegaReport {
        x,
        a,
        checkpoints,
        fraction: Ratio::new(bad, count),
        comparison_scale: 1.0 / (lla.max(1.0) * lla.max(1.0)),
    })
}

/// Totient-ratio bound check for one prime.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TotientRatio {
    /// max over squarefree d | p−1 of d/φ(d) = ∏_{q | p−1} q/(q−1)
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub max_ratio: f64,
    /// max_ratio ≤ 5
    pub holds: bool,
}

/// The maximum of d/φ(d) over squarefree d | p−1 is attained at rad(p−1).
pub fn totient_ratio_check(p_minus_1: &FactoredInteger) -> TotientRatio {
    let max_ratio: f64 = p_minus_1
        .distinct_primes()
        .map(|q| q as f64 / (q as f64 - 1.0))
        .product();
    TotientRatio {
        max_ratio,
        holds: max_ratio <= 5.0,
    }
}

/// Empirical y-rough density among primes ≤ x versus the Mertens-type
/// product prediction ∏_{2<q≤y} (1 − 1/(q−1)).
pub fn rough_density(x: u64, y: u64) -> Result<RoughDensity> {
    if y > 200 {
        return Err(Error::domain(
            "rough-density prediction is evaluated only for y <= 200",
        ));
    }
    if y < 2 || x < 2 {
        return Err(Error::domain("need x, y >= 2"));
    }
    let odd_small: Vec<u64> = arith::sieve_primes(y.max(3))?
        .into_iter()
        .filter(|&q| q > 2 && q < y) // roughness is strict: factors < y
        .collect();
    let mut primes = 0u64;
    let mut rough = 0u64;
    arith::for_each_prime(x, |p| {
        primes += 1;
        let m = p - 1;
        if odd_small.iter().all(|&q| m % q != 0) {
            rough += 1;
        }
    });
    let mut prediction = 1.0f64;
    arith::for_each_prime(y, |q| {
        if q > 2 {
            // product over 2 < q <= y
            prediction *= 1.0 - 1.0 / (q as f64 - 1.0);
        }
    });
    let empirical = rough as f64 / primes as f64;
    Ok(RoughDensity {
        x,
        y,
        primes,
        rough,
        empirical,
        mertens_prediction: prediction,
        ratio: empirical / prediction,
    })
}

/// Mean and exceedance fractions of Σ_{q | p−1, q > y} loglog q / log q.
#[derive(Debug, Clone, Serialize)]
pub struct TailSumReport {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub mean: f64,
    /// (ε₂, fraction of primes with the sum ≥ ε₂)
    pub exceed: Vec<(f64, Ratio)>,
}

/// Tail sum over large prime divisors of p−1, under the capped loglog
/// convention.
pub fn tail_sum_check(x: u64, y: u64, eps2_grid: &[f64]) -> Result<TailSumReport> {
    if x < 3 {
        return Err(Error::domain("need x >= 3"));
    }
    let mut count = 0u64;
    let mut total = 0.0f64;
    let mut exceed_counts = vec![0u64; eps2_grid.len()];
    let mut err: Option<Error> = None;
    arith::for_each_prime(x, |p| {
        if err.is_some() {
            return;
        }
        match arith::factorize(p - 1) {
            Ok(f) => {
                let s: f64 = f
                    .distinct_primes()
                    .filter(|&q| q > y)
                    .map(|q| notation::loglog(q as f64, LogLogMode::Capped) / (q as f64).ln())
                    .sum();
                count += 1;
                total += s;
                for (i, &e2) in eps2_grid.iter().enumerate() {
                    if s >= e2 {
                        exceed_counts[i] += 1;
                    }
                }
            }
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(TailSumReport {
        x,
        y,
        count,
        mean: total / count as f64,
        exceed: eps2_grid
            .iter()
            .copied()
            .zip(exceed_counts.into_iter().map(|n| Ratio::new(n, count)))
            .collect(),
    })
}

// ---------------------------------------------------------------------------
// The sweep
// ---------------------------------------------------------------------------

/// Builds the record for one odd prime. `table` is shared read-only;
/// `cache` is worker-local.
pub fn record_for_prime(
    p: u64,
    config: &SurveyConfig,
    table: &DickmanTable,
    cache: &mut JacobsthalCache,
) -> Result<PrimeSurveyRecord> {
    let pm1 = arith::factorize(p - 1)?;
    let rough = arith::is_y_rough(&pm1, config.y as f64);
    let g_p = constructor::least_primitive_root(p)?;
    let trace = construct_simultaneous_nonresidue(p, table, config.epsilon, cache)?;
    let cond1 = condition1_check(&pm1, cache);
    let cond2_sum = constructor::condition2_sum(&pm1, LogLogMode::Capped);
    let omega_counts = config
        .t_list
        .iter()
        .map(|&t| arith::omega_up_to(&pm1, t as f64))
        .collect();
    let totient = totient_ratio_check(&pm1);
    Ok(PrimeSurveyRecord {
        p,
        p_minus_1_factors: pm1.factors().to_vec(),
        rough,
        g_p,
        constructed: trace.result,
        realized_exponent: trace.realized_exponent,
        exponents: trace.exponents,
        cond1: cond1.holds,
        cond1_skipped_subsets: cond1.skipped_subsets,
        cond2_sum,
        level_bound_exp: trace.bounds.levels,
        prefix_bound_exp: trace.bounds.prefix,
        bound_used_surrogate: trace.bounds.levels_used_surrogate,
        omega_counts,
        totient_ratio_max: totient.max_ratio,
    })
}

/// Generates records for every odd prime ≤ x, sharded and merged in prime
/// order — the result is independent of the shard count.
pub fn generate_records(
    config: &SurveyConfig,
    table: &DickmanTable,
) -> Result<Vec<PrimeSurveyRecord>> {
    config.validate()?;
    let primes: Vec<u64> = arith::sieve_primes(config.x_limit.max(2))?
        .into_iter()
        .filter(|&p| p > 2)
        .collect();
    if primes.is_empty() {
        return Ok(Vec::new());
    }
    let shards = config.shards.min(primes.len()).max(1);
    if shards == 1 {
        let mut cache = JacobsthalCache::new();
        return primes
            .iter()
            .map(|&p| record_for_prime(p, config, table, &mut cache))
            .collect();
    }
    let chunk = primes.len().div_ceil(shards);
    let results: Vec<Result<Vec<PrimeSurveyRecord>>> = primes
        .par_chunks(chunk)
        .map(|ps| {
            let mut cache = JacobsthalCache::new();
            ps.iter()
                .map(|&p| record_for_prime(p, config, table, &mut cache))
                .collect()
        })
        .collect();
    let mut merged = Vec::with_capacity(primes.len());
    for r in results {
        merged.extend(r?);
    }
    Ok(merged)
}

/// The serial aggregation pass. Deterministic given the records; reruns of
/// merged shard output reproduce a serial run bit for bit.
pub fn aggregate_records(records: &[PrimeSurveyRecord], config: &SurveyConfig) -> SurveyReport {
    let odd_primes = records.len() as u64;
    let mut rough = 0u64;
    let mut cond1_rough = 0u64;
    let mut cond2_rough = 0u64;
    let mut both_rough = 0u64;
    let mut tight = 0u64;
    let mut g_below = 0u64;
    let mut realized_below = 0u64;
    let mut totient_holds = 0u64;
    let threshold = notation::quarter_inv_sqrt_e() + config.epsilon;
    let cond2_threshold = config.epsilon / 20.0;

    let mut omega_sums = vec![(0u64, 0u64); config.t_list.len()];
    let mut hist_realized = vec![0u64; EXPONENT_BINS + 1];
    let mut hist_g = vec![0u64; EXPONENT_BINS + 1];

    for r in records {
        let cond2 = r.cond2_sum <= cond2_threshold;
        if r.rough {
            rough += 1;
            if r.cond1 {
                cond1_rough += 1;
            }
            if cond2 {
                cond2_rough += 1;
            }
            if r.cond1 && cond2 {
                both_rough += 1;
            }
        }
        if r.constructed == r.g_p {
            tight += 1;
        }
        let ln_p = (r.p as f64).ln();
        let g_exp = (r.g_p as f64).ln() / ln_p;
        if g_exp <= threshold {
            g_below += 1;
        }
        if r.realized_exponent <= threshold {
            realized_below += 1;
        }
        if r.totient_ratio_max <= 5.0 {
            totient_holds += 1;
        }
        for (sums, &om) in omega_sums.iter_mut().zip(&r.omega_counts) {
            sums.0 += om as u64;
            sums.1 += (om as u64) * (om as u64);
        }
        let bin = |e: f64| ((e / EXPONENT_BIN_WIDTH) as usize).min(EXPONENT_BINS);
        hist_realized[bin(r.realized_exponent)] += 1;
        hist_g[bin(g_exp)] += 1;
    }

    let omega_moments = config
        .t_list
        .iter()
        .zip(&omega_sums)
        .map(|(&t, &(sum, sum_sq))| {
            let mean = if odd_primes == 0 {
                0.0
            } else {
                sum as f64 / odd_primes as f64
            };
            let variance = if odd_primes == 0 {
                0.0
            } else {
                sum_sq as f64 / odd_primes as f64 - mean * mean
            };
            OmegaMomentRow {
                t,
                count: odd_primes,
                sum,
                sum_sq,
                mean,
                variance,
                loglog_t: notation::loglog(t as f64, LogLogMode::Capped),
            }
        })
        .collect();

    let mut prediction = 1.0f64;
    arith::for_each_prime(config.y, |q| {
        if q > 2 {
            prediction *= 1.0 - 1.0 / (q as f64 - 1.0);
        }
    });
    let empirical = if odd_primes == 0 {
        0.0
    } else {
        rough as f64 / odd_primes as f64
    };

    SurveyReport {
        config: config.clone(),
        counts: SurveyCounts {
            odd_primes,
            rough,
            cond1_holds_rough: cond1_rough,
            cond2_holds_rough: cond2_rough,
            both_hold_rough: both_rough,
            cond1_failures_rough: rough - cond1_rough,
            construction_tight: tight,
        },
        p_cond1_given_rough: Ratio::new(cond1_rough, rough),
        p_cond2_given_rough: Ratio::new(cond2_rough, rough),
        p_both_given_rough: Ratio::new(both_rough, rough),
        threshold_exponent: threshold,
        p_g_below_threshold: Ratio::new(g_below, odd_primes),
        p_realized_below_threshold: Ratio::new(realized_below, odd_primes),
        p_totient_ratio_holds: Ratio::new(totient_holds, odd_primes),
        omega_moments,
        rough_density: RoughDensity {
            x: config.x_limit,
            y: config.y,
            primes: odd_primes,
            rough,
            empirical,
            mertens_prediction: prediction,
            ratio: empirical / prediction,
        },
        histograms: ExponentHistogram {
            bin_width: EXPONENT_BIN_WIDTH,
            realized: hist_realized,
            g_exponent: hist_g,
        },
        truncated: false,
    }
}

/// Records plus report.
#[derive(Debug)]
pub struct SurveyOutput {
    pub records: Vec<PrimeSurveyRecord>,
    pub report: SurveyReport,
}

/// The full sweep: generate (sharded), merge, aggregate (serial).
pub fn run_survey(config: &SurveyConfig, table: &DickmanTable) -> Result<SurveyOutput> {
    let records = generate_records(config, table)?;
    let report = aggregate_records(&records, config);
    Ok(SurveyOutput { records, report })
}

/// Streams records as JSON lines. On write failure a truncation marker is
/// attempted and the error propagates (callers map it to the partial-output
/// exit path).
pub fn write_records_jsonl(records: &[PrimeSurveyRecord], w: &mut impl Write) -> Result<()> {
    for r in records {
        if let Err(e) = writeln!(w, "{}", r.to_json_line()) {
            let _ = writeln!(w, "{{\"truncated\":true}}");
            return Err(e.into());
        }
    }
    Ok(())
}

impl SurveyReport {
    /// Per-topic CSV tables: (file stem, contents).
    pub fn csv_tables(&self) -> Vec<(String, String)> {
        let f = jsonfmt::fmt_sig12;
        let mut conditions = String::from("name,num,den,value\n");
        for (name, r) in [
            ("cond1_given_rough", &self.p_cond1_given_rough),
            ("cond2_given_rough", &self.p_cond2_given_rough),
            ("both_given_rough", &self.p_both_given_rough),
            ("g_below_threshold", &self.p_g_below_threshold),
            ("realized_below_threshold", &self.p_realized_below_threshold),
            ("totient_ratio_holds", &self.p_totient_ratio_holds),
        ] {
            conditions.push_str(&format!("{name},{},{},{}\n", r.num, r.den, f(r.value)));
        }

        let mut omega = String::from("t,count,sum,sum_sq,mean,variance,loglog_t\n");
        for row in &self.omega_moments {
            omega.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.t,
                row.count,
                row.sum,
                row.sum_sq,
                f(row.mean),
                f(row.variance),
                f(row.loglog_t)
            ));
        }

        let d = &self.rough_density;
        let mut density = String::from("x,y,primes,rough,empirical,prediction,ratio\n");
        density.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            d.x,
            d.y,
            d.primes,
            d.rough,
            f(d.empirical),
            f(d.mertens_prediction),
            f(d.ratio)
        ));

        let h = &self.histograms;
        let mut hist = String::from("bin_lo,bin_hi,realized_count,g_count\n");
        for (i, (r, g)) in h.realized.iter().zip(&h.g_exponent).enumerate() {
            let lo = i as f64 * h.bin_width;
            let hi = if i == h.realized.len() - 1 {
                f64::INFINITY
            } else {
                (i + 1) as f64 * h.bin_width
            };
            let hi = if hi.is_finite() {
                f(hi)
            } else {
                "inf".to_string()
            };
            hist.push_str(&format!("{},{},{r},{g}\n", f(lo), hi));
        }

        vec![
            ("conditions".into(), conditions),
            ("omega_moments".into(), omega),
            ("rough_density".into(), density),
            ("exponent_histograms".into(), hist),
        ]
    }
}
