//! Explicit construction of a simultaneous power non-residue.
//!
//! For an odd prime p with prime divisors q of p−1, group the q by the value
//! of their least power non-residue: levels A_1, …, A_s with strictly
//! increasing common values g(A_1) < … < g(A_s). Two facts drive the
//! construction:
//!
//! * anything smaller than g(A_i) is a q-th power residue for every q ∈ A_i —
//!   in particular every g(A_j) with j < i;
//! * if y is a non-residue exactly for the primes of A and z for those of B,
//!   then y^m·z is a non-residue for all of A ∪ B for any m avoiding one
//!   forbidden class per q ∈ A, and such an m exists below the Jacobsthal
//!   bound j(P(A)).
//!
//! Walking levels from s down to 1 therefore produces y = ∏ g(A_i)^{m_i},
//! a q-th power non-residue for every q | p−1 — a primitive root — whose
//! size is controlled by the exponent bounds evaluated alongside.

use serde::Serialize;

use crate::arith::{self, FactoredInteger};
use crate::dickman::DickmanTable;
use crate::notation::{self, LogLogMode};
pub use crate::residues::residue_profile;
use crate::residues::{least_power_nonresidue, ResidueProfile};
use crate::structure::{DlogContext, JacobsthalCache};
use crate::{Error, Result};

/// One grouping level: the primes q | p−1 sharing a least non-residue value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    /// common least power non-residue g(A_i)
    pub g: u64,
    /// the primes of the level, ascending
    pub primes: Vec<u64>,
}

/// The level decomposition of the prime divisors of p−1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grouping {
    pub p: u64,
    pub levels: Vec<Level>,
    /// g(A_1) < g(A_2) < … — strictly increasing by construction
    pub g_values: Vec<u64>,
    /// d_i = ∏ of the primes in A_i ∪ … ∪ A_s; d_1 = rad(p−1)
    pub divisors: Vec<u64>,
}

impl Grouping {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }
}

/// Outcome of one lifting step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftOutcome {
    /// chosen exponent; 0 means z alone already avoided every class
    pub m: u64,
    /// y^m · z mod p
    pub product: u64,
    /// forbidden classes (q, a_q) with a_q ≡ −log z / log y (mod q)
    pub forbidden: Vec<(u64, u64)>,
    /// no m in [1, j(P(A))−1] was admissible and m = 0 was used instead
    pub used_zero_fallback: bool,
}

/// Exponent bounds attached to a construction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundExponents {
    /// level bound: 1/(4√e) + Σ_{i<s} j(P(A_i))/u(d_i) + ε
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub levels: f64,
    /// prefix-product bound: 1/(4√e) + Σ_{j=2}^{r} 10/u(b_j) + ε
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub prefix: f64,
    /// a Jacobsthal value exceeded the scan budget and 10·|A_i| stood in
    pub levels_used_surrogate: bool,
}

/// Full trace of one construction.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionTrace {
    pub p: u64,
    pub grouping: Grouping,
    /// m_1 … m_s (m_s = 1 always)
    pub exponents: Vec<u64>,
    /// partial products z_s, z_{s−1}, …, z_1 (mod p)
    pub partial_products: Vec<u64>,
    /// z_1: a q-th power non-residue for every q | p−1
    pub result: u64,
    /// log of the non-reduced integer product, over log p
    /// (log-space bookkeeping: Σ m_i·ln g(A_i) / ln p)
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub realized_exponent: f64,
    pub bounds: BoundExponents,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub epsilon: f64,
    /// per-step details, outermost (t = s−1) first
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub lifts: Vec<LiftOutcome>,
}

/// Merge profile entries with equal least non-residue into levels and
/// compute the tail divisors d_i.
pub fn group_levels(profile: &ResidueProfile) -> Grouping {
    let mut levels: Vec<Level> = Vec::new();
    for e in &profile.entries {
        match levels.last_mut() {
            Some(l) if l.g == e.g => l.primes.push(e.q),
            _ => levels.push(Level {
                g: e.g,
                primes: vec![e.q],
            }),
        }
    }
    for l in &mut levels {
        l.primes.sort_unstable();
    }
    let g_values: Vec<u64> = levels.iter().map(|l| l.g).collect();
    // d_i = product of primes at levels i..s
    let mut divisors = vec![0u64; levels.len()];
    let mut acc: u64 = 1;
    for (i, l) in levels.iter().enumerate().rev() {
        acc *= l.primes.iter().product::<u64>();
        divisors[i] = acc;
    }
    Grouping {
        p: profile.p,
        levels,
        g_values,
        divisors,
    }
}

/// Self-check on the level ordering: for i > j and q ∈ A_i, g(A_j) must
/// be a q-th power residue (its discrete log is ≡ 0 mod q) — it is smaller
/// than g(A_i), the least q-th power non-residue.
pub fn verify_level_ordering(grouping: &Grouping, ctx: &DlogContext) -> Result<bool> {
    for (i, upper) in grouping.levels.iter().enumerate() {
        for lower in &grouping.levels[..i] {
            let ind = ctx.discrete_log(lower.g)?;
            for &q in &upper.primes {
                if ind % q != 0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One lifting step.
///
/// Preconditions (verified by direct residue tests, violations reported as
/// contract errors naming the failing q): y is a q-th power non-residue for
/// q ∈ A and a residue for q ∈ B; z is a non-residue for q ∈ B.
///
/// Picks the smallest admissible m ≥ 1 (m ≢ −log z/log y mod q for all
/// q ∈ A). If `j_of_a` is known and no m in [1, j(P(A))−1] is admissible,
/// m = 0 is used instead — z alone is then already a non-residue for A —
/// and the outcome is flagged.
pub fn lift_step(
    y: u64,
    z: u64,
    a_level: &[u64],
    b_union: &[u64],
    ctx: &DlogContext,
    j_of_a: Option<u64>,
) -> Result<LiftOutcome> {
    if a_level.is_empty() {
        return Err(Error::domain("lift step requires a nonempty level A"));
    }
    let p = ctx.p();
    let n = p - 1;
    for &q in a_level {
        if arith::mod_pow(y, n / q, p) == 1 {
            return Err(Error::contract(format!(
                "precondition: y = {y} is a {q}-th power residue mod {p}"
            )));
        }
    }
    for &q in b_union {
        if arith::mod_pow(y, n / q, p) != 1 {
            return Err(Error::contract(format!(
                "precondition: y = {y} is a {q}-th power non-residue mod {p}"
            )));
        }
        if arith::mod_pow(z, n / q, p) == 1 {
            return Err(Error::contract(format!(
                "precondition: z = {z} is a {q}-th power residue mod {p}"
            )));
        }
    }

    let log_y = ctx.discrete_log(y)?;
    let log_z = ctx.discrete_log(z)?;
    let mut forbidden = Vec::with_capacity(a_level.len());
    for &q in a_level {
        let ly = log_y % q;
        debug_assert_ne!(ly, 0, "log y must be a unit mod q");
        let lz = log_z % q;
        // a_q solves a·log y + log z ≡ 0 (mod q)
        let a_q = (q - (lz as u128 * mod_inverse_prime(ly, q) as u128 % q as u128) as u64) % q;
        forbidden.push((q, a_q));
    }

    let admissible = |m: u64| forbidden.iter().all(|&(q, a)| m % q != a);
    let mut m = None;
    let scan_end = j_of_a.map(|j| j.saturating_sub(1));
    let mut cand = 1u64;
    loop {
        if let Some(end) = scan_end {
            if cand > end {
                break;
            }
        }
        if admissible(cand) {
            m = Some(cand);
            break;
        }
        cand += 1;
        if cand > 1_000_000 {
            return Err(Error::contract(
                "no admissible exponent within 10^6; forbidden classes inconsistent",
            ));
        }
    }
    let (m, used_zero_fallback) = match m {
        Some(m) => (m, false),
        // every m in [1, j-1] was forbidden; the avoidance argument covers
        // [0, j-1], and 0 admissible means z alone already avoids A's classes
        None if admissible(0) => (0, true),
        None => {
            return Err(Error::contract(format!(
                "no admissible exponent in [0, j-1] for level {a_level:?} mod {p}"
            )))
        }
    };

    let product = (arith::mod_pow(y, m, p) as u128 * z as u128 % p as u128) as u64;
    for &q in a_level.iter().chain(b_union) {
        if arith::mod_pow(product, n / q, p) == 1 {
            return Err(Error::contract(format!(
                "postcondition: product {product} is a {q}-th power residue mod {p}"
            )));
        }
    }
    Ok(LiftOutcome {
        m,
        product,
        forbidden,
        used_zero_fallback,
    })
}

fn mod_inverse_prime(a: u64, q: u64) -> u64 {
    // q prime, a in (0, q)
    arith::mod_pow(a, q - 2, q)
}

/// Brute-force least primitive root; the independent oracle the construction
/// is measured against.
pub fn least_primitive_root(p: u64) -> Result<u64> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    let pm1 = arith::factorize(p - 1)?;
    (2..p)
        .find(|&a| arith::is_primitive_root(a, p, &pm1))
        .ok_or_else(|| Error::contract(format!("no primitive root below {p}")))
}

/// The full construction for an odd prime p.
///
/// Runs the level recursion from t = s down to 1 (m_s = 1), re-verifies each
/// intermediate product by direct residue tests, checks that the common
/// level value equals the least d_i-th power non-residue, and evaluates both
/// exponent bounds at the supplied ε.
pub fn construct_simultaneous_nonresidue(
    p: u64,
    table: &DickmanTable,
    epsilon: f64,
    cache: &mut JacobsthalCache,
) -> Result<ConstructionTrace> {
    let profile = residue_profile(p)?;
    let grouping = group_levels(&profile);
    let ctx = DlogContext::new(p)?;

    // the common level value is also the least d_i-th power non-residue
    for (level, &d_i) in grouping.levels.iter().zip(&grouping.divisors) {
        let g_di = least_power_nonresidue(p, d_i)?;
        if g_di != level.g {
            return Err(Error::contract(format!(
                "level value {} differs from g(d_i) = {g_di} at p = {p}, d_i = {d_i}",
                level.g
            )));
        }
    }
    if !verify_level_ordering(&grouping, &ctx)? {
        return Err(Error::contract(format!(
            "ordering self-check failed at p = {p}: a smaller level value is \
             not a residue at a later level"
        )));
    }

    let s = grouping.level_count();
    let mut exponents = vec![0u64; s];
    exponents[s - 1] = 1;
    let mut z = grouping.levels[s - 1].g % p;
    let mut partial_products = vec![z];
    let mut lifts = Vec::new();
    let mut b_union: Vec<u64> = grouping.levels[s - 1].primes.clone();

    for t in (0..s - 1).rev() {
        let level = &grouping.levels[t];
        let j = match cache.j_of_primes(&level.primes) {
            Ok(j) => Some(j),
            Err(Error::Capacity(_)) => None,
            Err(e) => return Err(e),
        };
        let lift = lift_step(level.g, z, &level.primes, &b_union, &ctx, j)?;
        exponents[t] = lift.m;
        z = lift.product;
        partial_products.push(z);
        b_union.extend_from_slice(&level.primes);
        lifts.push(lift);
    }

    // final verification against every prime divisor, independent of the
    // discrete-log path that chose the exponents
    let n = p - 1;
    for q in ctx.p_minus_1().distinct_primes() {
        if arith::mod_pow(z, n / q, p) == 1 {
            return Err(Error::contract(format!(
                "construction failed: {z} is a {q}-th power residue mod {p} \
                 (exponents {exponents:?})"
            )));
        }
    }

    let ln_p = (p as f64).ln();
    let realized_exponent = grouping
        .levels
        .iter()
        .zip(&exponents)
        .map(|(l, &m)| m as f64 * (l.g as f64).ln())
        .sum::<f64>()
        / ln_p;

    let bounds = bound_exponents(&grouping, epsilon, table, cache)?;

    Ok(ConstructionTrace {
        p,
        grouping,
        exponents,
        partial_products,
        result: z,
        realized_exponent,
        bounds,
        epsilon,
        lifts,
    })
}

fn bound_exponents(
    grouping: &Grouping,
    epsilon: f64,
    table: &DickmanTable,
    cache: &mut JacobsthalCache,
) -> Result<BoundExponents> {
    let base = notation::quarter_inv_sqrt_e();
    let s = grouping.level_count();

    let mut level_bound = base + epsilon;
    let mut used_surrogate = false;
    for (level, &d_i) in grouping.levels.iter().zip(&grouping.divisors).take(s - 1) {
        let j = match cache.j_of_primes(&level.primes) {
            Ok(j) => j as f64,
            Err(Error::Capacity(_)) => {
                used_surrogate = true;
                10.0 * level.primes.len() as f64
            }
            Err(e) => return Err(e),
        };
        level_bound += j / table.u_of(d_i as f64)?;
    }

    // b_j: prefix products of the ascending prime divisors of p-1
    let mut primes: Vec<u64> = grouping
        .levels
        .iter()
        .flat_map(|l| l.primes.iter().copied())
        .collect();
    primes.sort_unstable();
    let mut prefix_bound = base + epsilon;
    let mut b = primes[0];
    for &q in &primes[1..] {
        b *= q;
        prefix_bound += 10.0 / table.u_of(b as f64)?;
    }

    Ok(BoundExponents {
        levels: level_bound,
        prefix: prefix_bound,
        levels_used_surrogate: used_surrogate,
    })
}

/// Exponent bound built from the level Jacobsthal values:
/// 1/(4√e) + Σ_{i=1}^{s−1} j(P(A_i))/u(d_i) + ε.
pub fn bound_exponent_levels(
    p: u64,
    epsilon: f64,
    table: &DickmanTable,
    cache: &mut JacobsthalCache,
) -> Result<BoundExponents> {
    let grouping = group_levels(&residue_profile(p)?);
    bound_exponents(&grouping, epsilon, table, cache)
}

/// Exponent bound from the prefix products b_j of the prime divisors:
/// 1/(4√e) + Σ_{j=2}^{r} 10/u(b_j) + ε.
pub fn bound_exponent_prefix(p: u64, epsilon: f64, table: &DickmanTable) -> Result<f64> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    let pm1 = arith::factorize(p - 1)?;
    let primes: Vec<u64> = pm1.distinct_primes().collect();
    let mut acc = notation::quarter_inv_sqrt_e() + epsilon;
    let mut b = primes[0];
    for &q in &primes[1..] {
        b *= q;
        acc += 10.0 / table.u_of(b as f64)?;
    }
    Ok(acc)
}

/// Σ over odd primes q | p−1 of loglog(q)/log(q), under the chosen loglog
/// convention (the capped max{1, ln ln q} by default).
pub fn condition2_sum(p_minus_1: &FactoredInteger, mode: LogLogMode) -> f64 {
    p_minus_1
        .distinct_primes()
        .filter(|&q| q != 2)
        .map(|q| notation::loglog(q as f64, mode) / (q as f64).ln())
        .sum()
}
