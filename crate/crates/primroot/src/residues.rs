//! Power-residue testing, least non-residue search, smooth-number counting,
//! and character partial-sum diagnostics.
//!
//! For d | p−1, the d-th power residues mod p form the index-d subgroup of
//! (ℤ/pℤ)*, and n is one iff n^((p−1)/d) ≡ 1 (mod p). **g**(d) denotes the
//! least d-th power non-residue.
//!
//! Ψ(x, y) counts the y-smooth integers in [1, x] under the *strict*
//! convention: n is y-smooth iff every prime p | n satisfies p < y. (Much of
//! the literature uses p ≤ y; everything here is strict.)

use serde::Serialize;

use crate::arith;
use crate::dickman::DickmanTable;
use crate::structure::DlogTable;
use crate::{Error, Result};

/// Desk cap for exact smooth counting.
pub const DEFAULT_PSI_LIMIT: u64 = 100_000_000;

/// Work cap for character sums: d−1 characters times H terms.
pub const CHAR_SUM_WORK_LIMIT: u64 = 1_000_000_000;

/// For a prime p, the least q-th power non-residue for each prime q | p−1,
/// sorted by the non-residue value, then by q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueProfile {
    pub p: u64,
    /// (q, g(q)) pairs ordered by g ascending, ties by q ascending
    pub entries: Vec<ProfileEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileEntry {
    pub q: u64,
    pub g: u64,
}

/// Whether n is a d-th power residue mod p, via the Euler-type criterion
/// n^((p−1)/d) ≡ 1. Requires d | p−1.
pub fn is_dth_power_residue(n: u64, p: u64, d: u64) -> Result<bool> {
    if p < 2 || !arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if d == 0 || (p - 1) % d != 0 {
        return Err(Error::domain(format!("{d} does not divide p-1 = {}", p - 1)));
    }
    let n = n % p;
    if n == 0 {
        return Err(Error::domain("0 is neither residue nor non-residue"));
    }
    Ok(arith::mod_pow(n, (p - 1) / d, p) == 1)
}

/// **g**(d): the smallest n ≥ 2 that is a d-th power non-residue mod p.
/// Linear scan from 2; g(d) is provably small. Requires d ≥ 2, d | p−1.
pub fn least_power_nonresidue(p: u64, d: u64) -> Result<u64> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    if d < 2 {
        return Err(Error::domain("every n is a 1-st power residue"));
    }
    if (p - 1) % d != 0 {
        return Err(Error::domain(format!("{d} does not divide p-1 = {}", p - 1)));
    }
    let e = (p - 1) / d;
    (2..p)
        .find(|&n| arith::mod_pow(n, e, p) != 1)
        .ok_or_else(|| Error::contract(format!("no {d}-th power non-residue below {p}")))
}

/// Exact Ψ(x, y): the number of n ≤ x all of whose prime factors are < y.
///
/// Enumerates the smooth numbers as products over primes < y (largest prime
/// first keeps the recursion tree small); cost is proportional to the count.
pub fn psi_count(x: u64, y: f64) -> Result<u64> {
    psi_count_with_limit(x, y, DEFAULT_PSI_LIMIT)
}

pub fn psi_count_with_limit(x: u64, y: f64, limit: u64) -> Result<u64> {
    if x < 1 {
        return Err(Error::domain("psi requires x >= 1"));
    }
    if y.is_nan() || y < 2.0 {
        return Err(Error::domain("psi requires y >= 2"));
    }
    if x > limit {
        return Err(Error::capacity(format!(
            "x = {x} exceeds the exact-count budget {limit}"
        )));
    }
    let below = y.min((x + 1) as f64).ceil() as u64;
    let mut primes: Vec<u64> = Vec::new();
    arith::for_each_prime(below.max(2), |p| {
        if (p as f64) < y {
            primes.push(p);
        }
    });
    primes.reverse(); // largest first
    // Counts each smooth number once via its largest prime factor: the
    // count for a limit is 1 (for n = 1) plus, for every prime p and e >= 1
    // with p^e <= limit, the count of smaller-prime smooth m <= limit/p^e.
    // Recursion only descends on positive exponents, so the depth is at
    // most log2(x) regardless of how many primes lie below y.
    fn rec(primes: &[u64], limit: u64) -> u64 {
        // skip straight past the primes above the limit (descending order)
        let start = primes.partition_point(|&p| p > limit);
        let mut acc = 1;
        for (i, &p) in primes.iter().enumerate().skip(start) {
            let mut l = limit / p;
            loop {
                acc += rec(&primes[i + 1..], l);
                if l < p {
                    break;
                }
                l /= p;
            }
        }
        acc
    }
    Ok(rec(&primes, x))
}

/// Both sides of the smooth-count lower bound Ψ(x, y) ≥ x·ρ(u), u = ln x/ln y.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsiBound {
    pub x: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub y: f64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub u: f64,
    pub psi: u64,
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub x_rho_u: f64,
    pub holds: bool,
}

/// Evaluates Ψ(x, y) against x·ρ(log x / log y). Informational: the bound is
/// only guaranteed for u or y large.
pub fn check_psi_lower_bound(x: u64, y: f64, table: &DickmanTable) -> Result<PsiBound> {
    let psi = psi_count(x, y)?;
    let u = (x as f64).ln() / y.ln();
    let rho = table.rho(u)?;
    let x_rho_u = x as f64 * rho;
    Ok(PsiBound {
        x,
        y,
        u,
        psi,
        x_rho_u,
        holds: psi as f64 >= x_rho_u,
    })
}

/// Maximum normalized character partial sum over the non-principal
/// characters χ with χ^d = χ₀.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CharSumDiagnostic {
    pub p: u64,
    pub d: u64,
    pub h: u64,
    /// max over k = 1..d−1 of |Σ_{n≤H} e(k·ind(n)/d)| / H
    #[serde(serialize_with = "crate::jsonfmt::ser_f64_12")]
    pub max_normalized_sum: f64,
    /// the k attaining the maximum
    pub argmax_k: u64,
}

/// Cancellation diagnostic for the characters of order dividing d.
///
/// Characters are realized through one fixed discrete-log table:
/// χ_k(n) = e^{2πi·k·ind(n)/d}. Sums are accumulated as complex pairs with
/// Kahan compensation — the quantity is cancellation-sensitive.
pub fn character_partial_sum_diagnostic(p: u64, d: u64, h: u64) -> Result<CharSumDiagnostic> {
    if d < 2 {
        return Err(Error::domain("need d >= 2 for a non-principal character"));
    }
    if p < 3 || (p - 1) % d != 0 {
        return Err(Error::domain(format!("{d} does not divide p-1")));
    }
    if h == 0 || h >= p {
        return Err(Error::domain("need 1 <= H < p"));
    }
    if (d - 1).saturating_mul(h) > CHAR_SUM_WORK_LIMIT {
        return Err(Error::capacity(format!(
            "(d-1)*H = {} exceeds the work budget {CHAR_SUM_WORK_LIMIT}",
            (d - 1) as u128 * h as u128
        )));
    }
    let table = DlogTable::build(p)?; // capacity error for p > 10^6
    let mut best = 0.0f64;
    let mut best_k = 1u64;
    for k in 1..d {
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for n in 1..=h {
            let ind = table.index(n).expect("n in [1, p) is a unit");
            // reduce k*ind mod d in integers first: the phase stays in [0, 2π)
            let r = ((k as u128 * ind as u128) % d as u128) as u64;
            let phase = std::f64::consts::TAU * (r as f64 / d as f64);
            re.add(phase.cos());
            im.add(phase.sin());
        }
        let norm = (re.sum.powi(2) + im.sum.powi(2)).sqrt() / h as f64;
        if norm > best {
            best = norm;
            best_k = k;
        }
    }
    Ok(CharSumDiagnostic {
        p,
        d,
        h,
        max_normalized_sum: best,
        argmax_k: best_k,
    })
}

#[derive(Debug, Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Least power non-residues for every prime q | p−1 (the per-prime data the
/// grouping construction consumes). Exposed here; the constructor re-exports.
pub fn residue_profile(p: u64) -> Result<ResidueProfile> {
    if p == 2 {
        return Err(Error::domain("the multiplicative group mod 2 is trivial"));
    }
    if !arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let pm1 = arith::factorize(p - 1)?;
    let mut entries: Vec<ProfileEntry> = pm1
        .distinct_primes()
        .map(|q| {
            least_power_nonresidue(p, q).map(|g| ProfileEntry { q, g })
        })
        .collect::<Result<_>>()?;
    entries.sort_by_key(|e| (e.g, e.q));
    Ok(ResidueProfile { p, entries })
}

/// Re-usable helper: the factorization-aware residue count invariant
/// #\{n ∈ [1, p−1] : n is a d-th power residue\} = (p−1)/d.
pub fn count_dth_power_residues(p: u64, d: u64) -> Result<u64> {
    if (p - 1) % d != 0 {
        return Err(Error::domain("d must divide p-1"));
    }
    let e = (p - 1) / d;
    Ok((1..p).filter(|&n| arith::mod_pow(n, e, p) == 1).count() as u64)
}

#[cfg(test)]
mod tests {
    // frozen oracle constants carry their full decimal expansions
    #![allow(clippy::excessive_precision)]

    use super::*;
    use crate::arith::sieve_primes;

    #[test]
    fn residue_test_examples() {
        assert!(is_dth_power_residue(1, 7, 3).unwrap());
        assert!(!is_dth_power_residue(2, 7, 3).unwrap()); // cubes mod 7 = {1, 6}
        assert!(is_dth_power_residue(2, 41, 2).unwrap()); // 2^20 ≡ 1 mod 41
        assert!(is_dth_power_residue(6, 7, 3).unwrap());
        assert!(matches!(is_dth_power_residue(2, 7, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn residue_sets_by_enumeration() {
        // direct enumeration oracle: n is a d-th residue iff n = x^d for some x
        for p in [7u64, 13, 41, 103] {
            for d in crate::arith::factorize(p - 1).unwrap().distinct_primes() {
                let mut set = vec![false; p as usize];
                for x in 1..p {
                    set[arith::mod_pow(x, d, p) as usize] = true;
                }
                for n in 1..p {
                    assert_eq!(
                        is_dth_power_residue(n, p, d).unwrap(),
                        set[n as usize],
                        "p={p} d={d} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn least_nonresidue_examples() {
        assert_eq!(least_power_nonresidue(7, 2).unwrap(), 3); // QRs mod 7: {1,2,4}
        assert_eq!(least_power_nonresidue(7, 3).unwrap(), 2); // cubes mod 7: {1,6}
        assert_eq!(least_power_nonresidue(41, 5).unwrap(), 2);
        assert_eq!(least_power_nonresidue(41, 2).unwrap(), 3);
        assert_eq!(least_power_nonresidue(13, 2).unwrap(), 2);
        assert!(least_power_nonresidue(7, 1).is_err());
        assert!(least_power_nonresidue(2, 2).is_err());
    }

    #[test]
    fn residue_count_is_pm1_over_d() {
        // exhaustive for p <= 500 here; the full p <= 2000 sweep is an
        // acceptance criterion.
        for p in sieve_primes(500).unwrap().into_iter().skip(1) {
            let divs: Vec<u64> = (1..=p - 1).filter(|d| (p - 1) % d == 0).collect();
            for d in divs {
                assert_eq!(
                    count_dth_power_residues(p, d).unwrap(),
                    (p - 1) / d,
                    "p={p} d={d}"
                );
            }
        }
    }

    #[test]
    fn nonresidue_monotone_under_divisibility() {
        // d | d' ⟹ every d'-th residue is a d-th residue ⟹ g(d') <= g(d)
        for p in sieve_primes(2000).unwrap().into_iter().skip(1) {
            let divs: Vec<u64> = (2..=p - 1).filter(|d| (p - 1) % d == 0).collect();
            for &d in &divs {
                for &dd in &divs {
                    if dd > d && dd % d == 0 {
                        let g = least_power_nonresidue(p, d).unwrap();
                        let gg = least_power_nonresidue(p, dd).unwrap();
                        assert!(gg <= g, "p={p} d={d} d'={dd}: g={g} g'={gg}");
                    }
                }
            }
        }
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_count(10, 3.0).unwrap(), 4); // 1, 2, 4, 8
        assert_eq!(psi_count(50, 2.0).unwrap(), 1); // strict p < 2 leaves n = 1
        assert_eq!(psi_count(100, 10.0).unwrap(), 46);
        assert_eq!(psi_count(1000, 7.0).unwrap(), 86);
        assert_eq!(psi_count(100, 101.0).unwrap(), 100); // y > x: everything
        assert!(matches!(psi_count(0, 3.0), Err(Error::Domain(_))));
        assert!(matches!(psi_count(10, 1.5), Err(Error::Domain(_))));
        assert!(matches!(
            psi_count_with_limit(1000, 3.0, 100),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn psi_matches_trial_division_oracle() {
        for (x, y) in [(100u64, 10.0f64), (500, 13.0), (300, 17.5), (1000, 31.0)] {
            let mut count = 0;
            for n in 1..=x {
                let f = crate::arith::factorize(n).unwrap();
                if f.distinct_primes().all(|p| (p as f64) < y) {
                    count += 1;
                }
            }
            assert_eq!(psi_count(x, y).unwrap(), count, "x={x} y={y}");
        }
    }

    #[test]
    fn psi_monotone_and_full() {
        let mut prev = 0;
        for x in [10u64, 20, 50, 100, 200] {
            let v = psi_count(x, 10.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0;
        for y in [2.0f64, 3.0, 5.0, 7.0, 11.0, 200.0] {
            let v = psi_count(100, y).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // psi(x, y) = x once y exceeds every prime <= x
        assert_eq!(psi_count(100, 101.0).unwrap(), 100);
        assert_eq!(psi_count(97, 98.0).unwrap(), 97);
    }

    #[test]
    fn psi_with_many_primes_below_y() {
        // y near x makes the prime list huge; the recursion depth must stay
        // logarithmic in x, not linear in pi(y)
        assert_eq!(psi_count(1_000_000, 1_000_000.0).unwrap(), 1_000_000);
        // x itself prime and excluded by the strict convention
        assert_eq!(psi_count(999_983, 999_983.0).unwrap(), 999_982);
    }

    #[test]
    fn psi_lower_bound_report() {
        let table = DickmanTable::new();
        // y > x: psi = x, u < 1, rho = 1, equality
        let r = check_psi_lower_bound(100, 200.0, &table).unwrap();
        assert_eq!(r.psi, 100);
        assert!(r.u < 1.0);
        assert_eq!(r.x_rho_u, 100.0);
        assert!(r.holds);

        let r = check_psi_lower_bound(10_000, 100.0, &table).unwrap();
        assert_eq!(r.psi, 3716);
        assert!((r.u - 2.0).abs() < 1e-12);
        assert!((r.x_rho_u - 3068.5281944005469).abs() < 1e-6);
        assert!(r.holds);
    }

    #[test]
    fn char_sum_full_period_vanishes() {
        // orthogonality: the complete sum over n = 1..p-1 is 0 for any
        // non-principal character
        for p in [101u64, 103] {
            let r = character_partial_sum_diagnostic(p, 2, p - 1).unwrap();
            assert!(
                r.max_normalized_sum < 1e-12,
                "p={p}: {}",
                r.max_normalized_sum
            );
        }
    }

    #[test]
    fn char_sum_frozen_values() {
        // quadratic character sums cross-checked against the Euler criterion
        let r = character_partial_sum_diagnostic(101, 2, 33).unwrap();
        assert!((r.max_normalized_sum - 5.0 / 33.0).abs() < 1e-12);
        let r = character_partial_sum_diagnostic(10007, 2, 26).unwrap();
        assert!((r.max_normalized_sum - 8.0 / 26.0).abs() < 1e-12);
        assert!(r.max_normalized_sum <= 1.0);
    }

    #[test]
    fn char_sum_matches_euler_criterion() {
        // independent ±1 summation for the quadratic character
        for (p, h) in [(101u64, 33u64), (101, 50), (10007, 26), (10007, 100)] {
            let mut s: i64 = 0;
            for n in 1..=h {
                s += if arith::mod_pow(n, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                };
            }
            let want = (s.unsigned_abs()) as f64 / h as f64;
            let got = character_partial_sum_diagnostic(p, 2, h)
                .unwrap()
                .max_normalized_sum;
            assert!((got - want).abs() < 1e-12, "p={p} H={h}");
        }
    }

    #[test]
    fn char_sum_burgess_regime_diagnostic() {
        // H = ceil(p^0.3): cancellation should be visible (recorded, with a
        // generous ceiling asserted)
        let p = 10007u64;
        let h = (10007f64.powf(0.3)).ceil() as u64;
        let r = character_partial_sum_diagnostic(p, 2, h).unwrap();
        assert!(r.max_normalized_sum < 0.5, "{}", r.max_normalized_sum);
    }

    #[test]
    fn char_sum_errors() {
        assert!(matches!(
            character_partial_sum_diagnostic(101, 3, 10),
            Err(Error::Domain(_))
        )); // 3 does not divide 100
        assert!(matches!(
            character_partial_sum_diagnostic(101, 2, 101),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            character_partial_sum_diagnostic(2_000_003, 2, 10),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn profile_examples() {
        let pr = residue_profile(13).unwrap();
        let pairs: Vec<(u64, u64)> = pr.entries.iter().map(|e| (e.q, e.g)).collect();
        assert_eq!(pairs, vec![(2, 2), (3, 2)]);

        let pr = residue_profile(41).unwrap();
        let pairs: Vec<(u64, u64)> = pr.entries.iter().map(|e| (e.q, e.g)).collect();
        assert_eq!(pairs, vec![(5, 2), (2, 3)]);

        let pr = residue_profile(3).unwrap();
        let pairs: Vec<(u64, u64)> = pr.entries.iter().map(|e| (e.q, e.g)).collect();
        assert_eq!(pairs, vec![(2, 2)]);

        let pr = residue_profile(7).unwrap();
        let pairs: Vec<(u64, u64)> = pr.entries.iter().map(|e| (e.q, e.g)).collect();
        assert_eq!(pairs, vec![(3, 2), (2, 3)]);

        assert!(residue_profile(2).is_err());
    }
}
