//! Exact integer and modular arithmetic shared by every other module.
//!
//! All arithmetic is 64-bit with 128-bit intermediates for products; inputs
//! at or above 2^62 are rejected so that sums of two residues never overflow.
//! Primality is a deterministic Miller–Rabin witness set valid for the whole
//! 64-bit range; factorization is trial division by sieved small primes with
//! a Brent-rho fallback for large cofactors.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Inputs must stay below this bound (2^62).
pub const MAX_VALUE: u64 = 1 << 62;

/// Default segment length (entries) of the segmented sieve.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

/// Largest `limit` accepted by [`sieve_primes`]; beyond it the materialized
/// vector of primes would dominate memory, use [`for_each_prime`] instead.
pub const DEFAULT_SIEVE_CAPACITY: u64 = 4_000_000_000;

const SMALL_PRIME_LIMIT: u64 = 1_000_000;

fn small_primes() -> &'static [u64] {
    static SMALL: OnceLock<Vec<u64>> = OnceLock::new();
    SMALL.get_or_init(|| simple_sieve(SMALL_PRIME_LIMIT))
}

/// Plain byte sieve, used for base primes and small requests.
fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// Calls `f` for every prime ≤ `limit`, in increasing order, using a
/// segmented sieve with `segment_size` entries per segment.
pub fn for_each_prime_with(limit: u64, segment_size: usize, mut f: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root.min(limit));
    for &p in &base {
        if p <= limit {
            f(p);
        }
    }
    let seg = segment_size.max(64) as u64;
    let mut lo = root.min(limit) + 1;
    let mut marks = vec![false; seg as usize];
    while lo <= limit {
        let hi = (lo + seg - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        marks[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                marks[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in marks[..len].iter().enumerate() {
            if !c {
                f(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
}

/// As [`for_each_prime_with`] with the default segment size.
pub fn for_each_prime(limit: u64, f: impl FnMut(u64)) {
    for_each_prime_with(limit, DEFAULT_SEGMENT_SIZE, f)
}

/// All primes in `[2, limit]`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_with(limit, DEFAULT_SEGMENT_SIZE, DEFAULT_SIEVE_CAPACITY)
}

/// All primes in `[2, limit]` with explicit segment size and capacity budget.
pub fn sieve_primes_with(limit: u64, segment_size: usize, capacity: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return Err(Error::domain("sieve limit must be at least 2"));
    }
    if limit > capacity {
        return Err(Error::capacity(format!(
            "sieve limit {limit} exceeds the materialization budget {capacity}; \
             use for_each_prime (segmented streaming) instead"
        )));
    }
    let mut out = Vec::with_capacity(prime_count_estimate(limit));
    for_each_prime_with(limit, segment_size, |p| out.push(p));
    Ok(out)
}

fn prime_count_estimate(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (x / x.ln() * 1.15) as usize
}

/// b^e mod m with 128-bit intermediates. Requires m ≥ 1; total otherwise.
pub fn mod_pow(base: u64, exponent: u64, modulus: u64) -> u64 {
    assert!(modulus >= 1, "modulus must be positive");
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base as u128) % m;
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Deterministic Miller–Rabin over the witness set that covers all of u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A positive integer together with its full prime factorization.
///
/// Invariant: `factors` lists (prime, exponent) pairs with strictly increasing
/// primes, and the product of `prime^exponent` equals `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    /// Validates and wraps an explicit factorization.
    pub fn new(value: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        if value == 0 {
            return Err(Error::domain("factored integer must be positive"));
        }
        let mut prod: u128 = 1;
        let mut last = 0u64;
        for &(p, e) in &factors {
            if p <= last {
                return Err(Error::domain("factor primes must be strictly increasing"));
            }
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::domain("factor exponents must be positive"));
            }
            last = p;
            for _ in 0..e {
                prod = prod.saturating_mul(p as u128);
            }
        }
        if prod != value as u128 {
            return Err(Error::domain("factorization does not reassemble to value"));
        }
        Ok(FactoredInteger { value, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// ω(n): number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// rad(n): product of the distinct prime factors.
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    /// Euler totient φ(n), from the factorization.
    pub fn phi(&self) -> u64 {
        let mut t: u128 = 1;
        for &(p, e) in &self.factors {
            t *= (p - 1) as u128;
            for _ in 1..e {
                t *= p as u128;
            }
        }
        t as u64
    }

    /// Möbius μ(n): 0 unless squarefree, else (−1)^ω.
    pub fn mu(&self) -> i8 {
        if self.factors.iter().any(|&(_, e)| e > 1) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Full factorization of n, deterministic. Domain error for n = 0.
pub fn factorize(n: u64) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::domain("cannot factorize 0"));
    }
    if n >= MAX_VALUE {
        return Err(Error::domain(format!("{n} is at or above 2^62")));
    }
    let mut m = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p * p > m {
            break;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if m <= SMALL_PRIME_LIMIT * SMALL_PRIME_LIMIT || is_prime(m) {
            // Cofactor below the square of the trial bound is prime.
            push_factor(&mut factors, m, 1);
        } else {
            let mut stack = vec![m];
            let mut rest: Vec<u64> = Vec::new();
            while let Some(c) = stack.pop() {
                if is_prime(c) {
                    rest.push(c);
                } else {
                    let d = brent_rho(c);
                    stack.push(d);
                    stack.push(c / d);
                }
            }
            rest.sort_unstable();
            let mut i = 0;
            while i < rest.len() {
                let p = rest[i];
                let mut e = 0;
                while i < rest.len() && rest[i] == p {
                    e += 1;
                    i += 1;
                }
                push_factor(&mut factors, p, e);
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(FactoredInteger { value: n, factors })
}

fn push_factor(factors: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    if let Some(last) = factors.iter_mut().find(|f| f.0 == p) {
        last.1 += e;
    } else {
        factors.push((p, e));
    }
}

/// Pollard rho (Floyd cycle detection); `n` must be composite.
fn brent_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c: u64 = 1;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x: u64 = 2;
        let mut y: u64 = 2;
        loop {
            x = f(x);
            y = f(f(y));
            if x == y {
                break; // cycle closed without exposing a factor; vary c
            }
            let d = gcd(x.abs_diff(y), n);
            if d > 1 {
                if d < n {
                    return d;
                }
                break;
            }
        }
        c += 1;
    }
}

/// Smallest e ≥ 1 with a^e ≡ 1 (mod p), computed by peeling prime factors
/// off p−1. Requires `p_minus_1` to be the factorization of p−1.
pub fn multiplicative_order(a: u64, p: u64, p_minus_1: &FactoredInteger) -> Result<u64> {
    if p < 2 {
        return Err(Error::domain("modulus must be a prime >= 2"));
    }
    if a % p == 0 {
        return Err(Error::domain("order of 0 is undefined"));
    }
    debug_assert_eq!(p_minus_1.value(), p - 1);
    let mut e = p - 1;
    for &(q, _) in p_minus_1.factors() {
        while e % q == 0 && mod_pow(a, e / q, p) == 1 {
            e /= q;
        }
    }
    Ok(e)
}

/// Whether a generates the full multiplicative group mod p.
pub fn is_primitive_root(a: u64, p: u64, p_minus_1: &FactoredInteger) -> bool {
    if p == 2 {
        return a % 2 == 1;
    }
    let a = a % p;
    if a == 0 {
        return false;
    }
    // a is a generator iff a^((p-1)/q) != 1 for every prime q | p-1.
    p_minus_1
        .distinct_primes()
        .all(|q| mod_pow(a, (p - 1) / q, p) != 1)
}

/// Number of distinct primes q | n with q < t.
pub fn omega_up_to(n: &FactoredInteger, t: f64) -> u32 {
    n.distinct_primes().filter(|&q| (q as f64) < t).count() as u32
}

/// Whether every odd prime factor of p−1 is ≥ y.
pub fn is_y_rough(p_minus_1: &FactoredInteger, y: f64) -> bool {
    p_minus_1
        .distinct_primes()
        .all(|q| q == 2 || (q as f64) >= y)
}

/// A prime p with the factorization of p−1 and memoized roughness checks.
#[derive(Debug, Clone)]
pub struct PrimeRecord {
    pub p: u64,
    pub p_minus_1: FactoredInteger,
    rough_at: BTreeMap<u64, bool>,
}

impl PrimeRecord {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        Ok(PrimeRecord {
            p,
            p_minus_1: factorize(p - 1)?,
            rough_at: BTreeMap::new(),
        })
    }

    /// Roughness at integer threshold y, memoized.
    pub fn note_roughness(&mut self, y: u64) -> bool {
        let pm1 = &self.p_minus_1;
        *self
            .rough_at
            .entry(y)
            .or_insert_with(|| is_y_rough(pm1, y as f64))
    }

    pub fn is_rough_at(&self, y: u64) -> Option<bool> {
        self.rough_at.get(&y).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert!(matches!(sieve_primes(1), Err(Error::Domain(_))));
    }

    #[test]
    fn sieve_capacity_refusal() {
        let err = sieve_primes_with(1 << 30, DEFAULT_SEGMENT_SIZE, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn sieve_count_to_one_million_matches_trial_division() {
        let primes = sieve_primes(1_000_000).unwrap();
        assert_eq!(primes.len(), 78_498);
        // independent trial-division oracle on a coarser range
        let mut count = 0usize;
        for n in 2u64..=20_000 {
            let mut d = 2;
            let mut prime = true;
            while d * d <= n {
                if n % d == 0 {
                    prime = false;
                    break;
                }
                d += 1;
            }
            if prime {
                count += 1;
            }
        }
        assert_eq!(primes.iter().filter(|&&p| p <= 20_000).count(), count);
    }

    #[test]
    fn segmented_matches_simple() {
        let a = sieve_primes(100_000).unwrap();
        let b = simple_sieve(100_000);
        assert_eq!(a, b);
        let c = sieve_primes_with(100_000, 1024, DEFAULT_SIEVE_CAPACITY).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(2147483647).unwrap().factors(), &[(2147483647, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_large_semiprime() {
        // 1e9+7 and 1e9+9 are both prime
        let n = 1_000_000_007u64 * 1_000_000_009;
        let f = factorize(n).unwrap();
        assert_eq!(f.factors(), &[(1_000_000_007, 1), (1_000_000_009, 1)]);
    }

    #[test]
    fn factorize_reassembles_and_matches_trial_division() {
        for n in 1u64..=100_000 {
            let f = factorize(n).unwrap();
            let prod: u64 = f
                .factors()
                .iter()
                .map(|&(p, e)| p.pow(e))
                .product();
            assert_eq!(prod, n);
            // trial-division oracle
            let mut m = n;
            let mut oracle = Vec::new();
            let mut d = 2;
            while d * d <= m {
                if m % d == 0 {
                    let mut e = 0;
                    while m % d == 0 {
                        m /= d;
                        e += 1;
                    }
                    oracle.push((d, e));
                }
                d += 1;
            }
            if m > 1 {
                oracle.push((m, 1));
            }
            assert_eq!(f.factors(), oracle.as_slice(), "n={n}");
        }
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(2, 10, 1000), 24);
        assert_eq!(mod_pow(7, 0, 13), 1);
        assert_eq!(mod_pow(3, 20, 41), 40);
        assert_eq!(mod_pow(5, 100, 1), 0);
        // repeated-multiplication oracle
        let mut acc = 1u64;
        for _ in 0..20 {
            acc = acc * 3 % 41;
        }
        assert_eq!(acc, mod_pow(3, 20, 41));
    }

    #[test]
    fn primality_known_values() {
        let primes = sieve_primes(10_000).unwrap();
        let mut idx = 0;
        for n in 2..=10_000u64 {
            let expected = idx < primes.len() && primes[idx] == n;
            assert_eq!(is_prime(n), expected, "n={n}");
            if expected {
                idx += 1;
            }
        }
        assert!(is_prime(2147483647));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007u64.wrapping_mul(3)));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
    }

    #[test]
    fn order_examples() {
        let f6 = factorize(6).unwrap();
        assert_eq!(multiplicative_order(1, 7, &f6).unwrap(), 1);
        assert_eq!(multiplicative_order(3, 7, &f6).unwrap(), 6);
        let f12 = factorize(12).unwrap();
        assert_eq!(multiplicative_order(2, 13, &f12).unwrap(), 12);
        assert!(multiplicative_order(0, 7, &f6).is_err());
    }

    #[test]
    fn order_divides_group_order_and_is_minimal() {
        // exhaustive over p <= 1000 here; the full 10^4 sweep lives in the
        // integration suite where it shares work with the phi count.
        for p in sieve_primes(1000).unwrap() {
            let pm1 = factorize(p - 1).unwrap();
            for a in 1..p {
                let e = multiplicative_order(a, p, &pm1).unwrap();
                assert_eq!((p - 1) % e, 0);
                assert_eq!(mod_pow(a, e, p), 1);
                for &(q, _) in factorize(e).unwrap().factors() {
                    assert_ne!(mod_pow(a, e / q, p), 1, "p={p} a={a} e={e} q={q}");
                }
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        let f6 = factorize(6).unwrap();
        assert!(is_primitive_root(3, 7, &f6));
        assert!(!is_primitive_root(2, 7, &f6)); // order 3
        assert!(!is_primitive_root(1, 7, &f6));
    }

    #[test]
    fn omega_up_to_examples() {
        let f12 = factorize(12).unwrap();
        assert_eq!(omega_up_to(&f12, 10.0), 2);
        assert_eq!(omega_up_to(&f12, 2.0), 0);
        let f = factorize(4 * 3 * 5 * 41).unwrap();
        assert_eq!(omega_up_to(&f, 10.0), 3);
        assert_eq!(omega_up_to(&f, 42.0), 4);
    }

    #[test]
    fn omega_up_to_monotone_in_t() {
        let f = factorize(2 * 3 * 5 * 7 * 11 * 13).unwrap();
        let mut last = 0;
        for t in 0..20 {
            let v = omega_up_to(&f, t as f64);
            assert!(v >= last);
            last = v;
        }
        assert_eq!(last, f.omega());
    }

    #[test]
    fn roughness_examples() {
        assert!(is_y_rough(&factorize(22).unwrap(), 10.0)); // p = 23
        assert!(!is_y_rough(&factorize(12).unwrap(), 10.0)); // p = 13
        assert!(is_y_rough(&factorize(4).unwrap(), 1e18)); // p = 5, only factor 2
        assert!(is_y_rough(&factorize(22).unwrap(), 11.0)); // boundary: q >= y allowed
        assert!(!is_y_rough(&factorize(22).unwrap(), 11.5));
    }

    #[test]
    fn prime_record_memoizes() {
        let mut r = PrimeRecord::new(23).unwrap();
        assert_eq!(r.is_rough_at(10), None);
        assert!(r.note_roughness(10));
        assert_eq!(r.is_rough_at(10), Some(true));
        assert!(PrimeRecord::new(24).is_err());
    }

    #[test]
    fn totient_and_mu() {
        assert_eq!(factorize(1).unwrap().phi(), 1);
        assert_eq!(factorize(12).unwrap().phi(), 4);
        assert_eq!(factorize(30).unwrap().mu(), -1);
        assert_eq!(factorize(12).unwrap().mu(), 0);
        assert_eq!(factorize(35).unwrap().mu(), 1);
        assert_eq!(factorize(30).unwrap().radical(), 30);
        assert_eq!(factorize(12).unwrap().radical(), 6);
    }
}
