//! Discrete logarithms, CRT, and the Jacobsthal function.
//!
//! [`DlogContext`] fixes the least primitive root g of p and answers
//! `discrete_log(a)`: the unique e ∈ [0, p−1) with g^e ≡ a (mod p). Small
//! primes get a full lookup table; larger ones use Pohlig–Hellman over the
//! prime-power subgroups of p−1 with baby-step giant-step per prime.
//!
//! The Jacobsthal function j(n) is the least m such that every m consecutive
//! integers contain one coprime to n. It depends only on rad(n) and equals
//! one plus the largest cyclic gap between consecutive coprime residues over
//! a full period, which is how [`jacobsthal_exact`] computes it.

use std::collections::HashMap;

use crate::arith::{self, FactoredInteger};
use crate::{Error, Result};

/// Primes up to this threshold get a full dlog lookup table inside
/// [`DlogContext`]; larger primes use Pohlig–Hellman + BSGS.
pub const FULL_TABLE_THRESHOLD: u64 = 10_000;

/// Capacity limit for [`DlogTable`] (one u32 slot per residue).
pub const DEFAULT_TABLE_LIMIT: u64 = 1_000_000;

/// Default period-scan budget for [`jacobsthal_exact`].
pub const DEFAULT_JACOBSTHAL_SCAN_LIMIT: u64 = 1_000_000_000;

const JACOBSTHAL_SEGMENT: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// Discrete logarithms
// ---------------------------------------------------------------------------

/// Discrete-log context for a fixed prime p with generator the least
/// primitive root; immutable once built and shareable across workers.
#[derive(Debug, Clone)]
pub struct DlogContext {
    p: u64,
    generator: u64,
    p_minus_1: FactoredInteger,
    strategy: Strategy,
}

#[derive(Debug, Clone)]
enum Strategy {
    FullTable(Vec<u32>),
    PohligHellman(Vec<PrimePower>),
}

#[derive(Debug, Clone)]
struct PrimePower {
    q: u64,
    e: u32,
    /// baby steps γ^j for j < m
    baby: HashMap<u64, u32>,
    m: u64,
    /// γ^{−m}
    giant: u64,
}

impl DlogContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !arith::is_prime(p) {
            return Err(Error::domain(format!("{p} is not an odd prime")));
        }
        let p_minus_1 = arith::factorize(p - 1)?;
        let generator = (2..p)
            .find(|&a| arith::is_primitive_root(a, p, &p_minus_1))
            .ok_or_else(|| Error::contract(format!("no primitive root found mod {p}")))?;
        let strategy = if p <= FULL_TABLE_THRESHOLD {
            let mut table = vec![u32::MAX; p as usize];
            let mut v: u64 = 1;
            for k in 0..p - 1 {
                table[v as usize] = k as u32;
                v = v * generator % p;
            }
            Strategy::FullTable(table)
        } else {
            let mut subgroups = Vec::new();
            for &(q, e) in p_minus_1.factors() {
                let gamma = arith::mod_pow(generator, (p - 1) / q, p);
                let m = (q as f64).sqrt().ceil() as u64;
                let mut baby = HashMap::with_capacity(m as usize);
                let mut v: u64 = 1;
                for j in 0..m {
                    baby.entry(v).or_insert(j as u32);
                    v = (v as u128 * gamma as u128 % p as u128) as u64;
                }
                let giant = arith::mod_pow(gamma, q - m % q, p);
                subgroups.push(PrimePower {
                    q,
                    e,
                    baby,
                    m,
                    giant,
                });
            }
            Strategy::PohligHellman(subgroups)
        };
        Ok(DlogContext {
            p,
            generator,
            p_minus_1,
            strategy,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn p_minus_1(&self) -> &FactoredInteger {
        &self.p_minus_1
    }

    /// The unique e in [0, p−1) with generator^e ≡ a (mod p).
    pub fn discrete_log(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::domain("discrete log of 0 is undefined"));
        }
        match &self.strategy {
            Strategy::FullTable(table) => Ok(table[a as usize] as u64),
            Strategy::PohligHellman(subgroups) => {
                let p = self.p;
                let n = p - 1;
                let mut residue: u64 = 0;
                let mut modulus: u64 = 1;
                for sg in subgroups {
                    let pe = sg.q.pow(sg.e);
                    let x = self.dlog_prime_power(a, sg, pe)?;
                    let (r, m) = crt_pair(residue, modulus, x, pe).ok_or_else(|| {
                        Error::contract("prime-power moduli must be coprime")
                    })?;
                    residue = r;
                    modulus = m;
                }
                debug_assert_eq!(modulus, n);
                Ok(residue)
            }
        }
    }

    /// Digit-by-digit dlog of a inside the subgroup of order q^e.
    fn dlog_prime_power(&self, a: u64, sg: &PrimePower, pe: u64) -> Result<u64> {
        let p = self.p;
        let h = arith::mod_pow(a, (p - 1) / pe, p);
        let gamma_e = arith::mod_pow(self.generator, (p - 1) / pe, p);
        let mut x: u64 = 0;
        let mut qpow: u64 = 1; // q^i
        for i in 0..sg.e {
            // r = (h * gamma_e^{-x})^{q^{e-1-i}} lies in <gamma>
            let inv_exp = (pe - x % pe) % pe;
            let t = (h as u128 * arith::mod_pow(gamma_e, inv_exp, p) as u128 % p as u128) as u64;
            let r = arith::mod_pow(t, sg.q.pow(sg.e - 1 - i), p);
            let digit = self.bsgs(r, sg)?;
            x += digit * qpow;
            qpow *= sg.q;
        }
        Ok(x)
    }

    /// Baby-step giant-step in the order-q subgroup of the generator.
    fn bsgs(&self, target: u64, sg: &PrimePower) -> Result<u64> {
        let p = self.p;
        let mut cur = target;
        for k in 0..sg.m {
            if let Some(&j) = sg.baby.get(&cur) {
                return Ok((k * sg.m + j as u64) % sg.q);
            }
            cur = (cur as u128 * sg.giant as u128 % p as u128) as u64;
        }
        Err(Error::contract(format!(
            "bsgs missed the target in the order-{} subgroup mod {p}",
            sg.q
        )))
    }
}

/// Flat dlog table for every residue of p; the backing store for
/// character-sum diagnostics. One u32 per residue, so p is capped.
#[derive(Debug)]
pub struct DlogTable {
    p: u64,
    generator: u64,
    table: Vec<u32>,
}

impl DlogTable {
    pub fn build(p: u64) -> Result<Self> {
        Self::build_with_limit(p, DEFAULT_TABLE_LIMIT)
    }

    pub fn build_with_limit(p: u64, limit: u64) -> Result<Self> {
        if p < 3 || !arith::is_prime(p) {
            return Err(Error::domain(format!("{p} is not an odd prime")));
        }
        if p > limit {
            return Err(Error::capacity(format!(
                "full discrete-log table for p = {p} exceeds the limit {limit}"
            )));
        }
        let p_minus_1 = arith::factorize(p - 1)?;
        let generator = (2..p)
            .find(|&a| arith::is_primitive_root(a, p, &p_minus_1))
            .ok_or_else(|| Error::contract(format!("no primitive root found mod {p}")))?;
        let mut table = vec![u32::MAX; p as usize];
        let mut v: u64 = 1;
        for k in 0..p - 1 {
            table[v as usize] = k as u32;
            v = v * generator % p;
        }
        Ok(DlogTable {
            p,
            generator,
            table,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// dlog of a, for a ≢ 0 (mod p).
    pub fn index(&self, a: u64) -> Option<u64> {
        let a = (a % self.p) as usize;
        let v = self.table[a];
        (v != u32::MAX).then_some(v as u64)
    }
}

// ---------------------------------------------------------------------------
// CRT
// ---------------------------------------------------------------------------

/// A set of residue constraints, one class per distinct prime modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueConstraintSet {
    constraints: Vec<(u64, u64)>, // (q, a_q) with 0 <= a_q < q
}

impl ResidueConstraintSet {
    pub fn new(mut constraints: Vec<(u64, u64)>) -> Result<Self> {
        constraints.sort_unstable();
        for w in constraints.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::domain(format!("duplicate modulus {}", w[0].0)));
            }
        }
        for &(q, a) in &constraints {
            if !arith::is_prime(q) {
                return Err(Error::domain(format!("modulus {q} is not prime")));
            }
            if a >= q {
                return Err(Error::domain(format!("residue {a} not reduced mod {q}")));
            }
        }
        Ok(ResidueConstraintSet { constraints })
    }

    pub fn constraints(&self) -> &[(u64, u64)] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// ∏ q over the constraint moduli (the period of the system).
    pub fn modulus_product(&self) -> Result<u64> {
        self.constraints
            .iter()
            .try_fold(1u64, |acc, &(q, _)| acc.checked_mul(q))
            .ok_or_else(|| Error::capacity("constraint modulus product overflows u64"))
    }
}

/// A solved residue system: the unique `residue` mod `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtSolution {
    pub residue: u64,
    pub modulus: u64,
}

/// Chinese remainder combination over the constraint set.
/// The empty set yields 0 mod 1.
pub fn crt_combine(set: &ResidueConstraintSet) -> Result<CrtSolution> {
    let mut residue: u64 = 0;
    let mut modulus: u64 = 1;
    for &(q, a) in set.constraints() {
        if modulus.checked_mul(q).is_none() {
            return Err(Error::capacity("CRT modulus product overflows u64"));
        }
        let (r, m) = crt_pair(residue, modulus, a, q)
            .ok_or_else(|| Error::domain("moduli must be pairwise coprime"))?;
        residue = r;
        modulus = m;
    }
    Ok(CrtSolution { residue, modulus })
}

/// Combine x ≡ r1 (mod m1) with x ≡ r2 (mod m2) for coprime moduli.
fn crt_pair(r1: u64, m1: u64, r2: u64, m2: u64) -> Option<(u64, u64)> {
    let (g, inv) = mod_inverse(m1 % m2, m2)?;
    if g != 1 {
        return None;
    }
    // x = r1 + m1 * t, t ≡ (r2 - r1) * m1^{-1} (mod m2)
    let m = m1.checked_mul(m2)?;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(m2 as i128) as u64;
    let t = (diff as u128 * inv as u128 % m2 as u128) as u64;
    Some(((r1 as u128 + m1 as u128 * t as u128) as u64 % m, m))
}

/// (gcd, a^{-1} mod m) when gcd(a, m) = 1; gcd reported either way.
fn mod_inverse(a: u64, m: u64) -> Option<(u64, u64)> {
    if m == 1 {
        return Some((1, 0));
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    Some((old_r as u64, old_s.rem_euclid(m as i128) as u64))
}

// ---------------------------------------------------------------------------
// Jacobsthal function
// ---------------------------------------------------------------------------

/// Exact j(n) by a cyclic gap scan over one period of rad(n).
///
/// j(n) = 1 + the longest run of consecutive integers sharing a factor with
/// n, equivalently the largest cyclic difference between consecutive coprime
/// residues mod rad(n). Capacity error when rad(n) exceeds the scan budget.
pub fn jacobsthal_exact(n: &FactoredInteger) -> Result<u64> {
    let primes: Vec<u64> = n.distinct_primes().collect();
    jacobsthal_of_primes(&primes, DEFAULT_JACOBSTHAL_SCAN_LIMIT)
}

/// Exact j(∏ primes) for a set of distinct primes, with explicit scan budget.
pub fn jacobsthal_of_primes(primes: &[u64], scan_limit: u64) -> Result<u64> {
    let mut rad: u64 = 1;
    for &q in primes {
        rad = rad
            .checked_mul(q)
            .ok_or_else(|| Error::capacity("radical overflows u64"))?;
    }
    if rad > scan_limit {
        return Err(Error::capacity(format!(
            "radical {rad} exceeds the Jacobsthal scan budget {scan_limit}"
        )));
    }
    if rad == 1 {
        return Ok(1);
    }
    let mut marks = vec![false; JACOBSTHAL_SEGMENT.min(rad) as usize];
    let mut first_coprime: Option<u64> = None;
    let mut last_coprime: u64 = 0;
    let mut max_gap: u64 = 0;
    let mut lo: u64 = 0;
    while lo < rad {
        let hi = (lo + JACOBSTHAL_SEGMENT).min(rad);
        let len = (hi - lo) as usize;
        marks[..len].fill(false);
        for &q in primes {
            let mut m = lo.div_ceil(q) * q;
            while m < hi {
                marks[(m - lo) as usize] = true;
                m += q;
            }
        }
        for (i, &hit) in marks[..len].iter().enumerate() {
            if !hit {
                let pos = lo + i as u64;
                match first_coprime {
                    None => first_coprime = Some(pos),
                    Some(_) => max_gap = max_gap.max(pos - last_coprime),
                }
                last_coprime = pos;
            }
        }
        lo = hi;
    }
    let first = first_coprime.expect("1 is coprime to every modulus");
    // wrap-around gap closes the cycle
    Ok(max_gap.max(first + rad - last_coprime))
}

/// Certified pigeonhole bound: when every prime q | n satisfies q > ω(n),
/// any ω(n)+1 consecutive integers contain two sharing a prime (impossible)
/// or one coprime to n, so j(n) ≤ ω(n) + 1. Returns that bound, or `None`
/// when the hypothesis fails. (The naive reading j(n) ≤ ω(n) is false
/// already for n an odd prime: j(q) = 2 > 1.)
pub fn jacobsthal_pigeonhole_bound(n: &FactoredInteger) -> Option<u64> {
    let omega = n.omega() as u64;
    n.distinct_primes()
        .all(|q| q > omega)
        .then_some(omega + 1)
}

/// Smallest m ≥ 0 avoiding every constraint class: m ≢ a_q (mod q) for all q.
/// Always exists (and is < ∏q): the classes cover at most a proper subset of
/// any full residue system.
pub fn min_avoiding(set: &ResidueConstraintSet) -> u64 {
    let mut m: u64 = 0;
    loop {
        if set.constraints().iter().all(|&(q, a)| m % q != a) {
            return m;
        }
        m += 1;
    }
}

/// Memo for Jacobsthal values keyed by radical; each sweep worker owns one.
#[derive(Debug, Default)]
pub struct JacobsthalCache {
    map: HashMap<u64, u64>,
    scan_limit: u64,
}

impl JacobsthalCache {
    pub fn new() -> Self {
        JacobsthalCache {
            map: HashMap::new(),
            scan_limit: DEFAULT_JACOBSTHAL_SCAN_LIMIT,
        }
    }

    pub fn with_scan_limit(scan_limit: u64) -> Self {
        JacobsthalCache {
            map: HashMap::new(),
            scan_limit,
        }
    }

    /// j(∏ primes), memoized by the product.
    pub fn j_of_primes(&mut self, primes: &[u64]) -> Result<u64> {
        let mut rad: u64 = 1;
        for &q in primes {
            rad = rad
                .checked_mul(q)
                .ok_or_else(|| Error::capacity("radical overflows u64"))?;
        }
        if let Some(&j) = self.map.get(&rad) {
            return Ok(j);
        }
        let j = jacobsthal_of_primes(primes, self.scan_limit)?;
        self.map.insert(rad, j);
        Ok(j)
    }
}
