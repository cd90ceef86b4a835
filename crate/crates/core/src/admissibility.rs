//! Which primes `q` make `gcd(q^h - 1, c_i) = 1` for every coefficient of a
//! form: the exceptional primes `P(h)`, per-prime witnesses `u_p`, the CRT
//! progression `u (mod Q)`, and a direct sieve-and-gcd filter to check it
//! against.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, inv_mod, is_prime, pow_mod, prime_factors, primes_up_to};
use crate::error::{Error, Result};
use crate::linear_form::LinearForm;

/// Primes `p` with `(p - 1) | h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalPrimeSet {
    pub h: usize,
    pub primes: Vec<u64>,
}

impl ExceptionalPrimeSet {
    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }
}

pub fn exceptional_primes(h: usize) -> Result<ExceptionalPrimeSet> {
    if h < 2 {
        return Err(Error::InvalidInput(format!("order h = {h} must be at least 2")));
    }
    let h64 = h as u64;
    let primes = (1..=h64)
        .filter(|d| h64.is_multiple_of(*d))
        .map(|d| d + 1)
        .filter(|&p| is_prime(p))
        .collect();
    Ok(ExceptionalPrimeSet { h, primes })
}

/// Smallest `u` in `[1, p-1]` with `u^h ≢ 1 (mod p)`; `None` exactly when
/// `(p - 1) | h`.
pub fn lemma_witness(p: u64, h: usize) -> Result<Option<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok((1..p).find(|&u| pow_mod(u, h as u64, p) != 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleProgression {
    pub u: u64,
    #[serde(rename = "Q")]
    pub modulus: u64,
    /// Witness `u_p` for every prime dividing some coefficient.
    pub witnesses: BTreeMap<u64, u64>,
}

impl AdmissibleProgression {
    /// `Q = 1` imposes no congruence.
    pub fn contains(&self, q: u64) -> bool {
        self.modulus == 1 || q % self.modulus == self.u
    }
}

/// CRT combination of the witnesses `u_p` over the primes dividing the
/// coefficients. Requires that no coefficient is divisible by a prime of `P(h)`.
pub fn admissible_progression(phi: &LinearForm) -> Result<AdmissibleProgression> {
    let h = phi.h();
    let exceptional = exceptional_primes(h)?;
    let mut primes: Vec<u64> = Vec::new();
    for &c in phi.coeffs() {
        let abs = c.unsigned_abs();
        if let Some(&p) = exceptional.primes.iter().find(|&&p| abs % p == 0) {
            return Err(Error::ExceptionalPrimeDivides { prime: p, h, coefficient: c });
        }
        primes.extend(prime_factors(abs));
    }
    primes.sort_unstable();
    primes.dedup();

    let mut witnesses = BTreeMap::new();
    let (mut u, mut modulus) = (0u64, 1u64);
    for &p in &primes {
        let up = lemma_witness(p, h)?.expect("primes outside P(h) have witnesses");
        witnesses.insert(p, up);
        // solve x ≡ u (mod modulus), x ≡ up (mod p)
        let m_inv = inv_mod(modulus % p, p).expect("distinct primes are coprime");
        let diff = (up + p - u % p) % p;
        let t = (diff as u128 * m_inv as u128 % p as u128) as u64;
        let next = modulus
            .checked_mul(p)
            .ok_or_else(|| Error::InvalidInput("progression modulus overflows".into()))?;
        u = ((u as u128 + modulus as u128 * t as u128) % next as u128) as u64;
        modulus = next;
    }
    Ok(AdmissibleProgression { u, modulus, witnesses })
}

/// `gcd(q^h - 1, |c|)`, computed modulo `|c|`.
pub fn gcd_power_minus_one(q: u64, h: usize, c: i64) -> u64 {
    let m = c.unsigned_abs();
    let r = (pow_mod(q, h as u64, m) + m - 1) % m;
    gcd(r, m)
}

/// Whether `gcd(q^h - 1, c_i) = 1` for all `i`; on failure, the first
/// offending index (0-based) and the gcd.
pub fn check_admissible(phi: &LinearForm, q: u64) -> std::result::Result<(), (usize, u64)> {
    let h = phi.h();
    for (i, &c) in phi.coeffs().iter().enumerate() {
        let g = gcd_power_minus_one(q, h, c);
        if g != 1 {
            return Err((i, g));
        }
    }
    Ok(())
}

/// All primes `q <= bound` with `gcd(q^h - 1, c_i) = 1` for every `i`.
pub fn admissible_primes(phi: &LinearForm, bound: u64) -> Vec<u64> {
    primes_up_to(bound)
        .into_iter()
        .filter(|&q| check_admissible(phi, q).is_ok())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub bound: u64,
    pub progression: AdmissibleProgression,
    pub progression_primes: Vec<u64>,
    pub direct_primes: Vec<u64>,
    /// Progression primes missing from the direct list; always empty unless
    /// something is broken.
    pub violations: Vec<u64>,
    pub holds: bool,
}

/// Checks that every prime `<= bound` in the progression passes the direct
/// gcd filter.
pub fn cross_validate(phi: &LinearForm, bound: u64) -> Result<CrossValidation> {
    let progression = admissible_progression(phi)?;
    let direct_primes = admissible_primes(phi, bound);
    let progression_primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|&q| progression.contains(q))
        .collect();
    let violations: Vec<u64> = progression_primes
        .iter()
        .copied()
        .filter(|q| direct_primes.binary_search(q).is_err())
        .collect();
    let holds = violations.is_empty();
    Ok(CrossValidation { bound, progression, progression_primes, direct_primes, violations, holds })
}
