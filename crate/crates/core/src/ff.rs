//! Finite fields GF(p^(k·h)) realized as GF(p)[x]/(f), together with the
//! subfield GF(p^k), a canonical multiplicative generator and discrete
//! logarithms.
//!
//! Everything is deterministic: the modulus is the irreducible monic
//! polynomial of smallest integer encoding and the generator is the first
//! element of full order in encoding order. Two towers built from the same
//! `(p, k, h)` are therefore identical.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::arith::{self, is_prime, prime_factors};
use crate::error::{Error, Result};

/// Default bound on the size `p^(k·h)` of the big field.
pub const DEFAULT_FIELD_CEILING: u64 = 1 << 24;
/// Group orders up to this bound get a full discrete-log table.
pub const DEFAULT_TABLE_THRESHOLD: u64 = 1 << 20;

// ---------------------------------------------------------------------------
// Polynomials over GF(p), constant term first, trimmed (no trailing zeros).
// ---------------------------------------------------------------------------

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let df = f.len() - 1;
    let lead_inv = arith::inv_mod(f[df], p).expect("nonzero leading coefficient");
    while r.len() > df {
        let top = r.len() - 1;
        let t = r[top] * lead_inv % p;
        if t != 0 {
            let shift = top - df;
            for (j, &fj) in f.iter().enumerate() {
                r[shift + j] = (r[shift + j] + t * (p - fj % p)) % p;
            }
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn poly_powmod(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), f, p);
        }
        exp >>= 1;
        if exp > 0 {
            b = poly_rem(&poly_mul(&b, &b, p), f, p);
        }
    }
    poly_rem(&acc, f, p)
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `x^(p^times) mod f`, by repeated p-th powering.
fn frobenius_of_x(f: &[u64], p: u64, times: u32) -> Vec<u64> {
    let mut z = poly_rem(&[0, 1], f, p);
    for _ in 0..times {
        z = poly_powmod(&z, p, f, p);
    }
    z
}

/// Rabin's test for a monic `f` of degree `d >= 1` over GF(p).
pub fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    let x = poly_rem(&[0, 1], f, p);
    if frobenius_of_x(f, p, d as u32) != x {
        return false;
    }
    prime_factors(d as u64).into_iter().all(|r| {
        let z = frobenius_of_x(f, p, (d as u64 / r) as u32);
        let g = poly_gcd(&poly_sub(&z, &x, p), f, p);
        g.len() == 1
    })
}

fn digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let c = n % p;
            n /= p;
            c
        })
        .collect()
}

/// The monic irreducible polynomial of degree `d` over GF(p) with the
/// smallest encoding `Σ c_i p^i` over its non-leading coefficients.
/// Coefficients are returned constant term first, leading 1 included.
pub fn find_irreducible(p: u64, d: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    // irreducibles have density about 1/d, so the scan ends early
    for enc in 0u64.. {
        let mut f = digits(enc, p, d);
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("an irreducible polynomial exists in every degree")
}

// ---------------------------------------------------------------------------
// Field elements and the tower.
// ---------------------------------------------------------------------------

/// An element of GF(p^D): exactly `D` coefficients in `[0, p)`, constant
/// term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerConfig {
    /// Upper bound on `p^(k·h)`.
    pub field_ceiling: u64,
    /// Largest group order served by a full discrete-log table;
    /// baby-step giant-step is used above it.
    pub table_threshold: u64,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig {
            field_ceiling: DEFAULT_FIELD_CEILING,
            table_threshold: DEFAULT_TABLE_THRESHOLD,
        }
    }
}

struct Bsgs {
    step: u64,
    baby: HashMap<u64, u64>,
    giant: FieldElement,
}

/// GF(p) ⊂ GF(q) = GF(p^k) ⊂ GF(q^h), with `q^h = p^(k·h)`.
pub struct FieldTower {
    p: u64,
    k: u32,
    h: u32,
    irr: Vec<u64>,
    size: u64,
    order: u64,
    order_factors: Vec<u64>,
    theta: FieldElement,
    subfield: Vec<FieldElement>,
    config: TowerConfig,
    table: OnceLock<Vec<u32>>,
    bsgs: OnceLock<Bsgs>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTower")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("h", &self.h)
            .field("irr", &self.irr)
            .field("theta", &self.encode(&self.theta))
            .finish()
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.k == other.k
            && self.h == other.h
            && self.irr == other.irr
            && self.theta == other.theta
            && self.subfield == other.subfield
    }
}

impl FieldTower {
    pub fn new(p: u64, k: u32, h: u32) -> Result<Self> {
        Self::with_config(p, k, h, TowerConfig::default())
    }

    pub fn with_config(p: u64, k: u32, h: u32, config: TowerConfig) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k < 1 {
            return Err(Error::InvalidInput("base degree k must be at least 1".into()));
        }
        if h < 2 {
            return Err(Error::InvalidInput("extension degree h must be at least 2".into()));
        }
        let degree = k
            .checked_mul(h)
            .ok_or_else(|| Error::InvalidInput("degree overflow".into()))?;
        let size = match p.checked_pow(degree) {
            Some(s) if s <= config.field_ceiling => s,
            other => {
                return Err(Error::CeilingExceeded {
                    what: "field size p^(k*h)",
                    value: other.map_or(u128::MAX, u128::from),
                    ceiling: config.field_ceiling as u128,
                })
            }
        };
        let irr = find_irreducible(p, degree as usize)?;
        let order = size - 1;
        let mut tower = FieldTower {
            p,
            k,
            h,
            irr,
            size,
            order,
            order_factors: prime_factors(order),
            theta: FieldElement { coeffs: vec![0; degree as usize] },
            subfield: Vec::new(),
            config,
            table: OnceLock::new(),
            bsgs: OnceLock::new(),
        };
        tower.theta = tower.find_generator();
        tower.subfield = tower.derive_subfield();
        Ok(tower)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn h(&self) -> u32 {
        self.h
    }
    /// Size of the subfield, `p^k`.
    pub fn q(&self) -> u64 {
        self.p.pow(self.k)
    }
    /// Size of the big field, `q^h`.
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Order of the multiplicative group, `q^h - 1`.
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn degree(&self) -> usize {
        self.irr.len() - 1
    }
    /// The modulus, constant term first, leading 1 included.
    pub fn modulus(&self) -> &[u64] {
        &self.irr
    }
    pub fn theta(&self) -> &FieldElement {
        &self.theta
    }
    /// The `q` elements of GF(q) sorted by encoding.
    pub fn subfield_elements(&self) -> &[FieldElement] {
        &self.subfield
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    pub fn constant(&self, c: u64) -> FieldElement {
        let mut z = self.zero();
        z.coeffs[0] = c % self.p;
        z
    }

    /// The class of `x`.
    pub fn x(&self) -> FieldElement {
        self.element(self.p % self.size)
    }

    /// Element with integer encoding `enc`, reduced modulo the field size.
    pub fn element(&self, enc: u64) -> FieldElement {
        FieldElement { coeffs: digits(enc % self.size, self.p, self.degree()) }
    }

    pub fn encode(&self, z: &FieldElement) -> u64 {
        z.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Builds an element from coefficients (constant term first); missing
    /// high coefficients are zero.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.degree() {
            return Err(Error::InvalidInput(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.degree()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::InvalidInput(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        let mut z = self.zero();
        z.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(z)
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % self.p).collect();
        FieldElement { coeffs }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| (x + self.p - y) % self.p)
            .collect();
        FieldElement { coeffs }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let p = self.p;
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for top in (d..prod.len()).rev() {
            let t = prod[top];
            if t == 0 {
                continue;
            }
            let shift = top - d;
            for j in 0..d {
                prod[shift + j] = (prod[shift + j] + t * (p - self.irr[j])) % p;
            }
            prod[top] = 0;
        }
        prod.truncate(d);
        FieldElement { coeffs: prod }
    }

    /// Square-and-multiply; for nonzero bases the exponent is reduced mod
    /// the group order first.
    pub fn pow(&self, base: &FieldElement, exp: u64) -> FieldElement {
        if base.is_zero() {
            return if exp == 0 { self.one() } else { self.zero() };
        }
        let mut e = exp % self.order;
        let mut acc = self.one();
        let mut b = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.pow(a, self.order - 1))
    }

    /// True when `z` has multiplicative order exactly `q^h - 1`.
    pub fn is_generator(&self, z: &FieldElement) -> bool {
        if z.is_zero() || self.pow(z, self.order) != self.one() {
            return false;
        }
        let one = self.one();
        self.order_factors.iter().all(|&r| self.pow(z, self.order / r) != one)
    }

    /// First element in encoding order of full multiplicative order.
    pub fn find_generator(&self) -> FieldElement {
        (1..self.size)
            .map(|enc| self.element(enc))
            .find(|z| self.is_generator(z))
            .expect("the multiplicative group of a finite field is cyclic")
    }

    /// GF(q) as `{0} ∪ <theta^((q^h-1)/(q-1))>`, sorted by encoding.
    fn derive_subfield(&self) -> Vec<FieldElement> {
        let q = self.q();
        let g = self.pow(&self.theta, self.order / (q - 1));
        let mut out = Vec::with_capacity(q as usize);
        out.push(self.zero());
        let mut z = self.one();
        for _ in 0..q - 1 {
            out.push(z.clone());
            z = self.mul(&z, &g);
        }
        out.sort_by_key(|z| self.encode(z));
        out
    }

    /// Every `z` with `z^q = z`, found by scanning the whole field.
    pub fn subfield_by_scan(&self) -> Vec<FieldElement> {
        let q = self.q();
        (0..self.size)
            .map(|enc| self.element(enc))
            .filter(|z| self.pow(z, q) == *z)
            .collect()
    }

    /// Exponent `e` in `[0, q^h - 2]` with `theta^e = z`.
    pub fn dlog(&self, z: &FieldElement) -> Result<u64> {
        if self.order <= self.config.table_threshold {
            self.dlog_table(z)
        } else {
            self.dlog_bsgs(z)
        }
    }

    /// Discrete log through the full power table (built on first use).
    pub fn dlog_table(&self, z: &FieldElement) -> Result<u64> {
        if z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let table = self.table.get_or_init(|| {
            let mut table = vec![u32::MAX; self.size as usize];
            let mut w = self.one();
            for e in 0..self.order {
                table[self.encode(&w) as usize] = e as u32;
                w = self.mul(&w, &self.theta);
            }
            table
        });
        Ok(table[self.encode(z) as usize] as u64)
    }

    /// Discrete log by baby-step giant-step.
    pub fn dlog_bsgs(&self, z: &FieldElement) -> Result<u64> {
        if z.is_zero() {
            return Err(Error::ZeroElement);
        }
        let bsgs = self.bsgs.get_or_init(|| {
            let step = arith::integer_root(self.order - 1, 2) + 1;
            let mut baby = HashMap::with_capacity(step as usize);
            let mut w = self.one();
            for j in 0..step {
                baby.entry(self.encode(&w)).or_insert(j);
                w = self.mul(&w, &self.theta);
            }
            // w = theta^step here
            let giant = self.inv(&w).expect("theta is nonzero");
            Bsgs { step, baby, giant }
        });
        let mut gamma = z.clone();
        for i in 0..=bsgs.step {
            if let Some(&j) = bsgs.baby.get(&self.encode(&gamma)) {
                return Ok((i * bsgs.step + j) % self.order);
            }
            gamma = self.mul(&gamma, &bsgs.giant);
        }
        unreachable!("every nonzero element is a power of the generator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force irreducibility: no monic factor of degree 1..=d/2.
    fn irreducible_by_division(f: &[u64], p: u64) -> bool {
        let d = f.len() - 1;
        for e in 1..=d / 2 {
            for enc in 0..p.pow(e as u32) {
                let mut g = digits(enc, p, e);
                g.push(1);
                if poly_rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(find_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(find_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert!(find_irreducible(4, 2).is_err());
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for (p, d) in [(2u64, 1usize), (2, 2), (2, 3), (2, 4), (2, 6), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            for enc in 0..p.pow(d as u32) {
                let mut f = digits(enc, p, d);
                f.push(1);
                assert_eq!(is_irreducible(&f, p), irreducible_by_division(&f, p), "p={p} f={f:?}");
            }
        }
    }

    #[test]
    fn tower_sizes() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!((t.size(), t.q(), t.order()), (4, 2, 3));
        let t = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!((t.size(), t.q(), t.order()), (9, 3, 8));
        let t = FieldTower::new(2, 2, 2).unwrap();
        assert_eq!((t.size(), t.q(), t.order()), (16, 4, 15));
        assert_eq!(t.subfield_elements().len(), 4);
        assert_eq!(t.subfield_by_scan(), t.subfield_elements());
    }

    #[test]
    fn tower_errors() {
        assert!(matches!(FieldTower::new(4, 1, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(FieldTower::new(3, 1, 1), Err(Error::InvalidInput(_))));
        assert!(matches!(FieldTower::new(2, 0, 2), Err(Error::InvalidInput(_))));
        assert!(matches!(FieldTower::new(2, 25, 1 + 1), Err(Error::CeilingExceeded { .. })));
        assert!(matches!(FieldTower::new(4099, 1, 2), Err(Error::CeilingExceeded { .. })));
    }

    #[test]
    fn arithmetic_examples() {
        let gf4 = FieldTower::new(2, 1, 2).unwrap();
        let x = gf4.x();
        let x1 = gf4.add(&x, &gf4.one());
        assert_eq!(gf4.mul(&x, &x1), gf4.one());

        let gf9 = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(gf9.modulus(), &[1, 0, 1]);
        let x1 = gf9.add(&gf9.x(), &gf9.one());
        assert_eq!(gf9.mul(&x1, &x1), gf9.from_coeffs(&[0, 2]).unwrap());
        let z = gf9.element(7);
        assert_eq!(gf9.mul(&gf9.one(), &z), z);
        assert_eq!(gf9.inv(&gf9.zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn generator_examples() {
        let gf4 = FieldTower::new(2, 1, 2).unwrap();
        assert_eq!(*gf4.theta(), gf4.x());
        let gf9 = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(*gf9.theta(), gf9.add(&gf9.x(), &gf9.one()));
        let gf8 = FieldTower::new(2, 1, 3).unwrap();
        assert_eq!(gf8.modulus(), &[1, 1, 0, 1]);
        assert_eq!(*gf8.theta(), gf8.x());
    }

    /// Multiplicative order by direct powering.
    fn order_by_powering(t: &FieldTower, z: &FieldElement) -> u64 {
        let mut w = z.clone();
        let mut n = 1;
        while w != t.one() {
            w = t.mul(&w, z);
            n += 1;
        }
        n
    }

    #[test]
    fn generator_is_first_full_order_element() {
        for (p, k, h) in [(2, 1, 2), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 1, 4), (3, 1, 3)] {
            let t = FieldTower::new(p, k, h).unwrap();
            let first = (1..t.size())
                .map(|e| t.element(e))
                .find(|z| order_by_powering(&t, z) == t.order())
                .unwrap();
            assert_eq!(&first, t.theta());
        }
    }

    #[test]
    fn dlog_examples() {
        let gf9 = FieldTower::new(3, 1, 2).unwrap();
        assert_eq!(gf9.dlog(&gf9.one()).unwrap(), 0);
        assert_eq!(gf9.dlog(gf9.theta()).unwrap(), 1);
        assert_eq!(gf9.dlog(&gf9.x()).unwrap(), 6);
        assert_eq!(gf9.dlog(&gf9.zero()), Err(Error::ZeroElement));
        assert_eq!(gf9.dlog_bsgs(&gf9.zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn table_and_bsgs_agree() {
        for (p, k, h) in [(2, 1, 2), (3, 1, 2), (2, 2, 2), (5, 1, 3), (2, 1, 10), (7, 1, 3)] {
            let t = FieldTower::new(p, k, h).unwrap();
            for enc in 1..t.size() {
                let z = t.element(enc);
                let a = t.dlog_table(&z).unwrap();
                assert_eq!(a, t.dlog_bsgs(&z).unwrap());
                assert_eq!(t.pow(t.theta(), a), z);
            }
        }
    }

    #[test]
    fn bsgs_path_above_threshold() {
        let config = TowerConfig { table_threshold: 10, ..TowerConfig::default() };
        let t = FieldTower::with_config(3, 1, 3, config).unwrap();
        for e in 0..t.order() {
            assert_eq!(t.dlog(&t.pow(t.theta(), e)).unwrap(), e);
        }
    }

    #[test]
    fn subfield_examples() {
        let t = FieldTower::new(2, 1, 2).unwrap();
        let encs: Vec<u64> = t.subfield_elements().iter().map(|z| t.encode(z)).collect();
        assert_eq!(encs, vec![0, 1]);
        let t = FieldTower::new(3, 1, 2).unwrap();
        let encs: Vec<u64> = t.subfield_elements().iter().map(|z| t.encode(z)).collect();
        assert_eq!(encs, vec![0, 1, 2]);
        let t = FieldTower::new(2, 2, 2).unwrap();
        let encs: Vec<u64> = t.subfield_elements().iter().map(|z| t.encode(z)).collect();
        assert_eq!(encs.len(), 4);
        assert!(encs.contains(&0) && encs.contains(&1));
    }
}
