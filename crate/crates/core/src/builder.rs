//! Finite-field construction of systems for a linear form with multiplicity
//! at most `h!`, plus the lower-bound witnesses derived from it.
//!
//! For an admissible prime `q` (every `c_i` coprime to `q^h - 1`) and a
//! generator `theta` of GF(q^h)^×, put `d_j = dlog(theta - lambda_j)` over the
//! subfield elements `lambda_j` and `a_{i,j} = c_i^{-1} d_j mod (q^h - 1)`.
//! Then `A_i = {a_{i,j}}` gives `theta^(c_i a_{i,j}) = theta - lambda_j`.

use serde::{Deserialize, Serialize};

use crate::admissibility::check_admissible;
use crate::arith::{factorial, integer_root, inv_mod, is_prime, prime_power, primes_up_to};
use crate::classical::{bose_chowla_exponents, bose_chowla_set, is_bhg, EnumerationLimits, SidonSet};
use crate::error::{Error, Result};
use crate::ff::{FieldTower, TowerConfig};
use crate::linear_form::{system_profile, LinearForm, SidonSystem};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Allow prime powers `q = p^k`. Such results carry `proven: false`.
    pub experimental_prime_power: bool,
    pub tower: TowerConfig,
    pub limits: EnumerationLimits,
}

/// Everything needed to re-check a construction without computing discrete
/// logarithms: the field is rebuilt from `(p, k, h)` and each relation
/// `theta^(c_i a_{i,j}) = theta - lambda_j` is tested by powering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub q: u64,
    pub p: u64,
    pub k: u32,
    pub h: u32,
    /// Field modulus, constant term first.
    pub modulus: Vec<u64>,
    /// Integer encoding of the generator.
    pub theta: u64,
    pub group_order: u64,
    pub phi: Vec<i64>,
    /// Encodings of `lambda_1 < … < lambda_q`.
    pub subfield: Vec<u64>,
    /// `c_i^{-1} mod (q^h - 1)`.
    pub inverses: Vec<u64>,
    /// `exponents[i][j] = a_{i,j}`.
    pub exponents: Vec<Vec<u64>>,
    pub verified_multiplicity: u64,
    pub multiplicity_bound: u64,
    /// False for prime-power `q`, where the bound is not proven.
    pub proven: bool,
}

impl ConstructionCertificate {
    /// Independent re-check of every recorded relation.
    pub fn recheck(&self, limits: &EnumerationLimits) -> Result<()> {
        let fail = |msg: String| Err(Error::VerificationFailed(msg));
        let tower = FieldTower::new(self.p, self.k, self.h)?;
        if tower.modulus() != self.modulus.as_slice() {
            return fail("field modulus differs".into());
        }
        let theta = tower.element(self.theta);
        if !tower.is_generator(&theta) {
            return fail(format!("theta = {} is not a generator", self.theta));
        }
        let n = tower.order();
        if self.group_order != n || self.q != tower.q() {
            return fail("field parameters differ".into());
        }
        let subfield: Vec<_> = self.subfield.iter().map(|&e| tower.element(e)).collect();
        if subfield.len() as u64 != self.q || subfield.iter().any(|z| tower.pow(z, self.q) != *z) {
            return fail("subfield listing is wrong".into());
        }
        for (i, (&c, row)) in self.phi.iter().zip(&self.exponents).enumerate() {
            let c_mod = c.rem_euclid(n as i64) as u64;
            if (c_mod as u128 * self.inverses[i] as u128 % n as u128) != 1 % n as u128 {
                return fail(format!("inverse of c_{} is wrong", i + 1));
            }
            for (j, &a) in row.iter().enumerate() {
                if a == 0 || a >= n {
                    return fail(format!("a_{{{},{}}} = {a} out of range", i + 1, j + 1));
                }
                let lhs = tower.pow(&theta, (c_mod as u128 * a as u128 % n as u128) as u64);
                if lhs != tower.sub(&theta, &subfield[j]) {
                    return fail(format!("relation fails at (i, j) = ({}, {})", i + 1, j + 1));
                }
            }
        }
        let phi = LinearForm::new(self.phi.clone())?;
        let system = SidonSystem::new(
            self.exponents.iter().map(|row| row.iter().map(|&a| a as i64).collect()).collect(),
        )?;
        let measured = system_profile(&phi, &system, limits)?.max_multiplicity;
        if measured != self.verified_multiplicity {
            return fail(format!("multiplicity {measured} differs from recorded {}", self.verified_multiplicity));
        }
        Ok(())
    }
}

/// Builds the system for `phi` over GF(q^h) and verifies its multiplicity
/// exhaustively.
pub fn build_system(
    phi: &LinearForm,
    q: u64,
    opts: &BuildOptions,
) -> Result<(SidonSystem, ConstructionCertificate)> {
    let (p, k) = if is_prime(q) {
        (q, 1)
    } else if opts.experimental_prime_power {
        prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?
    } else {
        return Err(Error::InvalidInput(format!("q = {q} is not prime")));
    };
    let h = phi.h();
    if let Err((index, gcd)) = check_admissible(phi, q) {
        return Err(Error::NotAdmissible { q, index: index + 1, coefficient: phi.coeffs()[index], gcd });
    }
    let tower = FieldTower::with_config(p, k, h as u32, opts.tower)?;
    let n = tower.order();
    let logs = bose_chowla_exponents(&tower)?;

    let mut inverses = Vec::with_capacity(h);
    let mut exponents = Vec::with_capacity(h);
    for (i, &c) in phi.coeffs().iter().enumerate() {
        let inv = inv_mod(c.rem_euclid(n as i64) as u64, n).ok_or(Error::NotAdmissible {
            q,
            index: i + 1,
            coefficient: c,
            gcd: crate::arith::gcd(c.unsigned_abs(), n),
        })?;
        let row: Vec<u64> = logs.iter().map(|&d| (inv as u128 * d as u128 % n as u128) as u64).collect();
        if row.contains(&0) {
            return Err(Error::VerificationFailed(format!("exponent 0 in A_{}", i + 1)));
        }
        inverses.push(inv);
        exponents.push(row);
    }

    let bound = factorial(h as u64);
    let system = SidonSystem::new(
        exponents.iter().map(|row| row.iter().map(|&a| a as i64).collect()).collect(),
    )?
    .with_declared_g(Some(bound));
    let report = system_profile(phi, &system, &opts.limits)?;
    let proven = k == 1;
    if proven && report.max_multiplicity > bound {
        return Err(Error::VerificationFailed(format!(
            "multiplicity {} exceeds h! = {bound}",
            report.max_multiplicity
        )));
    }
    let certificate = ConstructionCertificate {
        q,
        p,
        k,
        h: h as u32,
        modulus: tower.modulus().to_vec(),
        theta: tower.encode(tower.theta()),
        group_order: n,
        phi: phi.coeffs().to_vec(),
        subfield: tower.subfield_elements().iter().map(|z| tower.encode(z)).collect(),
        inverses,
        exponents,
        verified_multiplicity: report.max_multiplicity,
        multiplicity_bound: bound,
        proven,
    };
    Ok((system, certificate))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemWitness {
    pub q: u64,
    pub system: SidonSystem,
    pub certificate: ConstructionCertificate,
}

/// Largest admissible prime `q` with `q^h - 2 <= n`, with its built system;
/// certifies `F_{φ,h!}(n) >= q`.
pub fn lower_bound_witness(phi: &LinearForm, n: u64, opts: &BuildOptions) -> Result<Option<SystemWitness>> {
    let h = phi.h() as u32;
    let top = integer_root(n.saturating_add(2), h);
    let Some(q) = primes_up_to(top)
        .into_iter()
        .rev()
        .find(|&q| check_admissible(phi, q).is_ok())
    else {
        return Ok(None);
    };
    let (system, certificate) = build_system(phi, q, &BuildOptions { experimental_prime_power: false, ..*opts })?;
    Ok(Some(SystemWitness { q, system, certificate }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalWitness {
    pub q: u64,
    pub p: u64,
    pub k: u32,
    pub h: usize,
    pub set: SidonSet,
}

/// Largest prime power `q` with `q^h - 2 <= n` and its Bose–Chowla set,
/// verified B_h modulo `q^h - 1`; certifies `F_h(n) >= q`.
pub fn classical_lower_bound(h: usize, n: u64, opts: &BuildOptions) -> Result<Option<ClassicalWitness>> {
    if h < 2 {
        return Err(Error::InvalidInput(format!("order h = {h} must be at least 2")));
    }
    let top = integer_root(n.saturating_add(2), h as u32);
    let Some((q, (p, k))) = (2..=top).rev().find_map(|q| prime_power(q).map(|pk| (q, pk))) else {
        return Ok(None);
    };
    let tower = FieldTower::with_config(p, k, h as u32, opts.tower)?;
    let set = bose_chowla_set(&tower)?;
    let check = is_bhg(&set, h, 1, Some(tower.order()), &opts.limits)?;
    if !check.holds {
        return Err(Error::VerificationFailed(format!(
            "Bose-Chowla set for q = {q} has modular multiplicity {}",
            check.max_count
        )));
    }
    Ok(Some(ClassicalWitness { q, p, k, h, set }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub n: u64,
    pub q: Option<u64>,
    /// `q / n^(1/h)`.
    pub ratio: Option<f64>,
    /// Exact test of `q^h >= n`, i.e. ratio at least 1.
    pub ratio_at_least_one: Option<bool>,
}

/// One lower-bound witness per `n`, with the normalized ratio.
pub fn density_table(phi: &LinearForm, n_values: &[u64], opts: &BuildOptions) -> Result<Vec<DensityRow>> {
    let h = phi.h() as u32;
    n_values
        .iter()
        .map(|&n| {
            let q = lower_bound_witness(phi, n, opts)?.map(|w| w.q);
            Ok(DensityRow {
                n,
                q,
                ratio: q.map(|q| q as f64 / (n as f64).powf(1.0 / h as f64)),
                ratio_at_least_one: q.map(|q| (q as u128).pow(h) >= n as u128),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_form::counting_bound;

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::new(c.to_vec()).unwrap()
    }

    fn opts() -> BuildOptions {
        BuildOptions::default()
    }

    #[test]
    fn unit_form_reproduces_classical_set() {
        let (s, cert) = build_system(&form(&[1, 1]), 3, &opts()).unwrap();
        assert_eq!(s.sets(), &[vec![1, 6, 7], vec![1, 6, 7]]);
        assert!(cert.verified_multiplicity <= 2);
        assert!(cert.proven);
        cert.recheck(&EnumerationLimits::default()).unwrap();
    }

    #[test]
    fn form_1_5_over_7() {
        let phi = form(&[1, 5]);
        let (s, cert) = build_system(&phi, 7, &opts()).unwrap();
        for set in s.sets() {
            assert_eq!(set.len(), 7);
            assert!(set.iter().all(|&a| (1..=47).contains(&a)));
        }
        assert!(cert.verified_multiplicity <= 2);
        assert_eq!(cert.inverses, vec![1, 29]);
        let cb = counting_bound(&phi, &s, 2, 47, &EnumerationLimits::default()).unwrap();
        assert_eq!((cb.product_size, cb.ceiling), (49, 1130));
        assert!(cb.holds);
        cert.recheck(&EnumerationLimits::default()).unwrap();
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            build_system(&form(&[1, 5]), 11, &opts()).unwrap_err(),
            Error::NotAdmissible { q: 11, index: 2, coefficient: 5, gcd: 5 }
        );
        assert!(matches!(build_system(&form(&[1, 1]), 4, &opts()), Err(Error::InvalidInput(_))));
        assert!(matches!(build_system(&form(&[1, 1]), 6, &opts()), Err(Error::InvalidInput(_))));
        assert!(matches!(build_system(&form(&[1, 1]), 4099, &opts()), Err(Error::CeilingExceeded { .. })));
    }

    #[test]
    fn experimental_prime_power_is_labeled() {
        let o = BuildOptions { experimental_prime_power: true, ..opts() };
        let (s, cert) = build_system(&form(&[1, 1]), 4, &o).unwrap();
        assert!(!cert.proven);
        assert_eq!(s.sets()[0].len(), 4);
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let (_, mut cert) = build_system(&form(&[1, 5]), 7, &opts()).unwrap();
        cert.exponents[1][3] = (cert.exponents[1][3] + 1) % cert.group_order;
        assert!(cert.recheck(&EnumerationLimits::default()).is_err());
    }

    #[test]
    fn witness_examples() {
        let w = lower_bound_witness(&form(&[1, 1]), 47, &opts()).unwrap().unwrap();
        assert_eq!(w.q, 7);
        let w = lower_bound_witness(&form(&[1, 5]), 50, &opts()).unwrap().unwrap();
        assert_eq!(w.q, 7);
        assert_eq!(lower_bound_witness(&form(&[1, 1]), 2, &opts()).unwrap().unwrap().q, 2);
        assert!(lower_bound_witness(&form(&[1, 1]), 1, &opts()).unwrap().is_none());
    }

    #[test]
    fn witness_is_monotone() {
        let phi = form(&[1, 5]);
        let mut last = 0;
        for n in 0..200 {
            let q = lower_bound_witness(&phi, n, &opts()).unwrap().map_or(0, |w| w.q);
            assert!(q >= last);
            last = q;
        }
    }

    #[test]
    fn classical_examples() {
        let w = classical_lower_bound(2, 14, &opts()).unwrap().unwrap();
        assert_eq!((w.q, w.p, w.k), (4, 2, 2));
        assert_eq!(w.set.len(), 4);
        assert!(w.set.max().unwrap() <= 14);
        let w = classical_lower_bound(2, 7, &opts()).unwrap().unwrap();
        assert_eq!(w.set.elements(), &[1, 6, 7]);
        let w = classical_lower_bound(3, 6, &opts()).unwrap().unwrap();
        assert_eq!(w.q, 2);
        assert_eq!(w.set.len(), 2);
        assert!(w.set.max().unwrap() <= 6);
        assert!(classical_lower_bound(2, 1, &opts()).unwrap().is_none());
    }

    #[test]
    fn density_examples() {
        let rows = density_table(&form(&[1, 1]), &[47, 119, 167], &opts()).unwrap();
        let qs: Vec<_> = rows.iter().map(|r| r.q.unwrap()).collect();
        assert_eq!(qs, vec![7, 11, 13]);
        let expect = [1.021, 1.008, 1.006];
        for (r, e) in rows.iter().zip(expect) {
            assert!((r.ratio.unwrap() - e).abs() < 5e-4, "{:?}", r);
            assert_eq!(r.ratio_at_least_one, Some(true));
        }
        let rows = density_table(&form(&[1, 5]), &[1, 47], &opts()).unwrap();
        assert_eq!(rows[0].q, None);
        assert_eq!(rows[0].ratio, None);
        assert_eq!(rows[1].ratio.unwrap(), 7.0 / 47f64.sqrt());
    }
}
