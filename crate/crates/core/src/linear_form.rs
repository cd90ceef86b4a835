//! Linear forms `φ = c_1 x_1 + … + c_h x_h`, the representation function of a
//! system `(A_1, …, A_h)` under `φ`, translation, and the counting bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classical::{convolve, for_each_tuple, EnumerationLimits};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a linear form needs at least 2 coefficients, got {}",
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|&c| c == 0) {
            return Err(Error::InvalidInput(format!("coefficient c_{} is zero", i + 1)));
        }
        Ok(LinearForm { coeffs })
    }

    /// The form `x_1 + … + x_h`.
    pub fn unit(h: usize) -> Result<Self> {
        Self::new(vec![1; h])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn h(&self) -> usize {
        self.coeffs.len()
    }

    /// `C = Σ |c_i|`.
    pub fn c_norm(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn evaluate(&self, tuple: &[i64]) -> Result<i64> {
        if tuple.len() != self.h() {
            return Err(Error::InvalidInput(format!(
                "tuple of length {} for a form with h = {}",
                tuple.len(),
                self.h()
            )));
        }
        Ok(self.coeffs.iter().zip(tuple).map(|(c, a)| c * a).sum())
    }
}

impl TryFrom<Vec<i64>> for LinearForm {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        LinearForm::new(v)
    }
}

impl From<LinearForm> for Vec<i64> {
    fn from(f: LinearForm) -> Self {
        f.coeffs
    }
}

/// An h-tuple of nonempty finite integer sets, each kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SidonSystem {
    sets: Vec<Vec<i64>>,
    declared_g: Option<u64>,
}

impl SidonSystem {
    /// Sorts every set; rejects empty sets and duplicated elements.
    pub fn new(sets: Vec<Vec<i64>>) -> Result<Self> {
        let mut sets = sets;
        for (i, s) in sets.iter_mut().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput(format!("set A_{} is empty", i + 1)));
            }
            s.sort_unstable();
            if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidInput(format!(
                    "set A_{} contains {} twice",
                    i + 1,
                    w[0]
                )));
            }
        }
        Ok(SidonSystem { sets, declared_g: None })
    }

    pub fn with_declared_g(mut self, g: Option<u64>) -> Self {
        self.declared_g = g;
        self
    }

    pub fn declared_g(&self) -> Option<u64> {
        self.declared_g
    }

    pub fn sets(&self) -> &[Vec<i64>] {
        &self.sets
    }

    pub fn h(&self) -> usize {
        self.sets.len()
    }

    /// `∏ |A_i|`.
    pub fn product_size(&self) -> u128 {
        self.sets.iter().map(|s| s.len() as u128).product()
    }

    fn check_form(&self, phi: &LinearForm) -> Result<()> {
        if self.h() != phi.h() {
            return Err(Error::InvalidInput(format!(
                "system has {} sets but the form has h = {}",
                self.h(),
                phi.h()
            )));
        }
        Ok(())
    }
}

/// On-disk form of a system: `{"phi": [...], "sets": [[...], ...], "g": int|null}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub phi: Vec<i64>,
    pub sets: Vec<Vec<i64>>,
    #[serde(default)]
    pub g: Option<u64>,
}

impl SystemSpec {
    pub fn from_parts(phi: &LinearForm, system: &SidonSystem) -> Self {
        SystemSpec {
            phi: phi.coeffs().to_vec(),
            sets: system.sets().to_vec(),
            g: system.declared_g(),
        }
    }

    pub fn into_parts(self) -> Result<(LinearForm, SidonSystem)> {
        let phi = LinearForm::new(self.phi)?;
        let system = SidonSystem::new(self.sets)?.with_declared_g(self.g);
        system.check_form(&phi)?;
        Ok((phi, system))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityWitness {
    pub value: i64,
    pub tuples: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

impl BoundCheck {
    fn le(name: &str, lhs: i128, rhs: i128) -> Self {
        BoundCheck { name: name.to_string(), lhs, rhs, holds: lhs <= rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_multiplicity: u64,
    pub witness: Option<MultiplicityWitness>,
    pub product_size: u128,
    pub image_size: u64,
    pub bound_checks: Vec<BoundCheck>,
    /// `R_{A,φ}` over the image; not serialized with the report.
    #[serde(skip)]
    pub profile: BTreeMap<i64, u64>,
}

impl VerificationReport {
    pub fn count(&self, w: i64) -> u64 {
        self.profile.get(&w).copied().unwrap_or(0)
    }

    pub fn checks_hold(&self) -> bool {
        self.bound_checks.iter().all(|b| b.holds)
    }
}

fn profile_direct(phi: &LinearForm, sets: &[Vec<i64>], coords: std::ops::Range<usize>) -> BTreeMap<i64, u64> {
    let coeffs = &phi.coeffs()[coords.clone()];
    let sets = &sets[coords];
    let dims: Vec<usize> = sets.iter().map(Vec::len).collect();
    let mut counts = BTreeMap::new();
    for_each_tuple(&dims, |idx| {
        let w: i64 = idx.iter().enumerate().map(|(i, &j)| coeffs[i] * sets[i][j]).sum();
        *counts.entry(w).or_insert(0) += 1;
    });
    counts
}

/// All tuples of the system with `φ(tuple) = w`, found by enumerating the
/// first h-1 coordinates and solving for the last.
fn tuples_at(phi: &LinearForm, sets: &[Vec<i64>], w: i64) -> Vec<Vec<i64>> {
    let h = sets.len();
    let last = phi.coeffs()[h - 1];
    let dims: Vec<usize> = sets[..h - 1].iter().map(Vec::len).collect();
    let mut out = Vec::new();
    for_each_tuple(&dims, |idx| {
        let partial: i64 = idx.iter().enumerate().map(|(i, &j)| phi.coeffs()[i] * sets[i][j]).sum();
        let rest = w - partial;
        if rest % last == 0 && sets[h - 1].binary_search(&(rest / last)).is_ok() {
            let mut t: Vec<i64> = idx.iter().enumerate().map(|(i, &j)| sets[i][j]).collect();
            t.push(rest / last);
            out.push(t);
        }
    });
    out.sort();
    out
}

/// Full profile `R_{A,φ}` and summary of a system.
pub fn system_profile(
    phi: &LinearForm,
    system: &SidonSystem,
    limits: &EnumerationLimits,
) -> Result<VerificationReport> {
    system.check_form(phi)?;
    let h = phi.h();
    let sets = system.sets();
    let product = system.product_size();
    let profile = if product <= limits.tuple_ceiling {
        profile_direct(phi, sets, 0..h)
    } else if limits.meet_in_middle {
        let split = h.div_ceil(2);
        let left: u128 = sets[..split].iter().map(|s| s.len() as u128).product();
        let right: u128 = sets[split..].iter().map(|s| s.len() as u128).product();
        if left.max(right) > limits.tuple_ceiling {
            return Err(Error::CeilingExceeded {
                what: "half-system tuple count",
                value: left.max(right),
                ceiling: limits.tuple_ceiling,
            });
        }
        convolve(&profile_direct(phi, sets, 0..split), &profile_direct(phi, sets, split..h))
    } else {
        return Err(Error::CeilingExceeded {
            what: "system tuple count",
            value: product,
            ceiling: limits.tuple_ceiling,
        });
    };

    let (value, max_multiplicity) = profile
        .iter()
        .fold((0i64, 0u64), |best, (&w, &c)| if c > best.1 { (w, c) } else { best });
    let image_size = profile.len() as u64;
    let mass: u128 = profile.values().map(|&c| c as u128).sum();
    let mut bound_checks = vec![BoundCheck {
        name: "product_size == sum of counts".into(),
        lhs: product as i128,
        rhs: mass as i128,
        holds: product == mass,
    }];
    if let Some(g) = system.declared_g() {
        bound_checks.push(BoundCheck::le("max_multiplicity <= g", max_multiplicity as i128, g as i128));
    }
    bound_checks.push(BoundCheck::le(
        "product_size <= max_multiplicity * image_size",
        product as i128,
        max_multiplicity as i128 * image_size as i128,
    ));
    let witness = (max_multiplicity > 0).then(|| MultiplicityWitness { value, tuples: tuples_at(phi, sets, value) });
    Ok(VerificationReport { max_multiplicity, witness, product_size: product, image_size, bound_checks, profile })
}

/// Whether every integer has at most `g` representations.
pub fn is_phi_sidon(phi: &LinearForm, system: &SidonSystem, g: u64, limits: &EnumerationLimits) -> Result<bool> {
    if g < 1 {
        return Err(Error::InvalidInput("multiplicity g must be at least 1".into()));
    }
    Ok(system_profile(phi, system, limits)?.max_multiplicity <= g)
}

/// `(A_1 + t_1, …, A_h + t_h)` and `t* = φ(t)`.
pub fn translate(system: &SidonSystem, t: &[i64], phi: &LinearForm) -> Result<(SidonSystem, i64)> {
    system.check_form(phi)?;
    let t_star = phi.evaluate(t)?;
    let sets = system
        .sets()
        .iter()
        .zip(t)
        .map(|(s, ti)| s.iter().map(|a| a + ti).collect())
        .collect();
    let shifted = SidonSystem::new(sets)?.with_declared_g(system.declared_g());
    Ok((shifted, t_star))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingBound {
    pub n: i64,
    pub g: u64,
    pub c_norm: i64,
    pub product_size: u128,
    /// `g (2 C n + 1)`.
    pub ceiling: u128,
    pub image_size: u64,
    pub image_min: i64,
    pub image_max: i64,
    pub checks: Vec<BoundCheck>,
    pub holds: bool,
}

/// Checks `∏|A_i| ≤ g(2Cn+1)` for a system inside the box `[-n, n]`, along
/// with `φ(A) ⊆ [-Cn, Cn]` and `|φ(A)| ≤ 2Cn+1`.
pub fn counting_bound(
    phi: &LinearForm,
    system: &SidonSystem,
    g: u64,
    n: i64,
    limits: &EnumerationLimits,
) -> Result<CountingBound> {
    system.check_form(phi)?;
    if n < 1 {
        return Err(Error::InvalidInput(format!("box bound n = {n} must be positive")));
    }
    if let Some(&a) = system.sets().iter().flatten().find(|a| a.abs() > n) {
        return Err(Error::BoxBoundViolated { value: a, bound: n });
    }
    let report = system_profile(phi, system, limits)?;
    if report.max_multiplicity > g {
        return Err(Error::MultiplicityMismatch { declared: g, measured: report.max_multiplicity });
    }
    let c = phi.c_norm();
    let cn = (c as i128) * (n as i128);
    let window = 2 * cn + 1;
    let ceiling = g as u128 * window as u128;
    let image_min = *report.profile.keys().next().expect("nonempty system");
    let image_max = *report.profile.keys().next_back().expect("nonempty system");
    let checks = vec![
        BoundCheck::le("product_size <= g(2Cn+1)", report.product_size as i128, ceiling as i128),
        BoundCheck::le("-Cn <= min image", -cn, image_min as i128),
        BoundCheck::le("max image <= Cn", image_max as i128, cn),
        BoundCheck::le("image_size <= 2Cn+1", report.image_size as i128, window),
        BoundCheck::le("product_size <= g * image_size", report.product_size as i128, g as i128 * report.image_size as i128),
    ];
    let holds = checks.iter().all(|b| b.holds);
    Ok(CountingBound {
        n,
        g,
        c_norm: c,
        product_size: report.product_size,
        ceiling,
        image_size: report.image_size,
        image_min,
        image_max,
        checks,
        holds,
    })
}

/// `(2 g C)^(1/h)`, the upper-density constant for multiplicity-`g` systems.
pub fn density_constant(phi: &LinearForm, g: u64) -> f64 {
    (2.0 * g as f64 * phi.c_norm() as f64).powf(1.0 / phi.h() as f64)
}

/// Digit sets `[0, d_i - 1]` with place-value form `(1, d_1, d_1 d_2, …)`,
/// whose sums hit each of `0..∏d_i` exactly once.
pub fn mixed_radix_system(radices: &[i64]) -> Result<(LinearForm, SidonSystem)> {
    if let Some(&d) = radices.iter().find(|&&d| d < 2) {
        return Err(Error::InvalidInput(format!("radix {d} is below 2")));
    }
    let mut coeffs = Vec::with_capacity(radices.len());
    let mut place: i64 = 1;
    for &d in radices {
        coeffs.push(place);
        place = place
            .checked_mul(d)
            .ok_or_else(|| Error::InvalidInput("radix product overflows".into()))?;
    }
    let phi = LinearForm::new(coeffs)?;
    let system = SidonSystem::new(radices.iter().map(|&d| (0..d).collect()).collect())?;
    Ok((phi, system))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: &[i64]) -> LinearForm {
        LinearForm::new(c.to_vec()).unwrap()
    }

    fn sys(sets: &[&[i64]]) -> SidonSystem {
        SidonSystem::new(sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    fn lim() -> EnumerationLimits {
        EnumerationLimits::default()
    }

    #[test]
    fn form_validation() {
        assert!(LinearForm::new(vec![1]).is_err());
        assert!(LinearForm::new(vec![1, 0]).is_err());
        assert_eq!(form(&[1, -5, 2]).c_norm(), 8);
        assert!(serde_json::from_str::<LinearForm>("[0, 1]").is_err());
    }

    #[test]
    fn system_validation() {
        assert!(SidonSystem::new(vec![vec![1], vec![]]).is_err());
        assert!(SidonSystem::new(vec![vec![1, 2, 1], vec![0]]).is_err());
        assert_eq!(sys(&[&[3, -1], &[0]]).sets()[0], vec![-1, 3]);
        let mismatch = system_profile(&form(&[1, 1, 1]), &sys(&[&[0], &[0]]), &lim());
        assert!(matches!(mismatch, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(form(&[1, 5]).evaluate(&[2, 3]).unwrap(), 17);
        assert_eq!(form(&[1, 1]).evaluate(&[0, 0]).unwrap(), 0);
        assert_eq!(form(&[1, 2]).evaluate(&[1, 2]).unwrap(), 5);
        assert!(form(&[1, 2]).evaluate(&[1]).is_err());
    }

    #[test]
    fn profile_examples() {
        let r = system_profile(&form(&[1, 2]), &sys(&[&[0, 1], &[0, 1, 2]]), &lim()).unwrap();
        assert_eq!(r.profile, (0..6).map(|w| (w, 1)).collect());
        assert_eq!(r.max_multiplicity, 1);

        let r = system_profile(&form(&[1, 1]), &sys(&[&[0, 1], &[0, 1]]), &lim()).unwrap();
        assert_eq!(r.count(1), 2);
        assert_eq!(r.max_multiplicity, 2);
        let w = r.witness.unwrap();
        assert_eq!(w.value, 1);
        assert_eq!(w.tuples, vec![vec![0, 1], vec![1, 0]]);

        let r = system_profile(&form(&[1, 1]), &sys(&[&[0], &[0]]), &lim()).unwrap();
        assert_eq!(r.profile, BTreeMap::from([(0, 1)]));
        assert!(r.checks_hold());
    }

    #[test]
    fn negative_coefficients_and_mitm() {
        let phi = form(&[3, -2, 1, -7]);
        let s = sys(&[&[-3, 0, 4, 9], &[1, 2, 6], &[-5, 5, 8, 11, 20], &[0, 2]]);
        let direct = system_profile(&phi, &s, &lim()).unwrap();
        let mitm = EnumerationLimits { tuple_ceiling: 20, meet_in_middle: true };
        let split = system_profile(&phi, &s, &mitm).unwrap();
        assert_eq!(direct, split);
        assert_eq!(direct.profile, split.profile);
        let strict = EnumerationLimits { tuple_ceiling: 20, meet_in_middle: false };
        assert!(matches!(system_profile(&phi, &s, &strict), Err(Error::CeilingExceeded { .. })));
        for t in &direct.witness.as_ref().unwrap().tuples {
            assert_eq!(phi.evaluate(t).unwrap(), direct.witness.as_ref().unwrap().value);
        }
    }

    #[test]
    fn phi_sidon_examples() {
        let (phi, s) = mixed_radix_system(&[2, 3]).unwrap();
        assert!(is_phi_sidon(&phi, &s, 1, &lim()).unwrap());
        let s = sys(&[&[0, 1], &[0, 1]]);
        assert!(!is_phi_sidon(&form(&[1, 1]), &s, 1, &lim()).unwrap());
        assert!(is_phi_sidon(&form(&[1, 1]), &s, 2, &lim()).unwrap());
        assert!(is_phi_sidon(&form(&[4, -9, 2]), &sys(&[&[7], &[-1], &[3]]), 1, &lim()).unwrap());
    }

    #[test]
    fn translate_examples() {
        let phi = form(&[1, 1]);
        let s = sys(&[&[0, 1], &[0, 3]]);
        let (same, t0) = translate(&s, &[0, 0], &phi).unwrap();
        assert_eq!((same, t0), (s.clone(), 0));

        let (moved, t_star) = translate(&s, &[1, -1], &phi).unwrap();
        assert_eq!(t_star, 0);
        assert_eq!(
            system_profile(&phi, &moved, &lim()).unwrap().profile,
            system_profile(&phi, &s, &lim()).unwrap().profile
        );

        let phi = form(&[1, 5]);
        let (moved, t_star) = translate(&sys(&[&[1], &[1]]), &[2, 3], &phi).unwrap();
        assert_eq!(t_star, 17);
        assert_eq!(system_profile(&phi, &moved, &lim()).unwrap().profile, BTreeMap::from([(23, 1)]));
    }

    #[test]
    fn counting_bound_examples() {
        let r = counting_bound(&form(&[1, 1]), &sys(&[&[1], &[1]]), 1, 1, &lim()).unwrap();
        assert_eq!((r.product_size, r.ceiling), (1, 5));
        assert!(r.holds);

        let s = sys(&[&[0, 1], &[0, 1]]);
        assert!(matches!(
            counting_bound(&form(&[1, 1]), &s, 1, 1, &lim()),
            Err(Error::MultiplicityMismatch { declared: 1, measured: 2 })
        ));
        assert!(matches!(
            counting_bound(&form(&[1, 1]), &sys(&[&[5], &[1]]), 1, 4, &lim()),
            Err(Error::BoxBoundViolated { value: 5, bound: 4 })
        ));
    }

    #[test]
    fn density_constant_examples() {
        assert!((density_constant(&form(&[1, 5]), 2) - 24f64.sqrt()).abs() < 1e-12);
        assert!((density_constant(&form(&[1, 5]), 2) - 4.89898).abs() < 1e-5);
        assert!((density_constant(&form(&[1, 1]), 1) - 2.0).abs() < 1e-12);
        let phi = form(&[2, -3, 1]);
        for g in 1..20 {
            assert!(density_constant(&phi, g) < density_constant(&phi, g + 1));
        }
    }

    #[test]
    fn mixed_radix_examples() {
        let (phi, s) = mixed_radix_system(&[2, 3]).unwrap();
        assert_eq!(phi.coeffs(), &[1, 2]);
        assert_eq!(system_profile(&phi, &s, &lim()).unwrap().profile, (0..6).map(|w| (w, 1)).collect());
        let (phi, _) = mixed_radix_system(&[2, 2, 2]).unwrap();
        assert_eq!(phi.coeffs(), &[1, 2, 4]);
        assert!(mixed_radix_system(&[2, 1]).is_err());
    }

    #[test]
    fn system_spec_roundtrip() {
        let json = r#"{"phi": [1, 5], "sets": [[3, 1], [2]], "g": 2}"#;
        let spec: SystemSpec = serde_json::from_str(json).unwrap();
        let (phi, s) = spec.into_parts().unwrap();
        assert_eq!(s.sets()[0], vec![1, 3]);
        assert_eq!(s.declared_g(), Some(2));
        let back = SystemSpec::from_parts(&phi, &s);
        assert_eq!(back, SystemSpec { phi: vec![1, 5], sets: vec![vec![1, 3], vec![2]], g: Some(2) });
        let nog: SystemSpec = serde_json::from_str(r#"{"phi": [1, 1], "sets": [[1], [1]], "g": null}"#).unwrap();
        assert_eq!(nog.g, None);
        let bad: SystemSpec = serde_json::from_str(r#"{"phi": [1, 1], "sets": [[1]]}"#).unwrap();
        assert!(bad.into_parts().is_err());
    }
}
