//! Representation functions of a single set, the B_h[g] predicate (plain and
//! modular) and the Bose–Chowla construction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::error::{Error, Result};
use crate::ff::FieldTower;

/// Above this many tuples, direct enumeration is replaced by
/// meet-in-the-middle (or refused, if that path is disabled).
pub const DEFAULT_TUPLE_CEILING: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    pub tuple_ceiling: u128,
    pub meet_in_middle: bool,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { tuple_ceiling: DEFAULT_TUPLE_CEILING, meet_in_middle: true }
    }
}

/// A finite set of distinct positive integers, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct SidonSet {
    elements: Vec<i64>,
}

impl SidonSet {
    /// Sorts the input; rejects duplicates and non-positive values.
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(&a) = elements.first() {
            if a < 1 {
                return Err(Error::InvalidInput(format!("element {a} is not positive")));
            }
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("duplicate element {}", w[0])));
        }
        Ok(SidonSet { elements })
    }

    pub fn empty() -> Self {
        SidonSet { elements: Vec::new() }
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max(&self) -> Option<i64> {
        self.elements.last().copied()
    }
}

impl TryFrom<Vec<i64>> for SidonSet {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        SidonSet::new(v)
    }
}

impl From<SidonSet> for Vec<i64> {
    fn from(s: SidonSet) -> Self {
        s.elements
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    /// Ordered h-tuples.
    Ordered,
    /// Multisets, i.e. orbits of h-tuples under coordinate permutation.
    Orbit,
}

/// Sparse representation counts; absent keys mean zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepProfile {
    pub mode: ProfileMode,
    pub modulus: Option<u64>,
    pub counts: BTreeMap<i64, u64>,
}

impl RepProfile {
    pub fn get(&self, w: i64) -> u64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    /// Largest count and the smallest value attaining it.
    pub fn max(&self) -> Option<(i64, u64)> {
        self.counts
            .iter()
            .fold(None, |best: Option<(i64, u64)>, (&w, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((w, c)),
            })
    }
}

fn check_order(h: usize) -> Result<()> {
    if h < 2 {
        return Err(Error::InvalidInput(format!("order h = {h} must be at least 2")));
    }
    Ok(())
}

fn check_modulus(modulus: Option<u64>) -> Result<()> {
    match modulus {
        Some(m) if m < 2 => Err(Error::InvalidInput(format!("modulus {m} must be at least 2"))),
        _ => Ok(()),
    }
}

/// Calls `f` with every nondecreasing index tuple of length `h` over `0..n`.
pub(crate) fn for_each_multiset(n: usize, h: usize, mut f: impl FnMut(&[usize])) {
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; h];
    loop {
        f(&idx);
        // advance the rightmost index that can still grow, then reset the tail
        let Some(pos) = (0..h).rev().find(|&i| idx[i] + 1 < n) else {
            return;
        };
        let v = idx[pos] + 1;
        idx[pos..].iter_mut().for_each(|x| *x = v);
    }
}

/// Calls `f` with every index tuple in `dims[0] × … × dims[len-1]`.
pub(crate) fn for_each_tuple(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    loop {
        f(&idx);
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < dims[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Sumset counts of the ordered `h`-fold sums, dense enumeration.
fn ordered_counts_direct(a: &[i64], h: usize) -> BTreeMap<i64, u64> {
    let mut counts = BTreeMap::new();
    for_each_tuple(&vec![a.len(); h], |idx| {
        let w: i64 = idx.iter().map(|&i| a[i]).sum();
        *counts.entry(w).or_insert(0) += 1;
    });
    counts
}

/// Convolution of two sparse count maps.
pub(crate) fn convolve(x: &BTreeMap<i64, u64>, y: &BTreeMap<i64, u64>) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for (&u, &cu) in x {
        for (&v, &cv) in y {
            *out.entry(u + v).or_insert(0) += cu * cv;
        }
    }
    out
}

/// `R_{A,h}`: number of ordered h-tuples from `A` summing to each value.
pub fn rep_ordered(set: &SidonSet, h: usize, limits: &EnumerationLimits) -> Result<RepProfile> {
    check_order(h)?;
    let n = set.len() as u128;
    let tuples = n.checked_pow(h as u32).unwrap_or(u128::MAX);
    let counts = if tuples <= limits.tuple_ceiling {
        ordered_counts_direct(set.elements(), h)
    } else if limits.meet_in_middle {
        let left = h.div_ceil(2);
        let half = n.checked_pow(left as u32).unwrap_or(u128::MAX);
        if half > limits.tuple_ceiling {
            return Err(Error::CeilingExceeded {
                what: "half-tuple count |A|^ceil(h/2)",
                value: half,
                ceiling: limits.tuple_ceiling,
            });
        }
        let l = ordered_counts_direct(set.elements(), left);
        let r = ordered_counts_direct(set.elements(), h - left);
        convolve(&l, &r)
    } else {
        return Err(Error::CeilingExceeded {
            what: "ordered tuple count |A|^h",
            value: tuples,
            ceiling: limits.tuple_ceiling,
        });
    };
    Ok(RepProfile { mode: ProfileMode::Ordered, modulus: None, counts })
}

fn orbit_guard(set: &SidonSet, h: usize, limits: &EnumerationLimits) -> Result<()> {
    let multisets = binomial(set.len() as u64 + h as u64 - 1, h as u64);
    if !set.is_empty() && multisets > limits.tuple_ceiling {
        return Err(Error::CeilingExceeded {
            what: "multiset count C(|A|+h-1, h)",
            value: multisets,
            ceiling: limits.tuple_ceiling,
        });
    }
    Ok(())
}

fn reduce(w: i64, modulus: Option<u64>) -> i64 {
    match modulus {
        Some(m) => w.rem_euclid(m as i64),
        None => w,
    }
}

/// `r_{A,h}` (or `r^(m)_{A,h}` with a modulus): number of multisets of size
/// `h` from `A` whose sum is `w` (or `≡ w mod m`).
pub fn rep_orbit(
    set: &SidonSet,
    h: usize,
    modulus: Option<u64>,
    limits: &EnumerationLimits,
) -> Result<RepProfile> {
    check_order(h)?;
    check_modulus(modulus)?;
    orbit_guard(set, h, limits)?;
    let a = set.elements();
    let mut counts = BTreeMap::new();
    for_each_multiset(a.len(), h, |idx| {
        let w: i64 = idx.iter().map(|&i| a[i]).sum();
        *counts.entry(reduce(w, modulus)).or_insert(0) += 1;
    });
    Ok(RepProfile { mode: ProfileMode::Orbit, modulus, counts })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhgWitness {
    pub value: i64,
    pub multisets: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BhgCheck {
    pub holds: bool,
    pub max_count: u64,
    /// A value of largest multiplicity and all multisets realizing it.
    pub witness: Option<BhgWitness>,
}

/// B_h[g] test: every multiset-sum count (mod `m` if given) is at most `g`.
pub fn is_bhg(
    set: &SidonSet,
    h: usize,
    g: u64,
    modulus: Option<u64>,
    limits: &EnumerationLimits,
) -> Result<BhgCheck> {
    if g < 1 {
        return Err(Error::InvalidInput("multiplicity g must be at least 1".into()));
    }
    let profile = rep_orbit(set, h, modulus, limits)?;
    let Some((value, max_count)) = profile.max() else {
        return Ok(BhgCheck { holds: true, max_count: 0, witness: None });
    };
    let a = set.elements();
    let mut multisets = Vec::new();
    for_each_multiset(a.len(), h, |idx| {
        let w: i64 = idx.iter().map(|&i| a[i]).sum();
        if reduce(w, modulus) == value {
            multisets.push(idx.iter().map(|&i| a[i]).collect());
        }
    });
    Ok(BhgCheck {
        holds: max_count <= g,
        max_count,
        witness: Some(BhgWitness { value, multisets }),
    })
}

/// Discrete logs `d_j` with `theta^(d_j) = theta - lambda_j`, in subfield order.
pub fn bose_chowla_exponents(tower: &FieldTower) -> Result<Vec<u64>> {
    let theta = tower.theta();
    let mut out = Vec::with_capacity(tower.q() as usize);
    for lambda in tower.subfield_elements() {
        let d = tower.dlog(&tower.sub(theta, lambda))?;
        if d == 0 {
            return Err(Error::VerificationFailed(format!(
                "theta - lambda = 1 for lambda = {}, so theta lies in the subfield",
                tower.encode(lambda)
            )));
        }
        out.push(d);
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::VerificationFailed("discrete logs are not distinct".into()));
    }
    Ok(out)
}

/// The Bose–Chowla set `{dlog(theta - lambda) : lambda in GF(q)}`, a B_h
/// set modulo `q^h - 1` with `q` elements in `[1, q^h - 2]`.
pub fn bose_chowla_set(tower: &FieldTower) -> Result<SidonSet> {
    let exps = bose_chowla_exponents(tower)?;
    SidonSet::new(exps.into_iter().map(|d| d as i64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModImplication {
    pub sidon_mod_m: bool,
    pub sidon: bool,
    /// `sidon_mod_m ⇒ sidon`.
    pub holds: bool,
}

/// Evaluates "Sidon of order `h` modulo `m` implies Sidon of order `h`" on
/// one instance.
pub fn check_mod_implies_plain(
    set: &SidonSet,
    h: usize,
    m: u64,
    limits: &EnumerationLimits,
) -> Result<ModImplication> {
    let sidon_mod_m = is_bhg(set, h, 1, Some(m), limits)?.holds;
    let sidon = is_bhg(set, h, 1, None, limits)?.holds;
    Ok(ModImplication { sidon_mod_m, sidon, holds: !sidon_mod_m || sidon })
}
