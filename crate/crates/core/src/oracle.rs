//! Exact extremal values by exhaustive search on small ranges: the largest
//! B_h[g] subset of `[1, n]`, and the largest common cardinality of a
//! two-set system of multiplicity `g` inside `[1, n]`.
//!
//! Both searches normalize by translation (the smallest element of each set
//! is 1), which leaves multiplicities unchanged.

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, integer_root};
use crate::builder::{classical_lower_bound, lower_bound_witness, BuildOptions};
use crate::classical::{is_bhg, EnumerationLimits, SidonSet};
use crate::error::{Error, Result};
use crate::linear_form::{is_phi_sidon, LinearForm, SidonSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_n_order2: u64,
    pub max_n_order3: u64,
    pub max_n_higher: u64,
    pub max_n_system: u64,
    pub order: SearchOrder,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_n_order2: 40, max_n_order3: 20, max_n_higher: 12, max_n_system: 15, order: SearchOrder::Ascending }
    }
}

impl OracleConfig {
    fn classical_ceiling(&self, h: usize) -> u64 {
        match h {
            2 => self.max_n_order2,
            3 => self.max_n_order3,
            _ => self.max_n_higher,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtremalWitness {
    Set(Vec<i64>),
    System(Vec<Vec<i64>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub n: u64,
    pub h: usize,
    pub g: u64,
    #[serde(rename = "exact")]
    pub exact_value: u64,
    pub witness: ExtremalWitness,
    /// Search nodes visited; depends on search order.
    pub nodes_explored: u64,
}

/// Multiset-sum counts by size: `layers[s][w]` is the number of size-`s`
/// multisets from the current set with sum `w`.
struct Layers {
    h: usize,
    layers: Vec<Vec<u64>>,
}

impl Layers {
    fn new(h: usize, max_sum: usize) -> Self {
        let mut layers = vec![vec![0u64; max_sum + 1]; h + 1];
        layers[0][0] = 1;
        Layers { h, layers }
    }

    /// Adds `x`; returns false if some top-layer count now exceeds `g`
    /// (the element stays added either way).
    fn add(&mut self, x: usize, g: u64) -> bool {
        let width = self.layers[0].len();
        let mut ok = true;
        for s in (1..=self.h).rev() {
            for w in (0..width).rev() {
                let mut extra = 0;
                for j in 1..=s {
                    if j * x > w {
                        break;
                    }
                    extra += self.layers[s - j][w - j * x];
                }
                self.layers[s][w] += extra;
                if s == self.h && self.layers[s][w] > g {
                    ok = false;
                }
            }
        }
        ok
    }

    fn remove(&mut self, x: usize) {
        let width = self.layers[0].len();
        for s in 1..=self.h {
            for w in 0..width {
                let mut extra = 0;
                for j in 1..=s {
                    if j * x > w {
                        break;
                    }
                    extra += self.layers[s - j][w - j * x];
                }
                self.layers[s][w] -= extra;
            }
        }
    }
}

struct ClassicalSearch {
    n: usize,
    g: u64,
    order: SearchOrder,
    layers: Layers,
    current: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
}

impl ClassicalSearch {
    fn dfs(&mut self, start: usize) {
        self.nodes += 1;
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if start > self.n {
            return;
        }
        let candidates: Vec<usize> = match self.order {
            SearchOrder::Ascending => (start..=self.n).collect(),
            SearchOrder::Descending => (start..=self.n).rev().collect(),
        };
        for x in candidates {
            // x and everything above it is all that remains
            if self.current.len() + 1 + (self.n - x) <= self.best.len() {
                continue;
            }
            let ok = self.layers.add(x, self.g);
            if ok {
                self.current.push(x);
                self.dfs(x + 1);
                self.current.pop();
            }
            self.layers.remove(x);
        }
    }
}

/// `F_h(n)` for `g = 1`, or generally the largest B_h[g] subset of `[1, n]`.
pub fn exact_classical(n: u64, h: usize, g: u64, config: &OracleConfig) -> Result<ExtremalResult> {
    if h < 2 || g < 1 || n < 1 {
        return Err(Error::InvalidInput(format!("need h >= 2, g >= 1, n >= 1 (got h={h}, g={g}, n={n})")));
    }
    let ceiling = config.classical_ceiling(h);
    if n > ceiling {
        return Err(Error::CeilingExceeded { what: "oracle range n", value: n as u128, ceiling: ceiling as u128 });
    }
    let n_us = n as usize;
    let mut search = ClassicalSearch {
        n: n_us,
        g,
        order: config.order,
        layers: Layers::new(h, h * n_us),
        current: Vec::new(),
        best: Vec::new(),
        nodes: 0,
    };
    // a single element never violates g >= 1
    search.layers.add(1, g);
    search.current.push(1);
    search.dfs(2);
    let witness: Vec<i64> = search.best.iter().map(|&x| x as i64).collect();
    Ok(ExtremalResult {
        n,
        h,
        g,
        exact_value: witness.len() as u64,
        witness: ExtremalWitness::Set(witness),
        nodes_explored: search.nodes,
    })
}

struct SystemSearch<'a> {
    n: i64,
    g: u64,
    c1: i64,
    c2: i64,
    target: usize,
    a1: &'a [i64],
    offset: i64,
    counts: Vec<u64>,
    a2: Vec<i64>,
    nodes: u64,
}

impl SystemSearch<'_> {
    fn slot(&self, a: i64, y: i64) -> usize {
        (self.c1 * a + self.c2 * y + self.offset) as usize
    }

    fn add(&mut self, y: i64) -> bool {
        let mut ok = true;
        for i in 0..self.a1.len() {
            let s = self.slot(self.a1[i], y);
            self.counts[s] += 1;
            ok &= self.counts[s] <= self.g;
        }
        ok
    }

    fn remove(&mut self, y: i64) {
        for i in 0..self.a1.len() {
            let s = self.slot(self.a1[i], y);
            self.counts[s] -= 1;
        }
    }

    fn dfs(&mut self, start: i64) -> bool {
        self.nodes += 1;
        if self.a2.len() == self.target {
            return true;
        }
        let need = (self.target - self.a2.len()) as i64;
        let mut y = start;
        while y + need - 1 <= self.n {
            let ok = self.add(y);
            if ok {
                self.a2.push(y);
                if self.dfs(y + 1) {
                    return true;
                }
                self.a2.pop();
            }
            self.remove(y);
            y += 1;
        }
        false
    }
}

/// Lexicographic enumeration of `k`-subsets of `[lo, hi]`.
fn next_combination(comb: &mut [i64], hi: i64) -> bool {
    let k = comb.len();
    for pos in (0..k).rev() {
        let limit = hi - (k - 1 - pos) as i64;
        if comb[pos] < limit {
            comb[pos] += 1;
            for j in pos + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `F_{φ,g}(n)` for a two-variable form: the largest `q` admitting
/// `A_1, A_2 ⊆ [1, n]` with `|A_1| = |A_2| = q` and multiplicity at most `g`.
pub fn exact_system(phi: &LinearForm, n: u64, g: u64, config: &OracleConfig) -> Result<ExtremalResult> {
    if phi.h() != 2 {
        return Err(Error::InvalidInput(format!("the system oracle supports h = 2 only, got h = {}", phi.h())));
    }
    if g < 1 || n < 1 {
        return Err(Error::InvalidInput(format!("need g >= 1 and n >= 1 (got g={g}, n={n})")));
    }
    if n > config.max_n_system {
        return Err(Error::CeilingExceeded {
            what: "system oracle range n",
            value: n as u128,
            ceiling: config.max_n_system as u128,
        });
    }
    let (c1, c2) = (phi.coeffs()[0], phi.coeffs()[1]);
    let ni = n as i64;
    let span = phi.c_norm() * ni;
    let mut nodes = 0;
    let sizes: Vec<u64> = match config.order {
        SearchOrder::Ascending => (1..=n).rev().collect(),
        SearchOrder::Descending => (1..=n).collect(),
    };
    let mut found: Option<(u64, Vec<Vec<i64>>)> = None;
    for q in sizes {
        // A_1 = {1} ∪ (q-1)-subset of [2, n]
        let mut rest: Vec<i64> = (2..q as i64 + 1).collect();
        let mut hit = None;
        loop {
            let mut a1 = Vec::with_capacity(q as usize);
            a1.push(1);
            a1.extend_from_slice(&rest);
            let mut search = SystemSearch {
                n: ni,
                g,
                c1,
                c2,
                target: q as usize,
                a1: &a1,
                offset: span,
                counts: vec![0; (2 * span + 1) as usize],
                a2: Vec::new(),
                nodes: 0,
            };
            search.add(1);
            search.a2.push(1);
            let ok = search.dfs(2);
            nodes += search.nodes;
            if ok {
                hit = Some(vec![a1.clone(), search.a2.clone()]);
                break;
            }
            if rest.is_empty() || !next_combination(&mut rest, ni) {
                break;
            }
        }
        if let Some(w) = hit {
            found = Some((q, w));
            if matches!(config.order, SearchOrder::Ascending) {
                break;
            }
        } else if matches!(config.order, SearchOrder::Descending) {
            // a witness of size q restricts to one of size q-1, so sizes beyond fail too
            break;
        }
    }
    let (exact, witness) = found.expect("singletons always qualify");
    Ok(ExtremalResult { n, h: 2, g, exact_value: exact, witness: ExtremalWitness::System(witness), nodes_explored: nodes })
}

/// Re-verifies an oracle witness through the ordinary predicates.
pub fn verify_witness(result: &ExtremalResult, phi: Option<&LinearForm>, limits: &EnumerationLimits) -> Result<bool> {
    let in_range = |v: &[i64]| v.iter().all(|&a| a >= 1 && a <= result.n as i64);
    match (&result.witness, phi) {
        (ExtremalWitness::Set(v), _) => {
            let set = SidonSet::new(v.clone())?;
            Ok(in_range(v)
                && set.len() as u64 == result.exact_value
                && is_bhg(&set, result.h, result.g, None, limits)?.holds)
        }
        (ExtremalWitness::System(sets), Some(phi)) => {
            let system = SidonSystem::new(sets.clone())?;
            Ok(sets.iter().all(|s| in_range(s) && s.len() as u64 == result.exact_value)
                && is_phi_sidon(phi, &system, result.g, limits)?)
        }
        (ExtremalWitness::System(_), None) => {
            Err(Error::InvalidInput("a system witness needs its linear form".into()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub phi: Vec<i64>,
    pub n: u64,
    pub g: u64,
    pub exact: u64,
    /// Construction witness; only comparable when `g >= h!`.
    pub construction_q: Option<u64>,
    pub construction_applicable: bool,
    /// `floor((g(2Cn+1))^(1/h))`.
    pub counting_ceiling: u64,
    pub holds: bool,
}

/// Brackets the exact `F_{φ,g}(n)` between the construction's witness (when
/// `g >= h!`) and the counting ceiling.
pub fn oracle_vs_construction(
    phi: &LinearForm,
    n: u64,
    g: u64,
    config: &OracleConfig,
    opts: &BuildOptions,
) -> Result<ComparisonReport> {
    let exact = exact_system(phi, n, g, config)?.exact_value;
    let h = phi.h();
    let construction_applicable = g >= crate::arith::factorial(h as u64);
    let construction_q = if construction_applicable {
        lower_bound_witness(phi, n, opts)?.map(|w| w.q)
    } else {
        None
    };
    let window = 2 * phi.c_norm() as u64 * n + 1;
    let counting_ceiling = integer_root(g * window, h as u32);
    let holds = construction_q.is_none_or(|q| q <= exact) && exact <= counting_ceiling;
    Ok(ComparisonReport {
        phi: phi.coeffs().to_vec(),
        n,
        g,
        exact,
        construction_q,
        construction_applicable,
        counting_ceiling,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalBracket {
    pub n: u64,
    pub h: usize,
    pub exact: u64,
    pub construction_q: Option<u64>,
    /// Largest `q` with `C(q+h-1, h) <= h(n-1)+1`.
    pub multiset_ceiling: u64,
    /// `floor(sqrt(2·2n+1))`, reported for `h = 2`.
    pub counting_ceiling: Option<u64>,
    pub holds: bool,
}

/// Brackets `F_h(n)` between the Bose–Chowla witness and counting ceilings.
pub fn classical_bracket(n: u64, h: usize, config: &OracleConfig, opts: &BuildOptions) -> Result<ClassicalBracket> {
    let exact = exact_classical(n, h, 1, config)?.exact_value;
    let construction_q = classical_lower_bound(h, n, opts)?.map(|w| w.q);
    let sums = h as u128 * (n as u128 - 1) + 1;
    let multiset_ceiling = (1..).take_while(|&q| binomial(q + h as u64 - 1, h as u64) <= sums).last().unwrap_or(0);
    let counting_ceiling = (h == 2).then(|| integer_root(2 * 2 * n + 1, 2));
    let holds = construction_q.is_none_or(|q| q <= exact)
        && exact <= multiset_ceiling
        && counting_ceiling.is_none_or(|c| exact <= c);
    Ok(ClassicalBracket { n, h, exact, construction_q, multiset_ceiling, counting_ceiling, holds })
}
