//! Chain specifications, root sets and the Bethe equations.

mod kernel;
mod singular;
mod system;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{BetheError, Result};
use crate::numeric::{cx, Cx, Real, Tolerances};

pub use kernel::{Anisotropic, BetheKernel, Isotropic, KernelCtor, KernelRegistry};
pub use singular::{
    classify, classify_with, detect_singular, energy, physical_constraint, ClassificationResult, SingularDecomposition,
    SolutionKind,
};
pub use system::BetheSystem;

/// Number of powers `k` checked by the anisotropy genericity test.
pub const GENERICITY_ORDERS: u32 = 24;
/// `|e^{kη} − 1|` must exceed this for every checked `k`.
pub const GENERICITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Xxx,
    Xxz,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Xxx => "xxx",
            Family::Xxz => "xxz",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BetheError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xxx" => Ok(Family::Xxx),
            "xxz" => Ok(Family::Xxz),
            other => Err(BetheError::Parse(format!("unknown model family '{other}'"))),
        }
    }
}

/// Spin `s`, stored as the positive integer `2s`. Serialized as `"1/2"`,
/// `"1"`, `"3/2"`, ...
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Spin(u32);

impl From<Spin> for String {
    fn from(s: Spin) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for Spin {
    type Error = BetheError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl Spin {
    pub const HALF: Spin = Spin(1);

    pub fn from_twice(two_s: u32) -> Result<Self> {
        if two_s == 0 {
            return Err(BetheError::InvalidModel("spin must be positive".into()));
        }
        Ok(Spin(two_s))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    /// Length `2s + 1` of the exact singular string.
    pub fn string_length(self) -> usize {
        self.0 as usize + 1
    }

    pub fn is_half(self) -> bool {
        self.0 == 1
    }
}

impl Default for Spin {
    fn default() -> Self {
        Spin::HALF
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = BetheError;
    /// Accepts `1/2`, `3/2`, `1`, `0.5`, `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || BetheError::Parse(format!("invalid spin '{s}'"));
        let t = s.trim();
        let twice = if let Some((num, den)) = t.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => num.checked_mul(2).ok_or_else(bad)?,
                "2" => num,
                _ => return Err(bad()),
            }
        } else {
            let v: f64 = t.parse().map_err(|_| bad())?;
            let tw = 2.0 * v;
            if !tw.is_finite() || tw.fract() != 0.0 || tw < 0.0 || tw > u32::MAX as f64 {
                return Err(bad());
            }
            tw as u32
        };
        Spin::from_twice(twice)
    }
}

/// A chain: family, spin, sites `N`, magnons `M`, anisotropy `η`, twist `β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub spin: Spin,
    pub sites: usize,
    pub magnons: usize,
    /// Anisotropy; ignored for the isotropic family.
    pub eta: f64,
    pub beta: f64,
}

impl ModelSpec {
    pub fn xxx(sites: usize, magnons: usize) -> Self {
        ModelSpec {
            family: Family::Xxx,
            spin: Spin::HALF,
            sites,
            magnons,
            eta: 0.0,
            beta: 0.0,
        }
    }

    pub fn xxz(sites: usize, magnons: usize, eta: f64) -> Self {
        ModelSpec {
            family: Family::Xxz,
            eta,
            ..Self::xxx(sites, magnons)
        }
    }

    pub fn with_spin(mut self, spin: Spin) -> Self {
        self.spin = spin;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_magnons(mut self, magnons: usize) -> Self {
        self.magnons = magnons;
        self
    }

    /// Largest admissible magnon number, `floor(2s N / 2)`.
    pub fn max_magnons(&self) -> usize {
        self.spin.twice() as usize * self.sites / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites == 0 {
            return Err(BetheError::InvalidModel("N must be at least 1".into()));
        }
        if self.spin.twice() == 0 {
            return Err(BetheError::InvalidModel("spin must be positive".into()));
        }
        if self.magnons > self.max_magnons() {
            return Err(BetheError::InvalidModel(format!(
                "M = {} exceeds the largest admissible value {} for N = {}, s = {}",
                self.magnons,
                self.max_magnons(),
                self.sites,
                self.spin
            )));
        }
        if !self.beta.is_finite() {
            return Err(BetheError::InvalidModel("beta must be finite".into()));
        }
        if self.family == Family::Xxz {
            check_generic_anisotropy(self.eta)?;
        }
        Ok(())
    }
}

/// Rejects anisotropies with `e^{kη}` within tolerance of 1 for small `k`.
pub fn check_generic_anisotropy(eta: f64) -> Result<()> {
    if !eta.is_finite() {
        return Err(BetheError::InvalidModel("eta must be finite".into()));
    }
    for k in 1..=GENERICITY_ORDERS {
        let gap = (k as f64 * eta).exp_m1().abs();
        if gap <= GENERICITY_TOLERANCE {
            return Err(BetheError::NonGenericAnisotropy { eta, k, gap });
        }
    }
    Ok(())
}

/// Candidate or actual Bethe roots. Equality compares the roots in order;
/// the canonical flag only records how the set was produced.
#[derive(Clone, Debug)]
pub struct RootSet<T: Real> {
    roots: Vec<Cx<T>>,
    canonical: bool,
}

impl<T: Real> PartialEq for RootSet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.roots == other.roots
    }
}

impl<T: Real> RootSet<T> {
    pub fn new(roots: Vec<Cx<T>>) -> Self {
        RootSet { roots, canonical: false }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn from_f64(roots: &[(f64, f64)]) -> Self {
        Self::new(roots.iter().map(|&(re, im)| cx::from_f64(re, im)).collect())
    }

    pub fn roots(&self) -> &[Cx<T>] {
        &self.roots
    }

    pub fn into_roots(self) -> Vec<Cx<T>> {
        self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn is_finite(&self) -> bool {
        self.roots.iter().all(cx::is_finite)
    }

    pub fn to_f64(&self) -> RootSet<f64> {
        RootSet {
            roots: self.roots.iter().map(cx::to_f64).collect(),
            canonical: self.canonical,
        }
    }

    /// Sorted by real part ascending; roots whose real parts agree within the
    /// precision's tie tolerance are ordered by imaginary part descending.
    pub fn canonicalize(&self) -> Self {
        let tie = Tolerances::for_precision::<T>().detection * 0.1;
        let mut v = self.roots.clone();
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal));
        let mut out = Vec::with_capacity(v.len());
        let mut start = 0;
        while start < v.len() {
            let anchor = v[start].re.to_f64();
            let mut end = start + 1;
            while end < v.len() && (v[end].re.to_f64() - anchor).abs() <= tie {
                end += 1;
            }
            let mut group = v[start..end].to_vec();
            group.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal));
            out.extend(group);
            start = end;
        }
        RootSet {
            roots: out,
            canonical: true,
        }
    }

    /// Smallest pairwise distance between roots (`+∞` for fewer than two).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (a, x) in self.roots.iter().enumerate() {
            for y in &self.roots[a + 1..] {
                best = best.min(cx::dist(x, y).to_f64());
            }
        }
        best
    }
}

impl<T: Real> From<Vec<Cx<T>>> for RootSet<T> {
    fn from(roots: Vec<Cx<T>>) -> Self {
        RootSet::new(roots)
    }
}

/// Permutation-invariant distance: the largest displacement in a greedy
/// nearest-neighbour matching of the two sets. `+∞` if the sizes differ.
pub fn root_set_distance<T: Real>(a: &RootSet<T>, b: &RootSet<T>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.roots().iter().enumerate() {
        for (j, y) in b.roots().iter().enumerate() {
            pairs.push((cx::dist(x, y).to_f64(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// Human-readable complex number used in diagnostics.
pub(crate) fn show<T: Real>(z: &Cx<T>) -> String {
    let c = cx::to_f64(z);
    format!("{}{:+}i", c.re, c.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_parsing() {
        assert_eq!("1/2".parse::<Spin>().unwrap().twice(), 1);
        assert_eq!("3/2".parse::<Spin>().unwrap().twice(), 3);
        assert_eq!("1".parse::<Spin>().unwrap().twice(), 2);
        assert_eq!("1.5".parse::<Spin>().unwrap().twice(), 3);
        assert!("0".parse::<Spin>().is_err());
        assert!("1/3".parse::<Spin>().is_err());
        assert_eq!(Spin::from_twice(3).unwrap().to_string(), "3/2");
        assert_eq!(Spin::from_twice(2).unwrap().to_string(), "1");
    }

    #[test]
    fn magnon_bound() {
        assert!(ModelSpec::xxx(4, 2).validate().is_ok());
        assert!(ModelSpec::xxx(4, 3).validate().is_err());
        assert!(ModelSpec::xxx(5, 2).validate().is_ok());
        assert!(ModelSpec::xxx(0, 0).validate().is_err());
        let s1 = ModelSpec::xxx(3, 3).with_spin(Spin::from_twice(2).unwrap());
        assert!(s1.validate().is_ok());
    }

    #[test]
    fn genericity() {
        assert!(ModelSpec::xxz(4, 2, 0.7).validate().is_ok());
        assert!(matches!(
            ModelSpec::xxz(4, 2, 0.0).validate(),
            Err(BetheError::NonGenericAnisotropy { k: 1, .. })
        ));
    }

    #[test]
    fn canonical_order() {
        let r = RootSet::<f64>::from_f64(&[(0.0, -0.5), (0.0, 0.5)]).canonicalize();
        assert_eq!(r.roots(), &[Cx::new(0.0, 0.5), Cx::new(0.0, -0.5)]);
        let r = RootSet::<f64>::from_f64(&[(0.5, 0.0), (-0.5, 0.0), (0.0, 0.0)]).canonicalize();
        assert_eq!(r.roots(), &[Cx::new(-0.5, 0.0), Cx::new(0.0, 0.0), Cx::new(0.5, 0.0)]);
        assert_eq!(r.canonicalize(), r);
    }

    #[test]
    fn distance_ignores_order() {
        let a = RootSet::<f64>::from_f64(&[(1.0, 0.0), (0.0, 1.0)]);
        let b = RootSet::<f64>::from_f64(&[(0.0, 1.0), (1.0, 1e-3)]);
        assert!((root_set_distance(&a, &b) - 1e-3).abs() < 1e-15);
    }
}
