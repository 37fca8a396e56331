//! Starting points for multi-seed Newton sweeps.
//!
//! Each [`SeedStrategy`] proposes double-precision root sets; a
//! [`SeedRegistry`] maps names to strategies and splits a seed budget among
//! them by weight.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Family, ModelSpec};

/// Everything a strategy may use to propose seeds.
#[derive(Clone, Debug)]
pub struct SeedContext {
    pub spec: ModelSpec,
    /// Number of roots per seed (the remainder size for reduced sweeps).
    pub roots: usize,
    /// Known solutions of a neighbouring problem (e.g. one magnon fewer).
    pub neighbours: Vec<Vec<Complex64>>,
}

impl SeedContext {
    pub fn new(spec: &ModelSpec, roots: usize) -> Self {
        SeedContext {
            spec: spec.clone(),
            roots,
            neighbours: Vec::new(),
        }
    }

    pub fn with_neighbours(mut self, neighbours: Vec<Vec<Complex64>>) -> Self {
        self.neighbours = neighbours;
        self
    }

    fn half_shift(&self) -> Complex64 {
        let s = self.spec.spin.twice() as f64 / 2.0;
        match self.spec.family {
            Family::Xxx => Complex64::new(0.0, s),
            Family::Xxz => Complex64::new(s * self.spec.eta, 0.0),
        }
    }

    fn unit(&self) -> Complex64 {
        match self.spec.family {
            Family::Xxx => Complex64::new(0.0, 1.0),
            Family::Xxz => Complex64::new(self.spec.eta, 0.0),
        }
    }

    /// Rapidity of a free magnon with momentum `p`, i.e. the solution of
    /// `φ(λ + s·u)/φ(λ − s·u) = e^{ip}`.
    pub fn free_magnon(&self, p: f64) -> Complex64 {
        let w = Complex64::from_polar(1.0, p);
        let ratio = (w + 1.0) / (w - 1.0);
        let a = self.half_shift();
        match self.spec.family {
            Family::Xxx => a * ratio,
            Family::Xxz => (a.tanh() * ratio).atanh(),
        }
    }

    /// Free-magnon momenta `(2πI − β)/N` for `I = 1..N−1`.
    fn momenta(&self) -> Vec<f64> {
        let n = self.spec.sites as f64;
        (1..self.spec.sites)
            .map(|i| (2.0 * PI * i as f64 - self.spec.beta) / n)
            .collect()
    }
}

pub trait SeedStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn seeds(&self, ctx: &SeedContext, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>>;
}

fn jitter(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

fn distinct_momenta(ctx: &SeedContext, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let ps = ctx.momenta();
    if ps.is_empty() {
        return Vec::new();
    }
    if k <= ps.len() {
        sample(rng, ps.len(), k).into_iter().map(|i| ps[i]).collect()
    } else {
        (0..k).map(|_| ps[rng.gen_range(0..ps.len())] + rng.gen_range(-0.2..0.2)).collect()
    }
}

/// Real roots from distinct free-magnon momenta, slightly perturbed.
pub struct FreeMagnon;

impl SeedStrategy for FreeMagnon {
    fn name(&self) -> &'static str {
        "free_magnon"
    }
    fn seeds(&self, ctx: &SeedContext, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        (0..count)
            .map(|_| {
                let spread = rng.gen_range(0.0..0.3);
                distinct_momenta(ctx, ctx.roots, rng)
                    .into_iter()
                    .map(|p| ctx.free_magnon(p) + jitter(rng, spread + 1e-3))
                    .collect()
            })
            .collect()
    }
}

/// Strings `x + (n−1)u/2, …, x − (n−1)u/2` of length 2 or 3 with real
/// centres, completed by free magnons.
pub struct Strings;

impl SeedStrategy for Strings {
    fn name(&self) -> &'static str {
        "string"
    }
    fn seeds(&self, ctx: &SeedContext, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        if ctx.roots < 2 {
            return FreeMagnon.seeds(ctx, count, rng);
        }
        let half_u = ctx.unit() * 0.5;
        let scale = match ctx.spec.family {
            Family::Xxx => 1.0,
            Family::Xxz => 0.5,
        };
        (0..count)
            .map(|_| {
                let mut v = Vec::with_capacity(ctx.roots);
                let strings = rng.gen_range(1..=ctx.roots / 2);
                for _ in 0..strings {
                    let left = ctx.roots - v.len();
                    if left < 2 {
                        break;
                    }
                    let len = if left >= 3 && rng.gen_bool(0.4) { 3 } else { 2 };
                    let centre = Complex64::new(rng.gen_range(-scale..scale), 0.0);
                    let stretch = 1.0 + rng.gen_range(0.0..0.05);
                    for k in 0..len {
                        let offset = (len as f64 - 1.0 - 2.0 * k as f64) * stretch;
                        v.push(centre + half_u * offset + jitter(rng, 0.02));
                    }
                }
                for p in distinct_momenta(ctx, ctx.roots - v.len(), rng) {
                    v.push(ctx.free_magnon(p) + jitter(rng, 0.1));
                }
                v
            })
            .collect()
    }
}

/// Uniform points in a disk of radius 3.
pub struct RandomDisk;

impl SeedStrategy for RandomDisk {
    fn name(&self) -> &'static str {
        "random_disk"
    }
    fn seeds(&self, ctx: &SeedContext, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        (0..count)
            .map(|_| {
                (0..ctx.roots)
                    .map(|_| {
                        let r = 3.0 * rng.gen::<f64>().sqrt();
                        Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Known neighbouring solutions, padded with free magnons or trimmed to the
/// required size.
pub struct Continuation;

impl SeedStrategy for Continuation {
    fn name(&self) -> &'static str {
        "continuation"
    }
    fn seeds(&self, ctx: &SeedContext, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        if ctx.neighbours.is_empty() {
            return Vec::new();
        }
        (0..count)
            .map(|_| {
                let base = &ctx.neighbours[rng.gen_range(0..ctx.neighbours.len())];
                let mut v: Vec<Complex64> = base.iter().map(|z| z + jitter(rng, 0.05)).collect();
                v.truncate(ctx.roots);
                while v.len() < ctx.roots {
                    let p = distinct_momenta(ctx, 1, rng).first().copied().unwrap_or(1.0);
                    v.push(ctx.free_magnon(p) + jitter(rng, 0.2));
                }
                v
            })
            .collect()
    }
}

/// Weighted, named collection of strategies.
pub struct SeedRegistry {
    entries: Vec<(Box<dyn SeedStrategy>, u32)>,
}

impl SeedRegistry {
    pub fn empty() -> Self {
        SeedRegistry { entries: Vec::new() }
    }

    /// Free magnons, strings, random disk and continuation.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(FreeMagnon), 4);
        r.register(Box::new(Strings), 3);
        r.register(Box::new(RandomDisk), 3);
        r.register(Box::new(Continuation), 2);
        r
    }

    /// Adds a strategy, replacing any with the same name.
    pub fn register(&mut self, strategy: Box<dyn SeedStrategy>, weight: u32) {
        self.entries.retain(|(s, _)| s.name() != strategy.name());
        self.entries.push((strategy, weight));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(s, _)| s.name()).collect()
    }

    /// Keeps only the named strategies.
    pub fn select(mut self, names: &[&str]) -> Self {
        self.entries.retain(|(s, _)| names.contains(&s.name()));
        self
    }

    /// Splits `total` seeds by weight and draws them deterministically from
    /// `random_seed`. Strategies that produce fewer seeds than their share
    /// leave the remainder to the random disk.
    pub fn generate(&self, ctx: &SeedContext, total: usize, random_seed: u64) -> Vec<Vec<Complex64>> {
        if ctx.roots == 0 {
            return vec![Vec::new()];
        }
        let weight_sum: u32 = self.entries.iter().map(|(_, w)| *w).sum();
        let mut out = Vec::with_capacity(total);
        for (k, (strategy, w)) in self.entries.iter().enumerate() {
            let share = if weight_sum == 0 {
                0
            } else {
                total * *w as usize / weight_sum as usize
            };
            let mut rng = ChaCha8Rng::seed_from_u64(random_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(k as u64 + 1)));
            out.extend(strategy.seeds(ctx, share, &mut rng));
        }
        let shortfall = total.saturating_sub(out.len());
        if shortfall > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(random_seed ^ 0xD1B5_4A32_D192_ED03);
            out.extend(RandomDisk.seeds(ctx, shortfall, &mut rng));
        }
        out
    }
}
