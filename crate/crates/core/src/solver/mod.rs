//! Numerical solution of the full and reduced Bethe systems.

mod newton;
pub mod seeds;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{BetheError, Result};
use crate::model::{
    classify_with, root_set_distance, BetheSystem, ClassificationResult, ModelSpec, RootSet, SingularDecomposition,
    SolutionKind,
};
use crate::numeric::{cx, with_digits, working_digits, Cx, Real, Tolerances};

pub use newton::{finite_difference_jacobian, newton, FullEquations, NewtonOutcome, NonlinearSystem, ReducedEquations};
pub use seeds::{SeedContext, SeedRegistry, SeedStrategy};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Accepted scaled residual norm.
    pub residual_tolerance: f64,
    /// Largest accepted final Newton correction, relative to `max(1, |λ|)`.
    pub step_tolerance: f64,
    /// Initial Newton step length in `(0, 1]`.
    pub step_damping: f64,
    pub max_halvings: usize,
    pub seed_count: usize,
    /// Solutions closer than this (in root-set distance) are identified.
    pub dedup_distance: f64,
    pub random_seed: u64,
    /// Iterates leaving this disk are abandoned.
    pub root_bound: f64,
    /// Relative pivot threshold for Newton steps; `None` uses the precision
    /// default.
    pub pivot_threshold: Option<f64>,
    pub tolerances: Tolerances,
}

impl SolveOptions {
    pub fn for_precision<T: Real>() -> Self {
        let tolerances = Tolerances::for_precision::<T>();
        SolveOptions {
            max_iterations: 100,
            residual_tolerance: tolerances.solution,
            step_tolerance: tolerances.detection * 0.1,
            step_damping: 1.0,
            max_halvings: 40,
            seed_count: 200,
            dedup_distance: 1e-6,
            random_seed: 0x5EED,
            root_bound: 1e6,
            pivot_threshold: None,
            tolerances,
        }
    }

    pub fn with_seeds(mut self, seed_count: usize) -> Self {
        self.seed_count = seed_count;
        self
    }

    pub fn with_random_seed(mut self, random_seed: u64) -> Self {
        self.random_seed = random_seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.residual_tolerance = tol;
        self.tolerances.solution = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BetheError::InvalidOptions(m.to_string()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.residual_tolerance > 0.0) {
            return bad("residual tolerance must be positive");
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return bad("step damping must lie in (0, 1]");
        }
        if !(self.dedup_distance > self.tolerances.detection) {
            return bad("dedup distance must exceed the detection tolerance");
        }
        Ok(())
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self::for_precision::<f64>()
    }
}

/// Classified, deduplicated solutions of one `(N, M)` problem.
#[derive(Clone, Debug)]
pub struct SolutionSet<T: Real> {
    pub spec: ModelSpec,
    /// Canonically ordered root sets with their classification, sorted by
    /// root values.
    pub solutions: Vec<(RootSet<T>, ClassificationResult<T>)>,
    pub seeds_tried: usize,
    pub failures: usize,
}

impl<T: Real> SolutionSet<T> {
    pub fn count(&self, kind: SolutionKind) -> usize {
        self.solutions.iter().filter(|(_, c)| c.kind == kind).count()
    }
}

/// Newton's method on the full equations from one seed.
pub fn newton_solve<T: Real>(sys: &BetheSystem<T>, seed: &RootSet<T>, opts: &SolveOptions) -> Result<RootSet<T>> {
    let out = newton(&FullEquations(sys), seed.roots(), opts)?;
    Ok(RootSet::new(out.roots).canonicalize())
}

/// Root coordinates snapped to a grid, so that round-off (e.g. real parts of
/// order 1e-27 on either side of zero) does not decide the listing order.
fn sort_key<T: Real>(r: &RootSet<T>) -> Vec<(f64, f64)> {
    // adding 0.0 turns -0.0 into +0.0, which total_cmp would order apart
    let snap = |x: f64| (x / SORT_GRID).round() * SORT_GRID + 0.0;
    r.roots().iter().map(|z| (snap(z.re.to_f64()), snap(-z.im.to_f64()))).collect()
}

const SORT_GRID: f64 = 1e-8;

fn cmp_keys(a: &[(f64, f64)], b: &[(f64, f64)]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Runs Newton from every seed in parallel; results come back in seed order.
fn sweep<T: Real, S: NonlinearSystem<T>>(
    system: &S,
    seeds: &[Vec<Complex64>],
    opts: &SolveOptions,
) -> Vec<Option<Vec<Cx<T>>>> {
    let digits = working_digits();
    seeds
        .par_iter()
        .map(|seed| {
            with_digits(digits, || {
                let start: Vec<Cx<T>> = seed.iter().map(cx::lift).collect();
                newton(system, &start, opts).ok().map(|o| o.roots)
            })
        })
        .collect()
}

/// Keeps the first occurrence of every distinct root set.
fn push_distinct<T: Real>(
    out: &mut Vec<(RootSet<T>, ClassificationResult<T>)>,
    roots: RootSet<T>,
    class: ClassificationResult<T>,
    dedup: f64,
) {
    if out.iter().all(|(r, _)| root_set_distance(r, &roots) > dedup) {
        out.push((roots, class));
    }
}

fn finish<T: Real>(mut solutions: Vec<(RootSet<T>, ClassificationResult<T>)>) -> Vec<(RootSet<T>, ClassificationResult<T>)> {
    solutions.sort_by(|a, b| cmp_keys(&sort_key(&a.0), &sort_key(&b.0)));
    solutions
}

/// Polishes a remainder (e.g. found in double precision) with Newton's method
/// on the reduced equations at the working precision of `T`.
pub fn refine_remainder<T: Real>(spec: &ModelSpec, remainder: &RootSet<f64>, opts: &SolveOptions) -> Result<RootSet<T>> {
    let sys = BetheSystem::<T>::new(&spec.clone().with_beta(0.0))?;
    let start: Vec<Cx<T>> = remainder.roots().iter().map(cx::lift).collect();
    Ok(RootSet::new(newton(&ReducedEquations(&sys), &start, opts)?.roots))
}

/// Solves the reduced equations for the remainder of singular solutions at
/// `β = 0` and classifies each candidate by the physicality constraint.
pub fn solve_reduced<T: Real>(spec: &ModelSpec, opts: &SolveOptions) -> Result<SolutionSet<T>> {
    solve_reduced_with(spec, opts, &SeedRegistry::standard())
}

pub fn solve_reduced_with<T: Real>(spec: &ModelSpec, opts: &SolveOptions, registry: &SeedRegistry) -> Result<SolutionSet<T>> {
    opts.validate()?;
    let spec0 = spec.clone().with_beta(0.0);
    let sys = BetheSystem::<T>::new(&spec0)?;
    let string_len = spec.spin.string_length();
    let mut set = SolutionSet {
        spec: spec0.clone(),
        solutions: Vec::new(),
        seeds_tried: 0,
        failures: 0,
    };
    if spec.magnons < string_len {
        return Ok(set);
    }
    let rem_len = spec.magnons - string_len;
    let ctx = SeedContext::new(&spec0, rem_len);
    let seeds = if rem_len == 0 {
        vec![Vec::new()]
    } else {
        registry.generate(&ctx, opts.seed_count, opts.random_seed)
    };
    set.seeds_tried = seeds.len();
    let results = sweep(&ReducedEquations(&sys), &seeds, opts);
    let poles = sys.reduced_poles();
    for found in results {
        let Some(rem) = found else {
            set.failures += 1;
            continue;
        };
        let rem = RootSet::new(rem);
        let near_pole = rem
            .roots()
            .iter()
            .any(|r| poles.iter().any(|p| cx::dist(r, p).to_f64() <= opts.dedup_distance));
        if near_pole || rem.min_separation() <= opts.dedup_distance || cx::max_norm(rem.roots()) > opts.root_bound {
            set.failures += 1;
            continue;
        }
        let dec = SingularDecomposition::exact(&sys, rem);
        let full = RootSet::new(dec.all_roots()).canonicalize();
        let class = classify_with(&sys, &full, &opts.tolerances);
        if class.kind.is_singular() {
            push_distinct(&mut set.solutions, full, class, opts.dedup_distance);
        } else {
            set.failures += 1;
        }
    }
    set.solutions = finish(set.solutions);
    Ok(set)
}

/// Multi-seed sweep of the full equations plus, at `β = 0`, the reduced
/// sweep for singular solutions.
pub fn enumerate_solutions<T: Real>(spec: &ModelSpec, opts: &SolveOptions) -> Result<SolutionSet<T>> {
    enumerate_solutions_with(spec, opts, &SeedRegistry::standard(), &[])
}

/// [`enumerate_solutions`] with an explicit seed registry and known
/// solutions of a neighbouring problem for continuation seeds.
pub fn enumerate_solutions_with<T: Real>(
    spec: &ModelSpec,
    opts: &SolveOptions,
    registry: &SeedRegistry,
    neighbours: &[Vec<Complex64>],
) -> Result<SolutionSet<T>> {
    opts.validate()?;
    let sys = BetheSystem::<T>::new(spec)?;
    let ctx = SeedContext::new(spec, spec.magnons).with_neighbours(neighbours.to_vec());
    let seeds = registry.generate(&ctx, opts.seed_count, opts.random_seed);
    let results = sweep(&FullEquations(&sys), &seeds, opts);
    let mut set = SolutionSet {
        spec: spec.clone(),
        solutions: Vec::new(),
        seeds_tried: seeds.len(),
        failures: 0,
    };
    for found in results {
        let Some(roots) = found else {
            set.failures += 1;
            continue;
        };
        let roots = RootSet::new(roots).canonicalize();
        if roots.min_separation() <= opts.dedup_distance || cx::max_norm(roots.roots()) > opts.root_bound {
            set.failures += 1;
            continue;
        }
        let class = classify_with(&sys, &roots, &opts.tolerances);
        let keep = match class.kind {
            SolutionKind::NotASolution => false,
            SolutionKind::Regular => true,
            // the reduced sweep owns singular solutions of the untwisted chain
            _ => !sys.is_untwisted(),
        };
        if keep {
            push_distinct(&mut set.solutions, roots, class, opts.dedup_distance);
        } else {
            set.failures += 1;
        }
    }
    if sys.is_untwisted() {
        let reduced = solve_reduced_with::<T>(spec, opts, registry)?;
        set.seeds_tried += reduced.seeds_tried;
        set.failures += reduced.failures;
        for (roots, class) in reduced.solutions {
            push_distinct(&mut set.solutions, roots, class, opts.dedup_distance);
        }
    }
    set.solutions = finish(set.solutions);
    Ok(set)
}

/// Canonical order of a root set (see [`RootSet::canonicalize`]).
pub fn canonicalize<T: Real>(roots: &RootSet<T>) -> RootSet<T> {
    roots.canonicalize()
}
