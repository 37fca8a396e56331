//! Continuation of a solution in the twist angle.

use crate::error::{BetheError, Result};
use crate::model::{root_set_distance, BetheSystem, ModelSpec, RootSet};
use crate::numeric::{Cx, Real};
use crate::solver::{newton, FullEquations, SolveOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyOptions {
    /// Newton settings for each corrector step.
    pub solve: SolveOptions,
    /// Largest accepted distance between predictor and corrected roots.
    pub max_jump: f64,
    /// Total number of step halvings allowed along the path.
    pub max_bisections: usize,
}

impl HomotopyOptions {
    pub fn for_precision<T: Real>() -> Self {
        HomotopyOptions {
            solve: SolveOptions::for_precision::<T>(),
            max_jump: 0.05,
            max_bisections: 60,
        }
    }
}

/// One accepted point of a tracked path.
#[derive(Clone, Debug)]
pub struct PathPoint<T: Real> {
    pub beta: T,
    pub roots: RootSet<T>,
}

/// `steps + 1` twist values from `start` to `end`: geometric when both have
/// the same sign and are nonzero, linear otherwise.
pub fn schedule<T: Real>(start: &T, end: &T, steps: usize) -> Vec<T> {
    let steps = steps.max(1);
    let same_sign = (start.clone() * end.clone()) > T::zero();
    (0..=steps)
        .map(|k| {
            if k == steps {
                return end.clone();
            }
            let t = T::ratio(k as i64, steps as i64);
            if same_sign {
                let ratio = end.clone() / start.clone();
                start.clone() * (t * ratio.ln()).exp()
            } else {
                start.clone() + (end.clone() - start.clone()) * t
            }
        })
        .collect()
}

fn correct<T: Real>(
    spec: &ModelSpec,
    beta: &T,
    seed: &[Cx<T>],
    opts: &SolveOptions,
) -> Result<Vec<Cx<T>>> {
    let sys = BetheSystem::<T>::at_beta(&spec.clone().with_beta(beta.to_f64()), beta.clone())?;
    Ok(newton(&FullEquations(&sys), seed, opts)?.roots)
}

/// Tracks `start`, a solution at `beta_start`, to `beta_end` along a
/// `steps`-point schedule. Each step predicts by secant extrapolation,
/// corrects with Newton and halves the step on failure or on a jump larger
/// than `max_jump`. The roots keep the order of `start`.
pub fn homotopy_track<T: Real>(
    spec: &ModelSpec,
    start: &RootSet<T>,
    beta_start: &T,
    beta_end: &T,
    steps: usize,
    opts: &HomotopyOptions,
) -> Result<Vec<PathPoint<T>>> {
    let first = correct(spec, beta_start, start.roots(), &opts.solve).map_err(|e| BetheError::PathTracking {
        beta: beta_start.to_f64(),
        reason: format!("start is not a solution: {e}"),
    })?;
    // a zero-length track returns its (validated) start untouched
    if beta_start == beta_end {
        return Ok(vec![PathPoint {
            beta: beta_start.clone(),
            roots: start.clone(),
        }]);
    }
    let mut path = vec![PathPoint {
        beta: beta_start.clone(),
        roots: RootSet::new(first),
    }];
    let mut targets: Vec<T> = schedule(beta_start, beta_end, steps).into_iter().skip(1).rev().collect();
    let mut bisections = 0;
    while let Some(target) = targets.pop() {
        let last = path.last().expect("path starts non-empty");
        let predicted: Vec<Cx<T>> = match path.len() {
            1 => last.roots.roots().to_vec(),
            k => {
                let prev = &path[k - 2];
                let t = (target.clone() - last.beta.clone()) / (last.beta.clone() - prev.beta.clone());
                last.roots
                    .roots()
                    .iter()
                    .zip(prev.roots.roots())
                    .map(|(a, b)| a.clone() + (a.clone() - b.clone()) * Cx::new(t.clone(), T::zero()))
                    .collect()
            }
        };
        let attempt = correct(spec, &target, &predicted, &opts.solve);
        let failure = match attempt {
            Ok(roots) => {
                let roots = RootSet::new(roots);
                let jump = root_set_distance(&roots, &RootSet::new(predicted));
                if jump <= opts.max_jump {
                    path.push(PathPoint { beta: target, roots });
                    continue;
                }
                format!("corrector jumped by {jump:.3e}")
            }
            Err(e) => e.to_string(),
        };
        bisections += 1;
        if bisections > opts.max_bisections {
            return Err(BetheError::PathTracking {
                beta: target.to_f64(),
                reason: failure,
            });
        }
        let from = path.last().expect("path starts non-empty").beta.clone();
        let mid = (from + target.clone()) * T::ratio(1, 2);
        targets.push(target);
        targets.push(mid);
    }
    Ok(path)
}
