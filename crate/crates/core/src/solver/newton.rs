//! Damped Newton iteration on square complex systems.

use crate::error::{BetheError, Result};
use crate::model::BetheSystem;
use crate::numeric::linalg::{self, Matrix};
use crate::numeric::{cx, Cx, Real, Tolerances};

use super::SolveOptions;

/// A square system `F(x) = 0` with Jacobian.
pub trait NonlinearSystem<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn residuals(&self, x: &[Cx<T>]) -> Result<Vec<Cx<T>>>;
    fn jacobian(&self, x: &[Cx<T>]) -> Result<Matrix<T>>;
    /// Size-independent convergence measure.
    fn scaled_norm(&self, x: &[Cx<T>]) -> Result<f64>;
    /// An equation `g(x) = 0` implied by the system, with its gradient.
    /// Newton appends it as an extra least-squares row.
    fn auxiliary(&self, _x: &[Cx<T>]) -> Result<Option<(Cx<T>, Vec<Cx<T>>)>> {
        Ok(None)
    }
}

/// The full twisted equations.
pub struct FullEquations<'a, T: Real>(pub &'a BetheSystem<T>);

/// The reduced equations for the remainder of a singular solution.
pub struct ReducedEquations<'a, T: Real>(pub &'a BetheSystem<T>);

impl<T: Real> NonlinearSystem<T> for FullEquations<'_, T> {
    fn dim(&self) -> usize {
        self.0.magnons()
    }
    fn residuals(&self, x: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        self.0.residuals(x)
    }
    fn jacobian(&self, x: &[Cx<T>]) -> Result<Matrix<T>> {
        self.0.jacobian(x)
    }
    fn scaled_norm(&self, x: &[Cx<T>]) -> Result<f64> {
        self.0.scaled_residual_norm(x)
    }
    /// The product identity: near exact strings the polynomial equations
    /// are nearly degenerate in the common shift of the string, which the
    /// identity fixes linearly.
    fn auxiliary(&self, x: &[Cx<T>]) -> Result<Option<(Cx<T>, Vec<Cx<T>>)>> {
        let tol = Tolerances::for_precision::<T>().detection;
        self.0.product_identity_gradient(x, tol)
    }
}

impl<T: Real> NonlinearSystem<T> for ReducedEquations<'_, T> {
    fn dim(&self) -> usize {
        self.0.magnons().saturating_sub(self.0.spec().spin.string_length())
    }
    fn residuals(&self, x: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        Ok(self.0.reduced_sides(x)?.into_iter().map(|(l, r)| l - r).collect())
    }
    fn jacobian(&self, x: &[Cx<T>]) -> Result<Matrix<T>> {
        self.0.reduced_jacobian(x)
    }
    fn scaled_norm(&self, x: &[Cx<T>]) -> Result<f64> {
        self.0.scaled_reduced_norm(x)
    }
}

/// Central finite-difference Jacobian; used to cross-check analytic ones.
pub fn finite_difference_jacobian<T: Real, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    x: &[Cx<T>],
    h: &T,
) -> Result<Matrix<T>> {
    let n = x.len();
    let mut jac = vec![vec![Cx::<T>::new(T::zero(), T::zero()); n]; n];
    let two_h = cx::real(h.clone() * T::from_i64(2));
    for m in 0..n {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[m] = plus[m].clone() + cx::real(h.clone());
        minus[m] = minus[m].clone() - cx::real(h.clone());
        let fp = system.residuals(&plus)?;
        let fm = system.residuals(&minus)?;
        for j in 0..n {
            jac[j][m] = (fp[j].clone() - fm[j].clone()) / two_h.clone();
        }
    }
    Ok(jac)
}

/// Outcome of a successful Newton run.
#[derive(Clone, Debug)]
pub struct NewtonOutcome<T: Real> {
    pub roots: Vec<Cx<T>>,
    pub iterations: usize,
    pub residual: f64,
}

fn merit_of<T: Real>(f: &[Cx<T>], aux: &Option<(Cx<T>, Vec<Cx<T>>)>) -> f64 {
    let base = cx::l2_norm(f).to_f64();
    match aux {
        Some((g, _)) => base.hypot(cx::norm_f64(g)),
        None => base,
    }
}

/// Newton iteration with backtracking: the step is halved until the residual
/// 2-norm decreases. Converged when the scaled norm is below the residual
/// tolerance and the next Newton correction is below the step tolerance. A
/// system's auxiliary equation turns each step into a Gauss–Newton
/// least-squares step.
pub fn newton<T: Real, S: NonlinearSystem<T> + ?Sized>(
    system: &S,
    seed: &[Cx<T>],
    opts: &SolveOptions,
) -> Result<NewtonOutcome<T>> {
    if seed.len() != system.dim() {
        return Err(BetheError::DimensionMismatch {
            expected: system.dim(),
            got: seed.len(),
        });
    }
    let mut x = seed.to_vec();
    let mut f = system.residuals(&x)?;
    let mut aux = system.auxiliary(&x)?;
    let mut merit = merit_of(&f, &aux);
    let mut scaled = system.scaled_norm(&x)?;
    let threshold = opts.pivot_threshold.unwrap_or_else(linalg::default_pivot_threshold::<T>);
    for iteration in 0..=opts.max_iterations {
        if !merit.is_finite() || cx::max_norm(&x) > opts.root_bound {
            break;
        }
        // dx = 0 solves J·dx = −F even when J is singular
        if merit == 0.0 {
            return Ok(NewtonOutcome {
                roots: x,
                iterations: iteration,
                residual: scaled,
            });
        }
        let mut jac = system.jacobian(&x)?;
        let mut rhs: Vec<Cx<T>> = f.iter().map(|v| -v.clone()).collect();
        let dx = match &aux {
            Some((g, grad)) => {
                jac.push(grad.clone());
                rhs.push(-g.clone());
                linalg::least_squares(&jac, &rhs, threshold).map(|(dx, _)| dx)
            }
            None => linalg::lu_solve(&jac, &rhs, threshold),
        }
        .map_err(|e| BetheError::SingularJacobian {
            iteration,
            pivot_ratio: e.pivot_ratio,
        })?;
        // A small residual alone is not enough: the polynomial form has
        // shallow valleys next to exact strings where the residual is tiny
        // but the roots are still far from a solution.
        let step = cx::max_norm(&dx);
        if scaled < opts.residual_tolerance && step <= opts.step_tolerance * cx::max_norm(&x).max(1.0) {
            // the last correction is already computed; keep it unless it hurts
            let polished: Vec<Cx<T>> = x.iter().zip(&dx).map(|(a, d)| a.clone() + d.clone()).collect();
            let fp = system.residuals(&polished)?;
            let ap = system.auxiliary(&polished)?;
            if merit_of(&fp, &ap) <= merit {
                x = polished;
                scaled = system.scaled_norm(&x)?;
            }
            return Ok(NewtonOutcome {
                roots: x,
                iterations: iteration,
                residual: scaled,
            });
        }
        if iteration == opts.max_iterations {
            break;
        }
        let mut t = T::from_f64(opts.step_damping);
        let half = T::ratio(1, 2);
        let mut accepted = false;
        for _ in 0..opts.max_halvings {
            let trial: Vec<Cx<T>> = x
                .iter()
                .zip(&dx)
                .map(|(a, d)| a.clone() + cx::scale(d, &t))
                .collect();
            let ft = system.residuals(&trial)?;
            let at = system.auxiliary(&trial)?;
            let mt = merit_of(&ft, &at);
            if mt.is_finite() && (mt < merit || (mt == 0.0 && merit == 0.0)) {
                x = trial;
                f = ft;
                aux = at;
                merit = mt;
                accepted = true;
                break;
            }
            t = t * half.clone();
        }
        if !accepted {
            break;
        }
        scaled = system.scaled_norm(&x)?;
    }
    Err(BetheError::NonConvergence {
        iterations: opts.max_iterations,
        residual: scaled,
    })
}
