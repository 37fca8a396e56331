//! Polynomial-cleared Bethe equations, their Jacobians, the reduced system
//! and the product identity.

use num_traits::{One, Zero};

use crate::error::{BetheError, Result};
use crate::numeric::linalg::Matrix;
use crate::numeric::{cx, Cx, Real};

use super::kernel::{BetheKernel, KernelRegistry};
use super::{show, ModelSpec, RootSet};

/// One factor `φ(λ_plus − λ_minus + offset)^power` of an equation side.
struct Factor<T: Real> {
    plus: usize,
    minus: Option<usize>,
    offset: Cx<T>,
    power: u32,
}

/// Bethe equations of one chain at a fixed twist, in working precision `T`.
pub struct BetheSystem<T: Real> {
    spec: ModelSpec,
    kernel: Box<dyn BetheKernel<T>>,
    beta: T,
    twist: Cx<T>,
}

impl<T: Real> BetheSystem<T> {
    /// Validates `spec` and builds the system at `spec.beta`.
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        Self::at_beta(spec, T::from_f64(spec.beta))
    }

    /// Builds the system at an explicit (possibly multiprecision) twist.
    pub fn at_beta(spec: &ModelSpec, beta: T) -> Result<Self> {
        spec.validate()?;
        let kernel = KernelRegistry::<T>::standard().build(spec.family.name(), spec)?;
        let twist = cx::cis(&(-beta.clone()));
        Ok(BetheSystem {
            spec: spec.clone(),
            kernel,
            beta,
            twist,
        })
    }

    /// Same chain with a different twist.
    pub fn with_beta(&self, beta: T) -> Self {
        let spec = self.spec.clone().with_beta(beta.to_f64());
        Self::at_beta(&spec, beta).expect("spec already validated")
    }

    /// Same chain with a different magnon number.
    pub fn with_magnons(&self, magnons: usize) -> Result<Self> {
        Self::at_beta(&self.spec.clone().with_magnons(magnons), self.beta.clone())
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn kernel(&self) -> &dyn BetheKernel<T> {
        self.kernel.as_ref()
    }

    pub fn sites(&self) -> usize {
        self.spec.sites
    }

    pub fn magnons(&self) -> usize {
        self.spec.magnons
    }

    pub fn beta(&self) -> &T {
        &self.beta
    }

    pub fn is_untwisted(&self) -> bool {
        self.beta.is_zero()
    }

    /// `e^{−iβ}`.
    pub fn twist(&self) -> &Cx<T> {
        &self.twist
    }

    pub fn unit(&self) -> Cx<T> {
        self.kernel.unit()
    }

    pub fn phi(&self, z: &Cx<T>) -> Cx<T> {
        self.kernel.phi(z)
    }

    /// `s·u`, the top of the exact string.
    pub fn half_shift(&self) -> Cx<T> {
        self.unit_multiple(self.spec.spin.twice() as i64, 2)
    }

    /// `(num/den)·u`.
    pub fn unit_multiple(&self, num: i64, den: i64) -> Cx<T> {
        let u = self.unit();
        cx::scale(&u, &T::ratio(num, den))
    }

    /// Exact string `s·u, (s−1)·u, …, −s·u`, top first.
    pub fn string_values(&self) -> Vec<Cx<T>> {
        let two_s = self.spec.spin.twice() as i64;
        (0..=two_s).map(|k| self.unit_multiple(two_s - 2 * k, 2)).collect()
    }

    pub fn check_len(&self, roots: &[Cx<T>], expected: usize) -> Result<()> {
        if roots.len() != expected {
            return Err(BetheError::DimensionMismatch {
                expected,
                got: roots.len(),
            });
        }
        Ok(())
    }

    fn full_factors(&self, j: usize, m: usize) -> (Vec<Factor<T>>, Vec<Factor<T>>) {
        let n = self.spec.sites as u32;
        let su = self.half_shift();
        let u = self.unit();
        let mut lhs = vec![Factor {
            plus: j,
            minus: None,
            offset: su.clone(),
            power: n,
        }];
        let mut rhs = vec![Factor {
            plus: j,
            minus: None,
            offset: -su,
            power: n,
        }];
        for k in (0..m).filter(|&k| k != j) {
            lhs.push(Factor {
                plus: j,
                minus: Some(k),
                offset: -u.clone(),
                power: 1,
            });
            rhs.push(Factor {
                plus: j,
                minus: Some(k),
                offset: u.clone(),
                power: 1,
            });
        }
        (lhs, rhs)
    }

    fn reduced_factors(&self, j: usize, m: usize) -> (Vec<Factor<T>>, Vec<Factor<T>>) {
        let n = self.spec.sites as u32;
        let two_s = self.spec.spin.twice() as i64;
        let su = self.half_shift();
        let s1u = self.unit_multiple(two_s + 2, 2);
        let u = self.unit();
        let mut lhs = vec![
            Factor {
                plus: j,
                minus: None,
                offset: su.clone(),
                power: n - 1,
            },
            Factor {
                plus: j,
                minus: None,
                offset: -s1u.clone(),
                power: 1,
            },
        ];
        let mut rhs = vec![
            Factor {
                plus: j,
                minus: None,
                offset: -su,
                power: n - 1,
            },
            Factor {
                plus: j,
                minus: None,
                offset: s1u,
                power: 1,
            },
        ];
        for k in (0..m).filter(|&k| k != j) {
            lhs.push(Factor {
                plus: j,
                minus: Some(k),
                offset: -u.clone(),
                power: 1,
            });
            rhs.push(Factor {
                plus: j,
                minus: Some(k),
                offset: u.clone(),
                power: 1,
            });
        }
        (lhs, rhs)
    }

    fn arg(&self, f: &Factor<T>, roots: &[Cx<T>]) -> Cx<T> {
        let mut z = roots[f.plus].clone() + f.offset.clone();
        if let Some(k) = f.minus {
            z = z - roots[k].clone();
        }
        z
    }

    /// Product of the factors and its partial derivatives with respect to
    /// every root.
    fn product(&self, factors: &[Factor<T>], roots: &[Cx<T>], want_grad: bool) -> (Cx<T>, Vec<Cx<T>>) {
        let args: Vec<Cx<T>> = factors.iter().map(|f| self.arg(f, roots)).collect();
        let phis: Vec<Cx<T>> = args.iter().map(|z| self.kernel.phi(z)).collect();
        let values: Vec<Cx<T>> = factors.iter().zip(&phis).map(|(f, p)| cx::powu(p, f.power)).collect();
        let total = values.iter().fold(Cx::<T>::one(), |acc, v| acc * v.clone());
        if !want_grad {
            return (total, Vec::new());
        }
        let k = values.len();
        let mut prefix = vec![Cx::<T>::one(); k + 1];
        for a in 0..k {
            prefix[a + 1] = prefix[a].clone() * values[a].clone();
        }
        let mut suffix = vec![Cx::<T>::one(); k + 1];
        for a in (0..k).rev() {
            suffix[a] = suffix[a + 1].clone() * values[a].clone();
        }
        let mut grad = vec![Cx::<T>::zero(); roots.len()];
        for (a, f) in factors.iter().enumerate() {
            if f.power == 0 {
                continue;
            }
            let dval = cx::scale(&cx::powu(&phis[a], f.power - 1), &T::from_i64(f.power as i64))
                * self.kernel.dphi(&args[a]);
            let partial = prefix[a].clone() * suffix[a + 1].clone() * dval;
            grad[f.plus] = grad[f.plus].clone() + partial.clone();
            if let Some(m) = f.minus {
                grad[m] = grad[m].clone() - partial;
            }
        }
        (total, grad)
    }

    /// `(LHS_j, e^{−iβ} RHS_j)` of every full equation.
    pub fn residual_sides(&self, roots: &[Cx<T>]) -> Result<Vec<(Cx<T>, Cx<T>)>> {
        self.check_len(roots, self.spec.magnons)?;
        let m = roots.len();
        Ok((0..m)
            .map(|j| {
                let (l, r) = self.full_factors(j, m);
                let (lv, _) = self.product(&l, roots, false);
                let (rv, _) = self.product(&r, roots, false);
                (lv, self.twist.clone() * rv)
            })
            .collect())
    }

    /// `LHS_j − e^{−iβ} RHS_j` of the polynomial-cleared equations.
    pub fn residuals(&self, roots: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        Ok(self.residual_sides(roots)?.into_iter().map(|(l, r)| l - r).collect())
    }

    /// `max_j |LHS_j − RHS_j| / max(1, |LHS_j| + |RHS_j|)`.
    pub fn scaled_residual_norm(&self, roots: &[Cx<T>]) -> Result<f64> {
        Ok(scaled_norm(&self.residual_sides(roots)?))
    }

    /// `max_j |LHS_j − RHS_j| / max(|LHS_j|, |RHS_j|)`: the residual of the
    /// rational form. Infinite when both sides of an equation vanish.
    pub fn relative_residual_norm(&self, roots: &[Cx<T>]) -> Result<f64> {
        Ok(relative_norm(&self.residual_sides(roots)?))
    }

    /// Analytic Jacobian of [`BetheSystem::residuals`].
    pub fn jacobian(&self, roots: &[Cx<T>]) -> Result<Matrix<T>> {
        self.check_len(roots, self.spec.magnons)?;
        let m = roots.len();
        Ok((0..m)
            .map(|j| {
                let (l, r) = self.full_factors(j, m);
                let (_, gl) = self.product(&l, roots, true);
                let (_, gr) = self.product(&r, roots, true);
                gl.into_iter().zip(gr).map(|(a, b)| a - self.twist.clone() * b).collect()
            })
            .collect())
    }

    /// Residuals together with the Jacobian, sharing the factor evaluation.
    pub fn residuals_and_jacobian(&self, roots: &[Cx<T>]) -> Result<(Vec<Cx<T>>, Matrix<T>)> {
        Ok((self.residuals(roots)?, self.jacobian(roots)?))
    }

    fn remainder_len(&self) -> usize {
        self.spec.magnons.saturating_sub(self.spec.spin.string_length())
    }

    /// Points the reduced equations must avoid: `±s·u` and `±(s+1)·u`.
    pub fn reduced_poles(&self) -> Vec<Cx<T>> {
        let two_s = self.spec.spin.twice() as i64;
        vec![
            self.unit_multiple(two_s, 2),
            self.unit_multiple(-two_s, 2),
            self.unit_multiple(two_s + 2, 2),
            self.unit_multiple(-two_s - 2, 2),
        ]
    }

    /// `(LHS_j, RHS_j)` of the reduced equations for the remainder roots.
    pub fn reduced_sides(&self, remainder: &[Cx<T>]) -> Result<Vec<(Cx<T>, Cx<T>)>> {
        if self.spec.magnons < self.spec.spin.string_length() {
            return Err(BetheError::InvalidModel(format!(
                "M = {} is smaller than the string length {}",
                self.spec.magnons,
                self.spec.spin.string_length()
            )));
        }
        self.check_len(remainder, self.remainder_len())?;
        let m = remainder.len();
        Ok((0..m)
            .map(|j| {
                let (l, r) = self.reduced_factors(j, m);
                let (lv, _) = self.product(&l, remainder, false);
                let (rv, _) = self.product(&r, remainder, false);
                (lv, rv)
            })
            .collect())
    }

    /// Residuals of the reduced system obeyed by the remainder of a singular
    /// solution. Errors if a remainder root sits on one of
    /// [`BetheSystem::reduced_poles`].
    pub fn reduced_residuals(&self, remainder: &[Cx<T>], pole_tol: f64) -> Result<Vec<Cx<T>>> {
        self.check_poles(remainder, &self.reduced_poles(), pole_tol)?;
        Ok(self.reduced_sides(remainder)?.into_iter().map(|(l, r)| l - r).collect())
    }

    pub fn scaled_reduced_norm(&self, remainder: &[Cx<T>]) -> Result<f64> {
        Ok(scaled_norm(&self.reduced_sides(remainder)?))
    }

    /// Rational-form residual of the reduced equations, as in
    /// [`BetheSystem::relative_residual_norm`].
    pub fn relative_reduced_norm(&self, remainder: &[Cx<T>]) -> Result<f64> {
        Ok(relative_norm(&self.reduced_sides(remainder)?))
    }

    /// Analytic Jacobian of the reduced residuals.
    pub fn reduced_jacobian(&self, remainder: &[Cx<T>]) -> Result<Matrix<T>> {
        self.check_len(remainder, self.remainder_len())?;
        let m = remainder.len();
        Ok((0..m)
            .map(|j| {
                let (l, r) = self.reduced_factors(j, m);
                let (_, gl) = self.product(&l, remainder, true);
                let (_, gr) = self.product(&r, remainder, true);
                gl.into_iter().zip(gr).map(|(a, b)| a - b).collect()
            })
            .collect())
    }

    /// Fails with [`BetheError::Pole`] if a root lies within `tol` of a pole.
    pub fn check_poles(&self, roots: &[Cx<T>], poles: &[Cx<T>], tol: f64) -> Result<()> {
        for r in roots {
            for p in poles {
                let d = cx::norm_f64(&self.kernel.phi(&(r.clone() - p.clone())));
                if d <= tol {
                    return Err(BetheError::Pole {
                        root: show(r),
                        pole: show(p),
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// `∏_j φ(λ_j + s·u)/φ(λ_j − s·u)` over the given roots.
    fn ratio_product(&self, roots: &[Cx<T>], pole_tol: f64) -> Result<Cx<T>> {
        let su = self.half_shift();
        self.check_poles(roots, &[su.clone(), -su.clone()], pole_tol)?;
        Ok(roots.iter().fold(Cx::<T>::one(), |acc, r| {
            acc * self.kernel.phi(&(r.clone() + su.clone())) / self.kernel.phi(&(r.clone() - su.clone()))
        }))
    }

    /// `[∏_j φ(λ_j + s·u)/φ(λ_j − s·u)]^N · e^{iMβ}`; equal to 1 on every
    /// solution of the twisted equations.
    pub fn product_identity(&self, roots: &[Cx<T>], pole_tol: f64) -> Result<Cx<T>> {
        self.check_len(roots, self.spec.magnons)?;
        let p = cx::powu(&self.ratio_product(roots, pole_tol)?, self.spec.sites as u32);
        let phase = cx::cis(&(self.beta.clone() * T::from_i64(roots.len() as i64)));
        Ok(p * phase)
    }

    /// `product_identity − 1` and its gradient; `None` when a root lies within
    /// `pole_tol` of `±s·u`.
    pub fn product_identity_gradient(&self, roots: &[Cx<T>], pole_tol: f64) -> Result<Option<(Cx<T>, Vec<Cx<T>>)>> {
        self.check_len(roots, self.spec.magnons)?;
        let su = self.half_shift();
        if self.check_poles(roots, &[su.clone(), -su.clone()], pole_tol).is_err() {
            return Ok(None);
        }
        let p = self.product_identity(roots, 0.0)?;
        let n = cx::real(T::from_i64(self.spec.sites as i64));
        let grad = roots
            .iter()
            .map(|r| {
                let plus = r.clone() + su.clone();
                let minus = r.clone() - su.clone();
                let d = self.kernel.dphi(&plus) / self.kernel.phi(&plus) - self.kernel.dphi(&minus) / self.kernel.phi(&minus);
                p.clone() * n.clone() * d
            })
            .collect();
        Ok(Some((p - Cx::one(), grad)))
    }

    /// `[(−1)^{2s} ∏_{remainder} φ(λ + s·u)/φ(λ − s·u)]^N`.
    pub fn constraint_value(&self, remainder: &[Cx<T>], pole_tol: f64) -> Result<Cx<T>> {
        let mut p = self.ratio_product(remainder, pole_tol)?;
        if self.spec.spin.twice() % 2 == 1 {
            p = -p;
        }
        Ok(cx::powu(&p, self.spec.sites as u32))
    }

    /// Root set helper: residuals of a [`RootSet`].
    pub fn bethe_residual(&self, roots: &RootSet<T>) -> Result<Vec<Cx<T>>> {
        self.residuals(roots.roots())
    }
}

fn scaled_norm<T: Real>(sides: &[(Cx<T>, Cx<T>)]) -> f64 {
    sides
        .iter()
        .map(|(l, r)| {
            let diff = cx::norm_f64(&(l.clone() - r.clone()));
            diff / (cx::norm_f64(l) + cx::norm_f64(r)).max(1.0)
        })
        .fold(0.0, f64::max)
}

fn relative_norm<T: Real>(sides: &[(Cx<T>, Cx<T>)]) -> f64 {
    sides
        .iter()
        .map(|(l, r)| {
            let scale = cx::norm_f64(l).max(cx::norm_f64(r));
            if scale == 0.0 {
                f64::INFINITY
            } else {
                cx::norm_f64(&(l.clone() - r.clone())) / scale
            }
        })
        .fold(0.0, f64::max)
}
