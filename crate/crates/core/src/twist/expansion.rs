//! Order-by-order expansion of a physical singular solution in the twist.
//!
//! String members are written as `λ_k = v_k + β·ũ(β) + β^N·ω_k(β)` with
//! `Σ_k ω_k = 0`, remainder roots as `λ_r = ρ_r + Σ_l a_r^{(l)} β^l`. With
//! this ansatz every string equation is divisible by `β^N`; the quotients,
//! the remainder equations and the logarithm of the product identity are
//! regular power series in `β`.
//!
//! Level `l` fixes `ũ_l`, `ω_k^{(l)}` and `a_r^{(l+1)}` from order `l` of the
//! string quotients and order `l + 1` of the remainder equations and the
//! product identity. Level 0 is split: the remainder equations and the
//! product identity at order 1 give `ũ_0` and `a^{(1)}`, then the string
//! quotients at order 0 give `ω^{(0)}`. From level 1 on the equations are
//! affine in the new unknowns, so their matrix is read off by probing.

use num_traits::{One, Zero};

use crate::error::{BetheError, Result};
use crate::model::{BetheSystem, ModelSpec, RootSet, SingularDecomposition};
use crate::numeric::linalg::{self, Matrix};
use crate::numeric::series::Series;
use crate::numeric::{cx, Cx, Real, Tolerances};

/// Twist expansion `λ_j(β) = λ_j^{(0)} + Σ_{l=1}^{L} c_j^{(l)} β^l`.
#[derive(Clone, Debug)]
pub struct TwistSeries<T: Real> {
    pub spec: ModelSpec,
    pub base: SingularDecomposition<T>,
    /// `coefficients[j][l − 1] = c_j^{(l)}`, roots ordered as
    /// [`SingularDecomposition::all_roots`].
    pub coefficients: Vec<Vec<Cx<T>>>,
    pub order: usize,
}

impl<T: Real> TwistSeries<T> {
    /// `c_j^{(l)}` for `l ≥ 1`, zero beyond the computed order.
    pub fn coefficient(&self, j: usize, l: usize) -> Cx<T> {
        assert!(l >= 1, "coefficients start at order 1");
        self.coefficients[j].get(l - 1).cloned().unwrap_or_else(Cx::zero)
    }

    /// Root `j` as a power series of length `len`.
    pub fn root_series(&self, j: usize, len: usize) -> Series<T> {
        let mut c = vec![self.base.all_roots()[j].clone()];
        c.extend(self.coefficients[j].iter().cloned());
        Series::from_coeffs(c, len)
    }

    /// All roots as series of length `len`, in base order.
    pub fn all_series(&self, len: usize) -> Vec<Series<T>> {
        (0..self.coefficients.len()).map(|j| self.root_series(j, len)).collect()
    }

    /// The truncated series summed at `beta`, in base order.
    pub fn evaluate(&self, beta: &T) -> RootSet<T> {
        let b = cx::real(beta.clone());
        RootSet::new(self.all_series(self.order + 1).iter().map(|s| s.eval(&b)).collect())
    }

    /// Copy truncated to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        TwistSeries {
            spec: self.spec.clone(),
            base: self.base.clone(),
            coefficients: self.coefficients.iter().map(|c| c[..order].to_vec()).collect(),
            order,
        }
    }
}

/// [`TwistSeries::evaluate`] as a free function.
pub fn evaluate_series<T: Real>(series: &TwistSeries<T>, beta: &T) -> RootSet<T> {
    series.evaluate(beta)
}

/// Common first-order shift `c` of the string roots.
pub fn first_order_correction<T: Real>(sys: &BetheSystem<T>, dec: &SingularDecomposition<T>) -> Result<Cx<T>> {
    Ok(expand_series(sys, dec, 1)?.coefficient(0, 1))
}

/// Unknown series of the ansatz.
struct Ansatz<T: Real> {
    sites: usize,
    string: Vec<Cx<T>>,
    remainder: Vec<Cx<T>>,
    /// `ũ_l`.
    shift: Vec<Cx<T>>,
    /// `ω_k^{(l)}` for the free members `k < S − 1`; the last is minus their sum.
    omega: Vec<Vec<Cx<T>>>,
    /// `a_r^{(l)}` for `l ≥ 1`.
    rem: Vec<Vec<Cx<T>>>,
}

impl<T: Real> Ansatz<T> {
    fn string_len(&self) -> usize {
        self.string.len()
    }

    fn omega_series(&self, k: usize, len: usize) -> Series<T> {
        let s = self.string_len();
        let coeffs = if k + 1 < s {
            self.omega[k].clone()
        } else {
            let levels = self.omega.first().map_or(0, |w| w.len());
            (0..levels)
                .map(|l| self.omega.iter().fold(Cx::<T>::zero(), |acc, w| acc - w[l].clone()))
                .collect()
        };
        Series::from_coeffs(coeffs, len)
    }

    /// `x_k = ũ + β^{N−1} ω_k`, so that `λ_k = v_k + β x_k`.
    fn x_series(&self, k: usize, len: usize) -> Series<T> {
        let mut c = self.shift.clone();
        c.resize(len, Cx::zero());
        let w = self.omega_series(k, len);
        let lag = self.sites - 1;
        for l in lag..len {
            c[l] = c[l].clone() + w.coeff(l - lag);
        }
        Series::from_coeffs(c, len)
    }

    fn root_series(&self, len: usize) -> Vec<Series<T>> {
        let mut out = Vec::with_capacity(self.string.len() + self.remainder.len());
        for (k, v) in self.string.iter().enumerate() {
            let x = self.x_series(k, len);
            let mut c = vec![v.clone()];
            c.extend(x.coeffs().iter().cloned());
            out.push(Series::from_coeffs(c, len));
        }
        for (r, rho) in self.remainder.iter().enumerate() {
            let mut c = vec![rho.clone()];
            c.extend(self.rem[r].iter().cloned());
            out.push(Series::from_coeffs(c, len));
        }
        out
    }

    fn coefficients(&self, order: usize) -> Vec<Vec<Cx<T>>> {
        let len = order + 1;
        self.root_series(len)
            .iter()
            .map(|s| s.coeffs()[1..].to_vec())
            .collect()
    }
}

/// `φ(β^p x)/β^p`.
fn scaled_phi<T: Real>(sys: &BetheSystem<T>, x: &Series<T>, p: usize) -> Series<T> {
    let len = x.len();
    let mut c = vec![Cx::<T>::zero(); p];
    c.extend(x.coeffs().iter().cloned());
    let y = sys.kernel().phi_series(&Series::from_coeffs(c, len + p));
    Series::from_coeffs(y.coeffs()[p..].to_vec(), len)
}

fn phi_of<T: Real>(sys: &BetheSystem<T>, a: &Series<T>, shift: &Cx<T>) -> Series<T> {
    sys.kernel().phi_series(&a.add_scalar(shift))
}

/// Equation series of the ansatz: string quotients, remainder equations and
/// `N·ln Π + iMβ` (the logarithm of the product identity, orders ≥ 1 only).
struct Equations<T: Real> {
    string: Vec<Series<T>>,
    remainder: Vec<Series<T>>,
    product: Option<Series<T>>,
    /// `Π(0)^N`, the constraint value.
    constraint: Cx<T>,
}

fn equations<T: Real>(sys: &BetheSystem<T>, a: &Ansatz<T>, len: usize) -> Equations<T> {
    let n = a.sites as u32;
    let s = a.string_len();
    let su = sys.half_shift();
    let u = sys.unit();
    let roots = a.root_series(len);
    let twist = Series::variable(len).scale(&-cx::i::<T>()).exp();
    let mut plus = Vec::with_capacity(roots.len());
    let mut minus = Vec::with_capacity(roots.len());
    for (j, lam) in roots.iter().enumerate() {
        let p = if j == s - 1 {
            scaled_phi(sys, &a.x_series(j, len), 1)
        } else {
            phi_of(sys, lam, &su)
        };
        let m = if j == 0 {
            scaled_phi(sys, &a.x_series(j, len), 1)
        } else {
            phi_of(sys, lam, &-su.clone())
        };
        plus.push(p);
        minus.push(m);
    }
    let omega: Vec<Series<T>> = (0..s).map(|k| a.omega_series(k, len)).collect();
    let mut string_eqs = Vec::with_capacity(s);
    let mut rem_eqs = Vec::with_capacity(roots.len() - s);
    for j in 0..roots.len() {
        let mut lhs = plus[j].powu(n);
        let mut rhs = minus[j].powu(n).mul(&twist);
        for k in 0..roots.len() {
            if k == j {
                continue;
            }
            let diff = roots[j].sub(&roots[k]);
            let l_factor = if k < s && k == j + 1 {
                scaled_phi(sys, &omega[j].sub(&omega[k]), a.sites)
            } else {
                phi_of(sys, &diff, &-u.clone())
            };
            let r_factor = if j < s && k + 1 == j {
                scaled_phi(sys, &omega[j].sub(&omega[k]), a.sites)
            } else {
                phi_of(sys, &diff, &u)
            };
            lhs = lhs.mul(&l_factor);
            rhs = rhs.mul(&r_factor);
        }
        let eq = lhs.sub(&rhs);
        if j < s {
            string_eqs.push(eq);
        } else {
            rem_eqs.push(eq);
        }
    }
    let num = plus.iter().fold(Series::constant(Cx::one(), len), |acc, p| acc.mul(p));
    let den = minus.iter().fold(Series::constant(Cx::one(), len), |acc, m| acc.mul(m));
    let ratio = num.div(&den);
    let constraint = ratio
        .as_ref()
        .map(|r| cx::powu(&r.coeff(0), n))
        .unwrap_or_else(|| Cx::new(T::from_f64(f64::NAN), T::zero()));
    let m_beta = Series::variable(len).scale(&cx::imag(T::from_i64(roots.len() as i64)));
    let product = ratio
        .and_then(|r| r.ln())
        .map(|l| l.scale(&cx::real(T::from_i64(n as i64))).add(&m_beta));
    Equations {
        string: string_eqs,
        remainder: rem_eqs,
        product,
        constraint,
    }
}

/// Which block of unknowns a level step solves for.
#[derive(Clone, Copy)]
enum Step {
    /// `ũ_0` and `a^{(1)}`.
    ShiftAndRemainder,
    /// `ω^{(0)}`.
    Omega,
    /// `ũ_l`, `ω^{(l)}` and `a^{(l+1)}`.
    Level(usize),
}

fn unknown_count<T: Real>(a: &Ansatz<T>, step: Step) -> usize {
    let s_free = a.string_len() - 1;
    let r = a.remainder.len();
    match step {
        Step::ShiftAndRemainder => 1 + r,
        Step::Omega => s_free,
        Step::Level(_) => 1 + s_free + r,
    }
}

fn set_unknowns<T: Real>(a: &mut Ansatz<T>, step: Step, x: &[Cx<T>]) {
    let s_free = a.string_len() - 1;
    let r = a.remainder.len();
    match step {
        Step::ShiftAndRemainder => {
            a.shift[0] = x[0].clone();
            for k in 0..r {
                a.rem[k][0] = x[1 + k].clone();
            }
        }
        Step::Omega => {
            for k in 0..s_free {
                a.omega[k][0] = x[k].clone();
            }
        }
        Step::Level(l) => {
            a.shift[l] = x[0].clone();
            for k in 0..s_free {
                a.omega[k][l] = x[1 + k].clone();
            }
            for k in 0..r {
                a.rem[k][l] = x[1 + s_free + k].clone();
            }
        }
    }
}

fn residual_block<T: Real>(sys: &BetheSystem<T>, a: &Ansatz<T>, step: Step, len: usize) -> Result<Vec<Cx<T>>> {
    let eq = equations(sys, a, len);
    let product = |o: usize| -> Result<Cx<T>> {
        eq.product.as_ref().map(|p| p.coeff(o)).ok_or(BetheError::Inconsistent {
            order: o,
            residual: f64::INFINITY,
        })
    };
    let mut out = Vec::new();
    match step {
        Step::ShiftAndRemainder => {
            out.extend(eq.remainder.iter().map(|e| e.coeff(1)));
            out.push(product(1)?);
        }
        Step::Omega => out.extend(eq.string.iter().map(|e| e.coeff(0))),
        Step::Level(l) => {
            out.extend(eq.string.iter().map(|e| e.coeff(l)));
            out.extend(eq.remainder.iter().map(|e| e.coeff(l + 1)));
            out.push(product(l + 1)?);
        }
    }
    Ok(out)
}

/// Solves one affine block by probing unit directions around `base` and a
/// least-squares solve; reports an inconsistent block.
fn solve_block<T: Real>(
    sys: &BetheSystem<T>,
    a: &mut Ansatz<T>,
    step: Step,
    base: &[Cx<T>],
    order: usize,
    len: usize,
    tol: &Tolerances,
) -> Result<()> {
    let n = unknown_count(a, step);
    set_unknowns(a, step, base);
    let r0 = residual_block(sys, a, step, len)?;
    let mut columns = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = base.to_vec();
        x[k] = x[k].clone() + Cx::one();
        set_unknowns(a, step, &x);
        let rk = residual_block(sys, a, step, len)?;
        columns.push(rk.iter().zip(&r0).map(|(p, q)| p.clone() - q.clone()).collect::<Vec<_>>());
    }
    let jac: Matrix<T> = (0..r0.len())
        .map(|row| columns.iter().map(|c| c[row].clone()).collect())
        .collect();
    let rhs: Vec<Cx<T>> = r0.iter().map(|v| -v.clone()).collect();
    let threshold = linalg::default_pivot_threshold::<T>().max(tol.detection * tol.detection);
    let (dx, _) = linalg::least_squares(&jac, &rhs, threshold).map_err(|_| BetheError::Inconsistent {
        order,
        residual: f64::INFINITY,
    })?;
    let x: Vec<Cx<T>> = base.iter().zip(&dx).map(|(b, d)| b.clone() + d.clone()).collect();
    set_unknowns(a, step, &x);
    let after = residual_block(sys, a, step, len)?;
    let scale = r0
        .iter()
        .map(cx::norm_f64)
        .chain(jac.iter().flatten().map(cx::norm_f64))
        .fold(1.0, f64::max);
    let residual = cx::max_norm(&after) / scale;
    if !(residual <= tol.detection) {
        return Err(BetheError::Inconsistent { order, residual });
    }
    Ok(())
}

/// Twist expansion of a physical singular solution to order `order`.
///
/// Fails with [`BetheError::Inconsistent`] at order 0 when the remainder
/// violates the reduced equations or the constraint, and at the first order
/// whose linear system has no solution otherwise.
pub fn expand_series<T: Real>(
    sys: &BetheSystem<T>,
    dec: &SingularDecomposition<T>,
    order: usize,
) -> Result<TwistSeries<T>> {
    expand_series_with(sys, dec, order, &Tolerances::for_precision::<T>())
}

pub fn expand_series_with<T: Real>(
    sys: &BetheSystem<T>,
    dec: &SingularDecomposition<T>,
    order: usize,
    tol: &Tolerances,
) -> Result<TwistSeries<T>> {
    if order == 0 {
        return Err(BetheError::InvalidOptions("expansion order must be at least 1".into()));
    }
    let spec = sys.spec().clone().with_beta(0.0);
    let n = spec.sites;
    let s = spec.spin.string_length();
    if dec.string_part.len() != s || dec.remainder.len() + s != spec.magnons {
        return Err(BetheError::DimensionMismatch {
            expected: spec.magnons,
            got: dec.string_part.len() + dec.remainder.len(),
        });
    }
    if n < 3 {
        return Err(BetheError::Unsupported(format!("twist expansion needs N ≥ 3, got N = {n}")));
    }
    let sys0 = BetheSystem::<T>::at_beta(&spec, T::zero())?;
    sys0.check_poles(dec.remainder.roots(), &sys0.reduced_poles(), tol.detection)?;
    let r = dec.remainder.len();
    let len = order + 1;
    let mut a = Ansatz {
        sites: n,
        string: sys0.string_values(),
        remainder: dec.remainder.roots().to_vec(),
        shift: vec![Cx::zero(); order],
        omega: vec![vec![Cx::zero(); order]; s - 1],
        rem: vec![vec![Cx::zero(); order]; r],
    };
    // order 0: the reduced equations and the constraint
    a.shift[0] = Cx::one();
    let eq0 = equations(&sys0, &a, len);
    let reduced = sys0.scaled_reduced_norm(dec.remainder.roots())?;
    let violation = cx::norm_f64(&(eq0.constraint.clone() - Cx::one()));
    if reduced > tol.solution.max(tol.detection * tol.detection) || !(violation <= tol.constraint) {
        return Err(BetheError::Inconsistent {
            order: 0,
            residual: reduced.max(violation),
        });
    }
    let mut base = vec![Cx::zero(); 1 + r];
    base[0] = Cx::one();
    solve_block(&sys0, &mut a, Step::ShiftAndRemainder, &base, 1, len, tol)?;
    if cx::norm_f64(&a.shift[0]) <= tol.detection {
        return Err(BetheError::Unsupported(
            "vanishing first-order shift; the expansion ansatz does not apply".into(),
        ));
    }
    solve_block(&sys0, &mut a, Step::Omega, &vec![Cx::zero(); s - 1], 0, len, tol)?;
    for l in 1..order {
        let base = vec![Cx::zero(); unknown_count(&a, Step::Level(l))];
        solve_block(&sys0, &mut a, Step::Level(l), &base, l + 1, len, tol)?;
    }
    Ok(TwistSeries {
        spec,
        base: SingularDecomposition {
            string_part: a.string.clone(),
            remainder: dec.remainder.clone(),
        },
        coefficients: a.coefficients(order),
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{with_digits, Mp};

    fn pair_series(n: usize, order: usize) -> TwistSeries<Mp> {
        let sys = BetheSystem::<Mp>::new(&ModelSpec::xxx(n, 2)).unwrap();
        let dec = SingularDecomposition::exact(&sys, RootSet::empty());
        expand_series(&sys, &dec, order).unwrap()
    }

    #[test]
    fn four_site_pair_coefficients() {
        with_digits(40, || {
            let s = pair_series(4, 4);
            let want = [
                (0.25, 0.0, 0.25, 0.0),
                (0.0, 0.0, 0.0, 0.0),
                (-1.0 / 96.0, 0.0, -1.0 / 96.0, 0.0),
                (0.0, 1.0 / 256.0, 0.0, -1.0 / 256.0),
            ];
            for (l, w) in want.iter().enumerate() {
                let c1 = cx::to_f64(&s.coefficient(0, l + 1));
                let c2 = cx::to_f64(&s.coefficient(1, l + 1));
                assert!((c1.re - w.0).abs() < 1e-15 && (c1.im - w.1).abs() < 1e-15, "l={} {c1}", l + 1);
                assert!((c2.re - w.2).abs() < 1e-15 && (c2.im - w.3).abs() < 1e-15, "l={} {c2}", l + 1);
            }
        });
    }

    #[test]
    fn lower_orders_are_stable() {
        with_digits(40, || {
            let hi = pair_series(6, 6);
            let lo = pair_series(6, 3);
            for j in 0..2 {
                for l in 1..=3 {
                    assert!(cx::norm_f64(&(hi.coefficient(j, l) - lo.coefficient(j, l))) < 1e-30);
                }
            }
        });
    }

    #[test]
    fn odd_chain_pair_is_inconsistent() {
        let sys = BetheSystem::<f64>::new(&ModelSpec::xxx(5, 2)).unwrap();
        let dec = SingularDecomposition::exact(&sys, RootSet::empty());
        assert!(matches!(
            expand_series(&sys, &dec, 2),
            Err(BetheError::Inconsistent { order: 0, .. })
        ));
    }
}
