//! Regulated product identities and their limits.
//!
//! A [`Regulator`] deforms a singular solution by a small parameter `h` and
//! evaluates the product identity on the deformed roots. Schemes are
//! registered by name in a [`RegulatorRegistry`]; `"twist"` follows the twist
//! expansion, `"epsilon"` shifts the exact string by `ε` at zero twist.

use num_traits::One;

use crate::error::{BetheError, Result};
use crate::model::{BetheSystem, ModelSpec, SingularDecomposition};
use crate::numeric::extrapolate::{self, Extrapolated};
use crate::numeric::{cx, Cx, Real, Tolerances};

use super::expansion::{expand_series, TwistSeries};

pub trait Regulator<T: Real>: Send + Sync {
    fn name(&self) -> &'static str;
    /// Product-identity value with the regulator set to `h > 0`.
    fn value(&self, h: &T) -> Result<Cx<T>>;
}

/// Twist scheme: roots from the order-`N` expansion at `β = h`, identity
/// including the phase `e^{iMβ}`.
pub struct TwistRegulator<T: Real> {
    series: TwistSeries<T>,
}

impl<T: Real> TwistRegulator<T> {
    pub fn new(series: TwistSeries<T>) -> Self {
        TwistRegulator { series }
    }
}

impl<T: Real> Regulator<T> for TwistRegulator<T> {
    fn name(&self) -> &'static str {
        "twist"
    }
    fn value(&self, h: &T) -> Result<Cx<T>> {
        let roots = self.series.evaluate(h);
        let sys = BetheSystem::<T>::at_beta(&self.series.spec.clone().with_beta(h.to_f64()), h.clone())?;
        sys.product_identity(roots.roots(), 0.0)
    }
}

/// ε scheme: every string member shifted by `ε`, remainder fixed, zero twist.
pub struct EpsilonRegulator<T: Real> {
    sys: BetheSystem<T>,
    dec: SingularDecomposition<T>,
}

impl<T: Real> EpsilonRegulator<T> {
    pub fn new(spec: &ModelSpec, dec: SingularDecomposition<T>) -> Result<Self> {
        Ok(EpsilonRegulator {
            sys: BetheSystem::<T>::at_beta(&spec.clone().with_beta(0.0), T::zero())?,
            dec,
        })
    }
}

impl<T: Real> Regulator<T> for EpsilonRegulator<T> {
    fn name(&self) -> &'static str {
        "epsilon"
    }
    fn value(&self, h: &T) -> Result<Cx<T>> {
        // φ(v ± s·u + ε) loses about log10(|s·u|/ε) digits when the string
        // values are real (anisotropic chains).
        if !(h.clone() > T::epsilon().sqrt()) {
            return Err(BetheError::EpsilonTooSmall { epsilon: h.to_f64() });
        }
        let shift = cx::real(h.clone());
        let mut roots: Vec<Cx<T>> = self.dec.string_part.iter().map(|v| v.clone() + shift.clone()).collect();
        roots.extend(self.dec.remainder.roots().iter().cloned());
        self.sys.product_identity(&roots, 0.0)
    }
}

pub type RegulatorCtor<T> = fn(&ModelSpec, &SingularDecomposition<T>) -> Result<Box<dyn Regulator<T>>>;

fn twist_ctor<T: Real>(spec: &ModelSpec, dec: &SingularDecomposition<T>) -> Result<Box<dyn Regulator<T>>> {
    let sys = BetheSystem::<T>::at_beta(&spec.clone().with_beta(0.0), T::zero())?;
    let series = expand_series(&sys, dec, spec.sites)?;
    Ok(Box::new(TwistRegulator::new(series)))
}

fn epsilon_ctor<T: Real>(spec: &ModelSpec, dec: &SingularDecomposition<T>) -> Result<Box<dyn Regulator<T>>> {
    Ok(Box::new(EpsilonRegulator::new(spec, dec.clone())?))
}

/// Name → regulator constructor table.
pub struct RegulatorRegistry<T: Real> {
    entries: Vec<(&'static str, RegulatorCtor<T>)>,
}

impl<T: Real> RegulatorRegistry<T> {
    pub fn empty() -> Self {
        RegulatorRegistry { entries: Vec::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("twist", twist_ctor::<T>);
        r.register("epsilon", epsilon_ctor::<T>);
        r
    }

    pub fn register(&mut self, name: &'static str, ctor: RegulatorCtor<T>) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, ctor));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn build(&self, name: &str, spec: &ModelSpec, dec: &SingularDecomposition<T>) -> Result<Box<dyn Regulator<T>>> {
        let (_, ctor) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| BetheError::InvalidOptions(format!("unknown regularization scheme '{name}'")))?;
        ctor(spec, dec)
    }
}

/// Values of a regulator along `hs`.
pub fn regulated_values<T: Real>(reg: &dyn Regulator<T>, hs: &[T]) -> Result<Vec<Cx<T>>> {
    hs.iter().map(|h| reg.value(h)).collect()
}

/// Polynomial extrapolation of the regulated identity to `h = 0`.
pub fn regulated_limit<T: Real>(reg: &dyn Regulator<T>, hs: &[T]) -> Result<Extrapolated<T>> {
    if hs.is_empty() {
        return Err(BetheError::InvalidOptions("no regulator values given".into()));
    }
    let values = regulated_values(reg, hs)?;
    Ok(extrapolate::to_zero(hs, &values))
}

/// The product identity at zero twist with the string shifted by each `ε`;
/// tends to the constraint value as `ε → 0`.
pub fn epsilon_constraint_check<T: Real>(
    spec: &ModelSpec,
    dec: &SingularDecomposition<T>,
    epsilons: &[T],
) -> Result<Vec<Cx<T>>> {
    let reg = EpsilonRegulator::new(spec, dec.clone())?;
    regulated_values(&reg, epsilons)
}

/// `|value − 1|` relative to the constraint tolerance of `T`.
pub fn is_unit<T: Real>(value: &Cx<T>, tol: &Tolerances) -> bool {
    cx::norm_f64(&(value.clone() - Cx::one())) < tol.constraint
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RootSet;

    fn pair(n: usize) -> (ModelSpec, SingularDecomposition<f64>) {
        let spec = ModelSpec::xxx(n, 2);
        let sys = BetheSystem::<f64>::new(&spec).unwrap();
        (spec, SingularDecomposition::exact(&sys, RootSet::empty()))
    }

    #[test]
    fn epsilon_values_approach_the_constraint() {
        let (spec, dec) = pair(4);
        let v = epsilon_constraint_check(&spec, &dec, &[1e-3, 5e-4]).unwrap();
        assert!((v[0] - 1.0).norm() < 1e-2);
        // linear convergence: halving ε roughly halves the error
        let ratio = (v[0] - 1.0).norm() / (v[1] - 1.0).norm();
        assert!((ratio - 2.0).abs() < 0.01, "{ratio}");
        let (spec5, dec5) = pair(5);
        let v5 = epsilon_constraint_check(&spec5, &dec5, &[1e-6]).unwrap();
        assert!((v5[0] + 1.0).norm() < 1e-4);
    }

    #[test]
    fn tiny_epsilon_is_rejected() {
        let (spec, dec) = pair(4);
        assert!(matches!(
            epsilon_constraint_check(&spec, &dec, &[1e-12]),
            Err(BetheError::EpsilonTooSmall { .. })
        ));
    }

    #[test]
    fn registry_lookup() {
        let reg = RegulatorRegistry::<f64>::standard();
        assert_eq!(reg.names(), vec!["twist", "epsilon"]);
        let (spec, dec) = pair(4);
        assert!(reg.build("sideways", &spec, &dec).is_err());
        assert_eq!(reg.build("epsilon", &spec, &dec).unwrap().name(), "epsilon");
    }
}
