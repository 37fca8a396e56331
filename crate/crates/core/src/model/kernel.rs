//! Chain families as interchangeable rapidity kernels.
//!
//! Every supported family writes its Bethe equations with the same skeleton
//!
//! ```text
//! φ(λ_j + s·u)^N ∏_{k≠j} φ(λ_j − λ_k − u) = e^{−iβ} φ(λ_j − s·u)^N ∏_{k≠j} φ(λ_j − λ_k + u)
//! ```
//!
//! and differs only in the kernel `φ` and the shift unit `u`: `φ(z) = z`,
//! `u = i` for the isotropic chain, `φ(z) = sinh z`, `u = η` for the
//! anisotropic one. Kernels are registered by name in a [`KernelRegistry`].

use crate::error::{BetheError, Result};
use crate::numeric::series::Series;
use crate::numeric::{cx, Cx, Real};

use super::{Family, ModelSpec};

pub trait BetheKernel<T: Real>: Send + Sync {
    fn name(&self) -> &'static str;
    /// Shift unit `u` between consecutive members of an exact string.
    fn unit(&self) -> Cx<T>;
    fn phi(&self, z: &Cx<T>) -> Cx<T>;
    fn dphi(&self, z: &Cx<T>) -> Cx<T>;
    fn phi_series(&self, z: &Series<T>) -> Series<T>;
}

/// Isotropic (XXX) kernel: `φ(z) = z`, `u = i`.
pub struct Isotropic;

impl<T: Real> BetheKernel<T> for Isotropic {
    fn name(&self) -> &'static str {
        "xxx"
    }
    fn unit(&self) -> Cx<T> {
        cx::i()
    }
    fn phi(&self, z: &Cx<T>) -> Cx<T> {
        z.clone()
    }
    fn dphi(&self, _z: &Cx<T>) -> Cx<T> {
        cx::real(T::one())
    }
    fn phi_series(&self, z: &Series<T>) -> Series<T> {
        z.clone()
    }
}

/// Anisotropic (XXZ) kernel: `φ(z) = sinh z`, `u = η`.
pub struct Anisotropic<T: Real> {
    eta: T,
}

impl<T: Real> Anisotropic<T> {
    pub fn new(eta: T) -> Self {
        Anisotropic { eta }
    }
}

impl<T: Real> BetheKernel<T> for Anisotropic<T> {
    fn name(&self) -> &'static str {
        "xxz"
    }
    fn unit(&self) -> Cx<T> {
        cx::real(self.eta.clone())
    }
    fn phi(&self, z: &Cx<T>) -> Cx<T> {
        cx::sinh(z)
    }
    fn dphi(&self, z: &Cx<T>) -> Cx<T> {
        cx::cosh(z)
    }
    fn phi_series(&self, z: &Series<T>) -> Series<T> {
        z.sinh()
    }
}

pub type KernelCtor<T> = fn(&ModelSpec) -> Box<dyn BetheKernel<T>>;

/// Name → kernel constructor table.
pub struct KernelRegistry<T: Real> {
    entries: Vec<(&'static str, KernelCtor<T>)>,
}

impl<T: Real> KernelRegistry<T> {
    pub fn empty() -> Self {
        KernelRegistry { entries: Vec::new() }
    }

    /// Registry holding the `xxx` and `xxz` kernels.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Family::Xxx.name(), |_| Box::new(Isotropic));
        r.register(Family::Xxz.name(), |spec| Box::new(Anisotropic::new(T::from_f64(spec.eta))));
        r
    }

    /// Adds or replaces a kernel.
    pub fn register(&mut self, name: &'static str, ctor: KernelCtor<T>) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, ctor));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn build(&self, name: &str, spec: &ModelSpec) -> Result<Box<dyn BetheKernel<T>>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor(spec))
            .ok_or_else(|| BetheError::InvalidModel(format!("unknown model family '{name}'")))
    }
}
