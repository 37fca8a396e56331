//! Monodromy matrix of the XXX spin-1/2 chain, applied without forming the
//! auxiliary-space tensor product.
//!
//! `L_n(λ) = [[λ + iσ^z_n/2, iσ^-_n], [iσ^+_n, λ − iσ^z_n/2]]` in the auxiliary
//! space and `T(λ) = L_N(λ) ⋯ L_1(λ)`. An entry `T_ab` acts on `v` by feeding
//! the auxiliary state `|b⟩ ⊗ v` through `L_1 … L_N` and reading component
//! `a`. Amplitudes live in any [`Amplitude`] ring, so the same sweep yields
//! plain vectors, β-series of vectors and λ-derivatives.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{BetheError, Result};
use crate::numeric::series::Series;
use crate::numeric::{cx, Cx, Real};

use super::operator::{check_cap, OperatorLabel, OperatorMatrix, DEFAULT_SIZE_CAP, DENSE_LIMIT};

/// Commutative ring of state amplitudes.
pub trait Amplitude: Clone + Send + Sync {
    type Scalar: Real;
    /// Zero with the same shape as `self`.
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Cx<Self::Scalar>) -> Self;
    fn is_zero(&self) -> bool;
    fn from_scalar_like(&self, c: Cx<Self::Scalar>) -> Self;
}

impl<T: Real> Amplitude for Cx<T> {
    type Scalar = T;
    fn zero_like(&self) -> Self {
        Cx::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn scale(&self, c: &Cx<T>) -> Self {
        self.clone() * c.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_scalar_like(&self, c: Cx<T>) -> Self {
        c
    }
}

impl<T: Real> Amplitude for Series<T> {
    type Scalar = T;
    fn zero_like(&self) -> Self {
        Series::zeros(self.len())
    }
    fn add(&self, other: &Self) -> Self {
        Series::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Series::mul(self, other)
    }
    fn scale(&self, c: &Cx<T>) -> Self {
        Series::scale(self, c)
    }
    fn is_zero(&self) -> bool {
        self.coeffs().iter().all(Zero::is_zero)
    }
    fn from_scalar_like(&self, c: Cx<T>) -> Self {
        Series::constant(c, self.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    A,
    B,
    C,
    D,
}

impl Entry {
    fn indices(self) -> (usize, usize) {
        match self {
            Entry::A => (0, 0),
            Entry::B => (0, 1),
            Entry::C => (1, 0),
            Entry::D => (1, 1),
        }
    }

    fn label(self) -> OperatorLabel {
        match self {
            Entry::A => OperatorLabel::A,
            Entry::B => OperatorLabel::B,
            Entry::C => OperatorLabel::C,
            Entry::D => OperatorLabel::D,
        }
    }
}

/// Feeds the auxiliary pair `(w0, w1)` through `L_1(λ) … L_N(λ)`.
pub fn sweep<A: Amplitude>(sites: usize, lambda: &A, mut w0: Vec<A>, mut w1: Vec<A>) -> (Vec<A>, Vec<A>) {
    let dim = 1usize << sites;
    assert!(w0.len() == dim && w1.len() == dim);
    let half_i = cx::from_f64::<A::Scalar>(0.0, 0.5);
    let plus = lambda.add(&lambda.from_scalar_like(half_i.clone()));
    let minus = lambda.add(&lambda.from_scalar_like(-half_i));
    let i = cx::i::<A::Scalar>();
    for n in 0..sites {
        let bit = 1usize << n;
        let mut n0 = Vec::with_capacity(dim);
        let mut n1 = Vec::with_capacity(dim);
        for x in 0..dim {
            let up = x & bit == 0;
            let (diag0, diag1) = if up { (&plus, &minus) } else { (&minus, &plus) };
            // (σ^- w)[x] = w[x ^ bit] on down spins, (σ^+ w)[x] = w[x | bit] on up spins
            let mut a = diag0.mul(&w0[x]);
            let mut b = diag1.mul(&w1[x]);
            if up {
                let src = &w0[x | bit];
                if !src.is_zero() {
                    b = b.add(&src.scale(&i));
                }
            } else {
                let src = &w1[x ^ bit];
                if !src.is_zero() {
                    a = a.add(&src.scale(&i));
                }
            }
            n0.push(a);
            n1.push(b);
        }
        w0 = n0;
        w1 = n1;
    }
    (w0, w1)
}

/// `T_ab(λ) v`.
pub fn apply_entry<A: Amplitude>(sites: usize, entry: Entry, lambda: &A, v: &[A]) -> Vec<A> {
    let (a, b) = entry.indices();
    let zero: Vec<A> = v.iter().map(|x| x.zero_like()).collect();
    let (w0, w1) = if b == 0 { (v.to_vec(), zero) } else { (zero, v.to_vec()) };
    let (o0, o1) = sweep(sites, lambda, w0, w1);
    if a == 0 {
        o0
    } else {
        o1
    }
}

/// `t_β(λ) v = A(λ)v + e^{−iβ} D(λ)v`.
pub fn apply_transfer<A: Amplitude>(sites: usize, lambda: &A, twist: &Cx<A::Scalar>, v: &[A]) -> Vec<A> {
    let a = apply_entry(sites, Entry::A, lambda, v);
    let d = apply_entry(sites, Entry::D, lambda, v);
    a.iter().zip(&d).map(|(x, y)| x.add(&y.scale(twist))).collect()
}

fn basis_vector(sites: usize, y: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::zero(); 1 << sites];
    e[y] = Complex64::one();
    e
}

/// Monodromy entry `A`, `B`, `C` or `D` at `λ`.
pub fn monodromy_entry(sites: usize, entry: Entry, lambda: Complex64) -> Result<OperatorMatrix> {
    monodromy_entry_capped(sites, entry, lambda, DEFAULT_SIZE_CAP)
}

pub fn monodromy_entry_capped(sites: usize, entry: Entry, lambda: Complex64, cap: usize) -> Result<OperatorMatrix> {
    check_cap(sites, cap)?;
    Ok(OperatorMatrix::from_columns(entry.label(), sites, |y| {
        apply_entry(sites, entry, &lambda, &basis_vector(sites, y))
    }))
}

/// The twisted transfer matrix `t_β(λ) = A(λ) + e^{−iβ} D(λ)`.
pub fn transfer_matrix(sites: usize, lambda: Complex64, beta: f64) -> Result<OperatorMatrix> {
    check_cap(sites, DEFAULT_SIZE_CAP)?;
    let twist = Complex64::from_polar(1.0, -beta);
    Ok(OperatorMatrix::from_columns(OperatorLabel::Transfer, sites, |y| {
        apply_transfer(sites, &lambda, &twist, &basis_vector(sites, y))
    }))
}

/// `H = (i/2) t'(i/2) t(i/2)^{-1} − N/2` at zero twist, with `t'` taken
/// exactly through first-order series amplitudes.
pub fn hamiltonian_from_transfer(sites: usize) -> Result<OperatorMatrix> {
    check_cap(sites, DENSE_LIMIT.min(10))?;
    if sites == 0 {
        return Err(BetheError::InvalidModel("chain needs at least one site".into()));
    }
    let dim = 1usize << sites;
    let lambda = Series::<f64>::constant(Complex64::new(0.0, 0.5), 2).add(&Series::variable(2));
    let one = Complex64::one();
    let mut t0 = DMatrix::<Complex64>::zeros(dim, dim);
    let mut t1 = DMatrix::<Complex64>::zeros(dim, dim);
    for y in 0..dim {
        let e: Vec<Series<f64>> = (0..dim)
            .map(|x| Series::constant(if x == y { one } else { Complex64::zero() }, 2))
            .collect();
        for (x, s) in apply_transfer(sites, &lambda, &one, &e).into_iter().enumerate() {
            t0[(x, y)] = s.coeff(0);
            t1[(x, y)] = s.coeff(1);
        }
    }
    let inv = t0
        .try_inverse()
        .ok_or_else(|| BetheError::SingularJacobian { iteration: 0, pivot_ratio: 0.0 })?;
    let h = t1 * inv * Complex64::new(0.0, 0.5) - DMatrix::identity(dim, dim) * Complex64::new(sites as f64 / 2.0, 0.0);
    Ok(OperatorMatrix::from_dense(OperatorLabel::Hamiltonian, sites, h))
}
