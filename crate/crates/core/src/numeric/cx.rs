//! Complex helpers over a generic [`Real`] field.

use num_traits::{One, Zero};

use super::{Cx, Real};

pub fn real<T: Real>(x: T) -> Cx<T> {
    Cx::new(x, T::zero())
}

pub fn imag<T: Real>(y: T) -> Cx<T> {
    Cx::new(T::zero(), y)
}

pub fn from_f64<T: Real>(re: f64, im: f64) -> Cx<T> {
    Cx::new(T::from_f64(re), T::from_f64(im))
}

pub fn i<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::one())
}

pub fn to_f64<T: Real>(z: &Cx<T>) -> Cx<f64> {
    Cx::new(z.re.to_f64(), z.im.to_f64())
}

pub fn lift<T: Real>(z: &Cx<f64>) -> Cx<T> {
    from_f64(z.re, z.im)
}

pub fn abs<T: Real>(z: &Cx<T>) -> T {
    z.re.hypot(&z.im)
}

pub fn norm_f64<T: Real>(z: &Cx<T>) -> f64 {
    abs(z).to_f64()
}

pub fn dist<T: Real>(a: &Cx<T>, b: &Cx<T>) -> T {
    abs(&(a.clone() - b.clone()))
}

pub fn arg<T: Real>(z: &Cx<T>) -> T {
    z.im.atan2(&z.re)
}

/// `e^{i theta}`.
pub fn cis<T: Real>(theta: &T) -> Cx<T> {
    Cx::new(theta.cos(), theta.sin())
}

pub fn exp<T: Real>(z: &Cx<T>) -> Cx<T> {
    let r = z.re.exp();
    Cx::new(r.clone() * z.im.cos(), r * z.im.sin())
}

/// Principal logarithm.
pub fn ln<T: Real>(z: &Cx<T>) -> Cx<T> {
    Cx::new(abs(z).ln(), arg(z))
}

pub fn sinh<T: Real>(z: &Cx<T>) -> Cx<T> {
    Cx::new(z.re.sinh() * z.im.cos(), z.re.cosh() * z.im.sin())
}

pub fn cosh<T: Real>(z: &Cx<T>) -> Cx<T> {
    Cx::new(z.re.cosh() * z.im.cos(), z.re.sinh() * z.im.sin())
}

pub fn powu<T: Real>(z: &Cx<T>, n: u32) -> Cx<T> {
    let mut base = z.clone();
    let mut e = n;
    let mut acc = Cx::<T>::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        e >>= 1;
        if e > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

pub fn scale<T: Real>(z: &Cx<T>, s: &T) -> Cx<T> {
    Cx::new(z.re.clone() * s.clone(), z.im.clone() * s.clone())
}

pub fn is_finite<T: Real>(z: &Cx<T>) -> bool {
    z.re.to_f64().is_finite() && z.im.to_f64().is_finite()
}

/// Max-norm of a complex vector as `f64`.
pub fn max_norm<T: Real>(v: &[Cx<T>]) -> f64 {
    v.iter().map(norm_f64).fold(0.0, f64::max)
}

/// Euclidean norm of a complex vector.
pub fn l2_norm<T: Real>(v: &[Cx<T>]) -> T {
    v.iter()
        .fold(T::zero(), |acc, z| acc + z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone())
        .sqrt()
}

/// `<a, b>` with the first argument conjugated.
pub fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter()
        .zip(b)
        .fold(Cx::<T>::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
}
