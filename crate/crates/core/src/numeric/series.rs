//! Truncated power series in one variable with complex coefficients.
//!
//! A [`Series`] of length `n` stores the coefficients of `β^0 .. β^(n-1)`; all
//! products are truncated to the same length.

use num_traits::{One, Zero};

use super::cx;
use super::{Cx, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T: Real> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Series<T> {
    pub fn zeros(len: usize) -> Self {
        Series {
            coeffs: vec![Cx::zero(); len],
        }
    }

    pub fn constant(c: Cx<T>, len: usize) -> Self {
        let mut s = Self::zeros(len);
        if len > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The expansion variable `β` itself.
    pub fn variable(len: usize) -> Self {
        let mut s = Self::zeros(len);
        if len > 1 {
            s.coeffs[1] = Cx::one();
        }
        s
    }

    /// Builds a series from coefficients, padding or truncating to `len`.
    pub fn from_coeffs(mut coeffs: Vec<Cx<T>>, len: usize) -> Self {
        coeffs.resize(len, Cx::zero());
        Series { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, l: usize) -> Cx<T> {
        self.coeffs.get(l).cloned().unwrap_or_else(Cx::zero)
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, l: usize, c: Cx<T>) {
        self.coeffs[l] = c;
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Series { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Series { coeffs }
    }

    pub fn neg(&self) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn add_scalar(&self, c: &Cx<T>) -> Self {
        let mut out = self.clone();
        if !out.coeffs.is_empty() {
            out.coeffs[0] = out.coeffs[0].clone() + c.clone();
        }
        out
    }

    pub fn scale(&self, c: &Cx<T>) -> Self {
        Series {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        let mut out = vec![Cx::<T>::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series { coeffs: out }
    }

    pub fn powu(&self, n: u32) -> Self {
        let mut base = self.clone();
        let mut e = n;
        let mut acc = Series::constant(Cx::one(), self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplicative inverse; `None` when the constant term vanishes.
    pub fn recip(&self) -> Option<Self> {
        let n = self.len();
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return None;
        }
        let inv0 = Cx::<T>::one() / c0;
        let mut out = vec![Cx::<T>::zero(); n];
        if n == 0 {
            return Some(Series { coeffs: out });
        }
        out[0] = inv0.clone();
        for k in 1..n {
            let mut acc = Cx::<T>::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = -(acc * inv0.clone());
        }
        Some(Series { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self.mul(&r))
    }

    /// Exponential, valid for any constant term.
    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut out = vec![Cx::<T>::zero(); n];
        if n == 0 {
            return Series { coeffs: out };
        }
        out[0] = cx::exp(&self.coeffs[0]);
        // E' = A' E  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}
        for k in 1..n {
            let mut acc = Cx::<T>::zero();
            for j in 1..=k {
                acc = acc + cx::scale(&(self.coeffs[j].clone() * out[k - j].clone()), &T::from_i64(j as i64));
            }
            out[k] = cx::scale(&acc, &(T::one() / T::from_i64(k as i64)));
        }
        Series { coeffs: out }
    }

    /// Principal logarithm; the constant term uses the principal branch.
    pub fn ln(&self) -> Option<Self> {
        let n = self.len();
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return None;
        }
        let mut out = vec![Cx::<T>::zero(); n];
        if n == 0 {
            return Some(Series { coeffs: out });
        }
        out[0] = cx::ln(&c0);
        // L' = A'/A  =>  k l_k a_0 = k a_k - sum_{j=1..k-1} j l_j a_{k-j}
        for k in 1..n {
            let mut acc = cx::scale(&self.coeffs[k], &T::from_i64(k as i64));
            for j in 1..k {
                acc = acc - cx::scale(&(out[j].clone() * self.coeffs[k - j].clone()), &T::from_i64(j as i64));
            }
            out[k] = cx::scale(&(acc / c0.clone()), &(T::one() / T::from_i64(k as i64)));
        }
        Some(Series { coeffs: out })
    }

    pub fn sinh(&self) -> Self {
        let e = self.exp();
        let em = self.neg().exp();
        e.sub(&em).scale(&cx::real(T::ratio(1, 2)))
    }

    pub fn cosh(&self) -> Self {
        let e = self.exp();
        let em = self.neg().exp();
        e.add(&em).scale(&cx::real(T::ratio(1, 2)))
    }

    /// Divides by `β`, dropping the constant term. The caller guarantees that
    /// the constant term vanishes; the result has one fewer known order and is
    /// zero-padded back to the original length.
    pub fn shift_down(&self) -> Self {
        let n = self.len();
        let mut coeffs: Vec<Cx<T>> = self.coeffs.iter().skip(1).cloned().collect();
        coeffs.resize(n, Cx::zero());
        Series { coeffs }
    }

    /// Evaluates the truncated polynomial at `beta` (Horner).
    pub fn eval(&self, beta: &Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::<T>::zero(), |acc, c| acc * beta.clone() + c.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[(f64, f64)], n: usize) -> Series<f64> {
        Series::from_coeffs(v.iter().map(|&(a, b)| Cx::new(a, b)).collect(), n)
    }

    #[test]
    fn exp_of_variable_is_taylor() {
        let e = Series::<f64>::variable(6).exp();
        let mut f = 1.0;
        for k in 0..6 {
            if k > 0 {
                f *= k as f64;
            }
            assert!((e.coeff(k).re - 1.0 / f).abs() < 1e-15);
        }
    }

    #[test]
    fn ln_inverts_exp() {
        let a = s(&[(0.3, 0.1), (1.0, -0.5), (0.2, 0.0), (0.0, 0.7)], 6);
        let back = a.exp().ln().unwrap();
        for k in 0..6 {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-13, "order {k}");
        }
    }

    #[test]
    fn recip_times_self_is_one() {
        let a = s(&[(2.0, 1.0), (1.0, 0.0), (0.0, -3.0)], 7);
        let p = a.mul(&a.recip().unwrap());
        assert!((p.coeff(0) - Cx::new(1.0, 0.0)).norm() < 1e-15);
        for k in 1..7 {
            assert!(p.coeff(k).norm() < 1e-13);
        }
    }

    #[test]
    fn sinh_matches_pointwise_evaluation() {
        let a = s(&[(0.2, 0.4), (0.5, 0.0), (0.1, -0.2)], 12);
        let beta = Cx::new(0.05, 0.0);
        let lhs = a.sinh().eval(&beta);
        let rhs = a.eval(&beta).sinh();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn shift_down_divides_by_variable() {
        let a = s(&[(0.0, 0.0), (2.0, 0.0), (3.0, 1.0)], 4);
        let b = a.shift_down();
        assert_eq!(b.coeff(0), Cx::new(2.0, 0.0));
        assert_eq!(b.coeff(1), Cx::new(3.0, 1.0));
        assert_eq!(b.coeff(3), Cx::new(0.0, 0.0));
    }
}
