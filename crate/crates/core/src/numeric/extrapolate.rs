//! Polynomial (Richardson/Neville) extrapolation to a vanishing regulator.

use super::{Cx, Real};

/// Limit estimate at `h = 0` together with an error estimate.
#[derive(Clone, Debug)]
pub struct Extrapolated<T: Real> {
    pub value: Cx<T>,
    /// Difference between the two highest-order estimates.
    pub error: f64,
}

/// Neville's algorithm for the interpolating polynomial through
/// `(h_k, f_k)` evaluated at `h = 0`.
///
/// # Panics
///
/// Panics if the slices differ in length or are empty.
pub fn to_zero<T: Real>(hs: &[T], values: &[Cx<T>]) -> Extrapolated<T> {
    assert_eq!(hs.len(), values.len());
    assert!(!values.is_empty());
    let n = values.len();
    let mut p: Vec<Cx<T>> = values.to_vec();
    let mut previous_best = p[n - 1].clone();
    let mut best = p[n - 1].clone();
    for m in 1..n {
        for k in 0..(n - m) {
            // P_{k..k+m}(0) = (h_{k+m} P_{k..k+m-1} - h_k P_{k+1..k+m}) / (h_{k+m} - h_k)
            let hk = hs[k].clone();
            let hkm = hs[k + m].clone();
            let denom = hkm.clone() - hk.clone();
            let num = p[k].clone() * Cx::new(hkm, T::zero()) - p[k + 1].clone() * Cx::new(hk, T::zero());
            p[k] = num / Cx::new(denom, T::zero());
        }
        previous_best = best;
        best = p[0].clone();
    }
    let error = if n == 1 {
        f64::INFINITY
    } else {
        super::cx::norm_f64(&(best.clone() - previous_best))
    };
    Extrapolated { value: best, error }
}

/// Geometric schedule `h0, h0 r, h0 r^2, ...` of `count` points.
pub fn geometric<T: Real>(h0: &T, ratio: &T, count: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(count);
    let mut h = h0.clone();
    for _ in 0..count {
        out.push(h.clone());
        h = h * ratio.clone();
    }
    out
}
