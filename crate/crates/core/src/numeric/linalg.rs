//! Dense complex linear solves over a generic [`Real`] field.
//!
//! The systems handled here are tiny (Newton steps over M ≤ 7 rapidities and
//! order-by-order series systems), so straightforward row-major `Vec<Vec<_>>`
//! storage is used.

use num_traits::Zero;

use super::cx;
use super::{Cx, Real};

/// Matrix whose pivots fell below the rank threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDeficient {
    /// Smallest accepted-pivot ratio encountered, `|pivot| / max|pivot|`.
    pub pivot_ratio: f64,
}

pub type Matrix<T> = Vec<Vec<Cx<T>>>;

/// Relative pivot threshold used when the caller has no better estimate.
pub fn default_pivot_threshold<T: Real>() -> f64 {
    T::epsilon().to_f64() * 64.0
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Real>(a: &Matrix<T>, b: &[Cx<T>], pivot_threshold: f64) -> Result<Vec<Cx<T>>, RankDeficient> {
    let n = b.len();
    assert_eq!(a.len(), n, "square system expected");
    let mut m: Matrix<T> = a.to_vec();
    let mut rhs: Vec<Cx<T>> = b.to_vec();
    let scale = m
        .iter()
        .flat_map(|row| row.iter().map(cx::norm_f64))
        .fold(0.0, f64::max);
    if n == 0 {
        return Ok(Vec::new());
    }
    if scale == 0.0 {
        return Err(RankDeficient { pivot_ratio: 0.0 });
    }
    for k in 0..n {
        let (p, pmag) = (k..n)
            .map(|r| (r, cx::norm_f64(&m[r][k])))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        let ratio = pmag / scale;
        if ratio <= pivot_threshold {
            return Err(RankDeficient { pivot_ratio: ratio });
        }
        m.swap(k, p);
        rhs.swap(k, p);
        let pivot = m[k][k].clone();
        for r in (k + 1)..n {
            let factor = m[r][k].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for c in k..n {
                let delta = factor.clone() * m[k][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
            let delta = factor * rhs[k].clone();
            rhs[r] = rhs[r].clone() - delta;
        }
    }
    let mut x = vec![Cx::<T>::zero(); n];
    for k in (0..n).rev() {
        let mut acc = rhs[k].clone();
        for c in (k + 1)..n {
            acc = acc - m[k][c].clone() * x[c].clone();
        }
        x[k] = acc / m[k][k].clone();
    }
    Ok(x)
}

/// Least-squares solution of an overdetermined system via Householder QR.
///
/// Returns the minimizer and the norm of the residual `a x - b`.
pub fn least_squares<T: Real>(
    a: &Matrix<T>,
    b: &[Cx<T>],
    pivot_threshold: f64,
) -> Result<(Vec<Cx<T>>, T), RankDeficient> {
    let rows = a.len();
    assert_eq!(b.len(), rows);
    let cols = a.first().map_or(0, |r| r.len());
    assert!(rows >= cols, "least_squares needs rows >= cols");
    let mut m: Matrix<T> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut diag_max = 0.0f64;
    for k in 0..cols {
        let col: Vec<Cx<T>> = (k..rows).map(|r| m[r][k].clone()).collect();
        let norm = cx::l2_norm(&col);
        if norm.is_zero() {
            continue;
        }
        let x0 = col[0].clone();
        let x0_abs = cx::abs(&x0);
        let phase = if x0_abs.is_zero() {
            cx::real(T::one())
        } else {
            Cx::new(x0.re.clone() / x0_abs.clone(), x0.im.clone() / x0_abs)
        };
        // alpha = -phase * ||x||, v = x - alpha e1
        let alpha = -(phase * norm);
        let mut v = col;
        v[0] = v[0].clone() - alpha.clone();
        let vnorm = cx::l2_norm(&v);
        if vnorm.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = Cx::new(z.re.clone() / vnorm.clone(), z.im.clone() / vnorm.clone());
        }
        let two = T::from_i64(2);
        for c in k..cols {
            let proj = (k..rows).fold(Cx::<T>::zero(), |acc, r| acc + v[r - k].conj() * m[r][c].clone());
            let proj = cx::scale(&proj, &two);
            for r in k..rows {
                m[r][c] = m[r][c].clone() - v[r - k].clone() * proj.clone();
            }
        }
        let proj = (k..rows).fold(Cx::<T>::zero(), |acc, r| acc + v[r - k].conj() * rhs[r].clone());
        let proj = cx::scale(&proj, &two);
        for r in k..rows {
            rhs[r] = rhs[r].clone() - v[r - k].clone() * proj.clone();
        }
        diag_max = diag_max.max(cx::norm_f64(&m[k][k]));
    }
    if cols > 0 && diag_max == 0.0 {
        return Err(RankDeficient { pivot_ratio: 0.0 });
    }
    for k in 0..cols {
        let ratio = cx::norm_f64(&m[k][k]) / diag_max;
        if ratio <= pivot_threshold {
            return Err(RankDeficient { pivot_ratio: ratio });
        }
    }
    let mut x = vec![Cx::<T>::zero(); cols];
    for k in (0..cols).rev() {
        let mut acc = rhs[k].clone();
        for c in (k + 1)..cols {
            acc = acc - m[k][c].clone() * x[c].clone();
        }
        x[k] = acc / m[k][k].clone();
    }
    let residual = cx::l2_norm(&rhs[cols..]);
    Ok((x, residual))
}

/// `a x` for a row-major matrix.
pub fn mat_vec<T: Real>(a: &Matrix<T>, x: &[Cx<T>]) -> Vec<Cx<T>> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(Cx::<T>::zero(), |acc, (m, v)| acc + m.clone() * v.clone())
        })
        .collect()
}
