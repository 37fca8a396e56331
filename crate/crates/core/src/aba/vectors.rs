//! Bethe vectors `∏ B(λ_j)|0⟩` and their renormalized singular limit.

use num_traits::Zero;

use crate::error::{BetheError, Result};
use crate::model::{Family, ModelSpec, RootSet};
use crate::numeric::series::Series;
use crate::numeric::{cx, Cx, Real, Tolerances};
use crate::twist::TwistSeries;

use super::monodromy::{apply_entry, apply_transfer, Amplitude, Entry};
use super::operator::{check_cap, StateVector, DEFAULT_SIZE_CAP};

fn require_xxx_half(spec: &ModelSpec) -> Result<()> {
    if spec.family != Family::Xxx || !spec.spin.is_half() {
        return Err(BetheError::Unsupported(
            "the monodromy matrix is implemented for the spin-1/2 XXX chain only".into(),
        ));
    }
    Ok(())
}

fn product_of_b<A: Amplitude>(sites: usize, roots: &[A], reference: Vec<A>) -> Vec<A> {
    roots
        .iter()
        .fold(reference, |v, lam| apply_entry(sites, Entry::B, lam, &v))
}

/// `∏_j B(λ_j)|0⟩`; roots within the detection distance of `±i/2` are
/// refused, see [`singular_limit_vector`].
pub fn bethe_vector<T: Real>(sites: usize, roots: &RootSet<T>) -> Result<StateVector<T>> {
    let tol = Tolerances::for_precision::<T>();
    let half: Cx<T> = cx::from_f64(0.0, 0.5);
    for r in roots.roots() {
        for pole in [half.clone(), -half.clone()] {
            let d = cx::dist(r, &pole).to_f64();
            if d < tol.detection {
                return Err(BetheError::Pole {
                    root: r.to_string(),
                    pole: pole.to_string(),
                    distance: d,
                });
            }
        }
    }
    bethe_vector_unchecked(sites, roots)
}

/// [`bethe_vector`] without the guard against the exact string.
pub fn bethe_vector_unchecked<T: Real>(sites: usize, roots: &RootSet<T>) -> Result<StateVector<T>> {
    check_cap(sites, DEFAULT_SIZE_CAP)?;
    if roots.len() > sites {
        return Err(BetheError::InvalidModel(format!("{} roots on {sites} sites", roots.len())));
    }
    let reference = StateVector::<T>::reference(sites).amplitudes;
    let amps = product_of_b(sites, roots.roots(), reference);
    StateVector::from_amplitudes(sites, roots.len(), amps)
}

/// `lim_{β→0} β^{−N} ∏_j B(λ_j(β))|0⟩` for the expansion of a physical
/// singular solution, scaled to unit norm with a positive leading amplitude.
///
/// The product is formed with series amplitudes, so the limit is the
/// order-`N` coefficient; the lower orders must cancel to the working
/// precision and [`BetheError::PrecisionExhausted`] is returned otherwise.
pub fn singular_limit_vector<T: Real>(series: &TwistSeries<T>) -> Result<StateVector<T>> {
    let spec = &series.spec;
    require_xxx_half(spec)?;
    let sites = spec.sites;
    check_cap(sites, DEFAULT_SIZE_CAP)?;
    if series.order < sites {
        return Err(BetheError::InsufficientOrder {
            have: series.order,
            need: sites,
        });
    }
    let len = sites + 1;
    let roots = series.all_series(len);
    let reference: Vec<Series<T>> = StateVector::<T>::reference(sites)
        .amplitudes
        .into_iter()
        .map(|a| Series::constant(a, len))
        .collect();
    let amps = product_of_b(sites, &roots, reference);
    let leading: Vec<Cx<T>> = amps.iter().map(|s| s.coeff(sites)).collect();
    let scale = cx::max_norm(&leading);
    let lower = amps
        .iter()
        .flat_map(|s| s.coeffs()[..sites].iter())
        .map(cx::norm_f64)
        .fold(0.0, f64::max);
    let tol = Tolerances::for_precision::<T>().detection;
    if scale == 0.0 || lower > tol * scale {
        return Err(BetheError::PrecisionExhausted(format!(
            "orders below β^{sites} do not cancel: {lower:e} against leading {scale:e}"
        )));
    }
    StateVector::from_amplitudes(sites, series.coefficients.len(), leading)?.canonical()
}

/// One test point of [`transfer_eigenvalue_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct TransferPoint {
    pub mu: Cx<f64>,
    /// Rayleigh quotient `⟨v, t_β(μ)v⟩/⟨v, v⟩`.
    pub eigenvalue: Cx<f64>,
    /// Eigenvalue predicted from the roots; `None` when `μ` hits a root.
    pub predicted: Option<Cx<f64>>,
    /// `‖t_β(μ)v − Λv‖ / ‖v‖`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferCheck {
    pub points: Vec<TransferPoint>,
    pub max_residual: f64,
}

/// `Λ(μ) = (μ + i/2)^N ∏ (μ − λ_j − i)/(μ − λ_j) + e^{−iβ} (μ − i/2)^N ∏ (μ − λ_j + i)/(μ − λ_j)`.
pub fn transfer_eigenvalue<T: Real>(sites: usize, roots: &[Cx<T>], beta: &T, mu: &Cx<T>) -> Option<Cx<T>> {
    let half = cx::from_f64::<T>(0.0, 0.5);
    let i = cx::i::<T>();
    let mut a = cx::powu(&(mu.clone() + half.clone()), sites as u32);
    let mut d = cx::powu(&(mu.clone() - half), sites as u32) * cx::cis(&-beta.clone());
    for r in roots {
        let den = mu.clone() - r.clone();
        if Zero::is_zero(&den) {
            return None;
        }
        a = a * (den.clone() - i.clone()) / den.clone();
        d = d * (den.clone() + i.clone()) / den;
    }
    Some(a + d)
}

/// Checks that the Bethe vector of `roots` is an eigenvector of the twisted
/// transfer matrix `t_β(μ)` at each test point.
pub fn transfer_eigenvalue_check<T: Real>(
    sites: usize,
    roots: &RootSet<T>,
    beta: &T,
    test_points: &[Cx<f64>],
) -> Result<TransferCheck> {
    let v = bethe_vector(sites, roots)?;
    let norm = v.norm();
    if !(norm > T::zero()) {
        return Err(BetheError::ZeroVector);
    }
    let twist = cx::cis(&-beta.clone());
    let norm2 = Cx::new(norm.clone() * norm.clone(), T::zero());
    let mut points = Vec::with_capacity(test_points.len());
    for mu in test_points {
        let m: Cx<T> = cx::lift(mu);
        let w = apply_transfer(sites, &m, &twist, &v.amplitudes);
        let lam = cx::inner(&v.amplitudes, &w) / norm2.clone();
        let diff: Vec<Cx<T>> = w
            .iter()
            .zip(&v.amplitudes)
            .map(|(a, b)| a.clone() - lam.clone() * b.clone())
            .collect();
        let residual = (cx::l2_norm(&diff) / norm.clone()).to_f64();
        points.push(TransferPoint {
            mu: *mu,
            eigenvalue: cx::to_f64(&lam),
            predicted: transfer_eigenvalue(sites, roots.roots(), beta, &m).map(|z| cx::to_f64(&z)),
            residual,
        });
    }
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(TransferCheck { points, max_residual })
}
