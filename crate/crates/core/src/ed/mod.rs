//! Exact diagonalization of the periodic and twisted spin-1/2 XXX chain.
//!
//! `H = (1/4) Σ_n (σ_n·σ_{n+1} − 1)` where the boundary bond uses the rotated
//! spin `σ^±_{N+1} = e^{±iβ} σ^±_1`, `σ^z_{N+1} = σ^z_1`. Same basis
//! convention as [`crate::aba`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::aba::{magnons_of, OperatorLabel, OperatorMatrix, StateVector, DEFAULT_SIZE_CAP};
use crate::error::{BetheError, Result};
use crate::model::RootSet;
use crate::numeric::{cx, Real};

/// Largest sector handled by dense diagonalization.
pub const MAX_SECTOR_DIM: usize = 4096;

fn check_sites(sites: usize) -> Result<()> {
    if sites < 2 {
        return Err(BetheError::InvalidModel(format!("need at least 2 sites, got {sites}")));
    }
    Ok(())
}

/// `H|x⟩` as a list of `(y, ⟨y|H|x⟩)`, diagonal term first.
pub fn hamiltonian_action(sites: usize, beta: f64, x: usize) -> Vec<(usize, Complex64)> {
    let mut out = vec![(x, Complex64::zero())];
    for n in 0..sites {
        let m = (n + 1) % sites;
        let dn = x >> n & 1 == 1;
        let dm = x >> m & 1 == 1;
        if dn == dm {
            continue;
        }
        out[0].1 -= 0.5;
        let phase = if m == 0 {
            // site N down, site 1 up: e^{−iβ} σ^+_N σ^-_1; otherwise e^{iβ} σ^-_N σ^+_1
            Complex64::from_polar(0.5, if dn { -beta } else { beta })
        } else {
            Complex64::new(0.5, 0.0)
        };
        out.push((x ^ (1 << n | 1 << m), phase));
    }
    out
}

/// The full `2^N × 2^N` Hamiltonian.
pub fn build_hamiltonian(sites: usize, beta: f64) -> Result<OperatorMatrix> {
    check_sites(sites)?;
    if sites > DEFAULT_SIZE_CAP {
        return Err(BetheError::SizeCap {
            n: sites,
            cap: DEFAULT_SIZE_CAP,
        });
    }
    Ok(OperatorMatrix::from_columns(OperatorLabel::Hamiltonian, sites, |x| {
        let mut col = vec![Complex64::zero(); 1 << sites];
        for (y, a) in hamiltonian_action(sites, beta, x) {
            col[y] += a;
        }
        col
    }))
}

/// Basis states with `magnons` down spins, in increasing order.
pub fn sector_basis(sites: usize, magnons: usize) -> Vec<usize> {
    (0..1usize << sites).filter(|&x| magnons_of(x) == magnons).collect()
}

fn sector_matrix(sites: usize, beta: f64, basis: &[usize]) -> DMatrix<Complex64> {
    let index = |y: usize| basis.binary_search(&y).expect("H conserves the magnon number");
    let mut h = DMatrix::zeros(basis.len(), basis.len());
    for (col, &x) in basis.iter().enumerate() {
        for (y, a) in hamiltonian_action(sites, beta, x) {
            h[(index(y), col)] += a;
        }
    }
    h
}

#[derive(Clone, Debug)]
pub struct SectorSpectrum {
    pub sites: usize,
    pub magnons: usize,
    pub beta: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors embedded in the full space, matching `eigenvalues`.
    pub eigenvectors: Option<Vec<StateVector<f64>>>,
}

fn diagonalize(sites: usize, magnons: usize, beta: f64, vectors: bool) -> Result<SectorSpectrum> {
    check_sites(sites)?;
    if magnons > sites {
        return Err(BetheError::InvalidModel(format!("M = {magnons} exceeds N = {sites}")));
    }
    let basis = sector_basis(sites, magnons);
    if basis.len() > MAX_SECTOR_DIM {
        return Err(BetheError::Unsupported(format!(
            "sector dimension {} exceeds the dense limit {MAX_SECTOR_DIM}",
            basis.len()
        )));
    }
    let eig = SymmetricEigen::new(sector_matrix(sites, beta, &basis));
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = vectors.then(|| {
        order
            .iter()
            .map(|&k| {
                let mut amps = vec![Complex64::zero(); 1 << sites];
                for (r, &x) in basis.iter().enumerate() {
                    amps[x] = eig.eigenvectors[(r, k)];
                }
                StateVector {
                    sites,
                    magnon_number: magnons,
                    amplitudes: amps,
                }
            })
            .collect()
    });
    Ok(SectorSpectrum {
        sites,
        magnons,
        beta,
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues of `H` in the `M`-magnon sector.
pub fn sector_spectrum(sites: usize, magnons: usize, beta: f64) -> Result<Vec<f64>> {
    Ok(diagonalize(sites, magnons, beta, false)?.eigenvalues)
}

/// Eigenvalues together with eigenvectors.
pub fn sector_eigensystem(sites: usize, magnons: usize, beta: f64) -> Result<SectorSpectrum> {
    diagonalize(sites, magnons, beta, true)
}

/// All sectors, diagonalized concurrently; index `M` holds sector `M`.
pub fn full_spectrum(sites: usize, beta: f64) -> Result<Vec<Vec<f64>>> {
    (0..=sites).into_par_iter().map(|m| sector_spectrum(sites, m, beta)).collect()
}

/// A Bethe prediction to be located in an ED spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct BetheLevel {
    pub roots: RootSet<f64>,
    pub energy: f64,
}

impl BetheLevel {
    pub fn magnons(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetheMatch {
    pub level: BetheLevel,
    pub ed_index: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub sites: usize,
    pub sector: usize,
    pub beta: f64,
    pub tolerance: f64,
    pub ed_eigenvalues: Vec<f64>,
    pub bethe_matches: Vec<BetheMatch>,
    pub unmatched_ed: Vec<usize>,
    /// Indices into `bethe_matches` with more than one ED level in reach.
    pub ambiguous: Vec<usize>,
}

impl SpectrumReport {
    pub fn unmatched_bethe(&self) -> Vec<usize> {
        (0..self.bethe_matches.len())
            .filter(|&k| self.bethe_matches[k].ed_index.is_none())
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.unmatched_ed.is_empty() && self.unmatched_bethe().is_empty()
    }
}

/// Matches Bethe energies against the `M`-magnon ED spectrum by greedy
/// nearest assignment within `tol`.
///
/// At `β = 0` every Bethe state with `M' ≤ M` has one SU(2) descendant in the
/// sector and all of them take part; at `β ≠ 0` only `M' = M` does. Levels
/// from other sectors are dropped from the report.
pub fn match_spectrum(
    sites: usize,
    magnons: usize,
    beta: f64,
    levels: &[BetheLevel],
    tol: f64,
) -> Result<SpectrumReport> {
    let ed = sector_spectrum(sites, magnons, beta)?;
    let candidates: Vec<BetheLevel> = levels
        .iter()
        .filter(|l| {
            if beta == 0.0 {
                l.magnons() <= magnons && magnons <= sites - l.magnons()
            } else {
                l.magnons() == magnons
            }
        })
        .cloned()
        .collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let mut ambiguous = Vec::new();
    for (i, l) in candidates.iter().enumerate() {
        let near: Vec<usize> = (0..ed.len()).filter(|&k| (ed[k] - l.energy).abs() < tol).collect();
        if near.len() > 1 {
            ambiguous.push(i);
        }
        pairs.extend(near.into_iter().map(|k| ((ed[k] - l.energy).abs(), i, k)));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut taken_ed = vec![false; ed.len()];
    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; candidates.len()];
    for (d, i, k) in pairs {
        if assigned[i].is_none() && !taken_ed[k] {
            assigned[i] = Some((k, d));
            taken_ed[k] = true;
        }
    }
    Ok(SpectrumReport {
        sites,
        sector: magnons,
        beta,
        tolerance: tol,
        unmatched_ed: (0..ed.len()).filter(|&k| !taken_ed[k]).collect(),
        ed_eigenvalues: ed,
        bethe_matches: candidates
            .into_iter()
            .zip(assigned)
            .map(|(level, a)| BetheMatch {
                level,
                ed_index: a.map(|x| x.0),
                delta: a.map(|x| x.1),
            })
            .collect(),
        ambiguous,
    })
}

/// `|⟨v, w⟩| / (‖v‖ ‖w‖)`.
pub fn eigvec_overlap<T: Real>(v: &StateVector<T>, w: &StateVector<T>) -> Result<f64> {
    if v.dimension() != w.dimension() {
        return Err(BetheError::DimensionMismatch {
            expected: v.dimension(),
            got: w.dimension(),
        });
    }
    let nv = v.norm();
    let nw = w.norm();
    if !(nv > T::zero()) || !(nw > T::zero()) {
        return Err(BetheError::ZeroVector);
    }
    Ok((cx::abs(&v.inner(w)) / (nv * nw)).to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn two_sites() {
        let mut all: Vec<f64> = full_spectrum(2, 0.0).unwrap().concat();
        all.sort_by(f64::total_cmp);
        assert!(close(&all, &[-2.0, 0.0, 0.0, 0.0], 1e-14));
        assert!(close(&sector_spectrum(2, 1, 0.0).unwrap(), &[-2.0, 0.0], 1e-14));
    }

    #[test]
    fn four_site_sectors() {
        assert!(sector_spectrum(4, 0, 0.0).unwrap() == vec![0.0]);
        let m2 = sector_spectrum(4, 2, 0.0).unwrap();
        assert_eq!(m2.len(), 6);
        assert!(m2.iter().any(|e| (e + 1.0).abs() < 1e-12));
    }

    #[test]
    fn sector_blocks_reassemble_the_full_matrix() {
        let h = build_hamiltonian(5, 0.3).unwrap();
        let trace: f64 = full_spectrum(5, 0.3).unwrap().concat().iter().sum();
        assert!((h.trace().re - trace).abs() < 1e-12);
    }

    #[test]
    fn overlap_limits() {
        let e = |k: usize| {
            let mut a = vec![Complex64::zero(); 4];
            a[k] = Complex64::new(1.0, 0.0);
            StateVector::from_amplitudes(2, magnons_of(k), a).unwrap()
        };
        assert!((eigvec_overlap(&e(1), &e(1)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(eigvec_overlap(&e(1), &e(2)).unwrap(), 0.0);
        let zero = StateVector::<f64>::from_amplitudes(2, 1, vec![Complex64::zero(); 4]).unwrap();
        assert_eq!(eigvec_overlap(&zero, &e(1)), Err(BetheError::ZeroVector));
    }

    #[test]
    fn empty_input_leaves_everything_unmatched() {
        let r = match_spectrum(4, 2, 0.0, &[], 1e-8).unwrap();
        assert_eq!(r.unmatched_ed, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn oversized_sector() {
        assert!(matches!(sector_spectrum(16, 8, 0.0), Err(BetheError::Unsupported(_))));
    }
}
