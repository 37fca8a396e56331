//! Operators and states on the `2^N`-dimensional chain space.
//!
//! Basis states are bitmasks: bit `n` holds the spin at site `n + 1`, with
//! `0` for up and `1` for down. `|0⟩` is the all-up reference state.

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{BetheError, Result};
use crate::numeric::{cx, Cx, Real};

/// Chains up to this length are stored densely.
pub const DENSE_SITES: usize = 8;
/// Largest chain for which a dense copy of an operator is ever formed.
pub const DENSE_LIMIT: usize = 12;
/// Default cap on the chain length for operator construction.
pub const DEFAULT_SIZE_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorLabel {
    A,
    B,
    C,
    D,
    Transfer,
    Hamiltonian,
    PauliX(usize),
    PauliY(usize),
    PauliZ(usize),
    Permutation(usize, usize),
    /// Sums, products and other derived operators.
    Composite,
}

#[derive(Clone, Debug)]
pub enum Storage {
    Dense(DMatrix<Complex64>),
    Sparse(CsrMatrix<Complex64>),
}

/// A square operator on a chain of `sites` spins.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub sites: usize,
    pub storage: Storage,
}

pub(crate) fn check_cap(sites: usize, cap: usize) -> Result<()> {
    if sites > cap {
        return Err(BetheError::SizeCap { n: sites, cap });
    }
    Ok(())
}

impl OperatorMatrix {
    pub fn from_dense(label: OperatorLabel, sites: usize, m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), 1 << sites);
        assert!(m.is_square());
        OperatorMatrix {
            label,
            sites,
            storage: Storage::Dense(m),
        }
    }

    /// Builds an operator from the images of the basis vectors. Storage is
    /// dense up to [`DENSE_SITES`] and sparse beyond.
    pub fn from_columns(label: OperatorLabel, sites: usize, mut column: impl FnMut(usize) -> Vec<Complex64>) -> Self {
        let dim = 1usize << sites;
        if sites <= DENSE_SITES {
            let mut m = DMatrix::zeros(dim, dim);
            for y in 0..dim {
                for (x, a) in column(y).into_iter().enumerate() {
                    m[(x, y)] = a;
                }
            }
            return Self::from_dense(label, sites, m);
        }
        let mut coo = CooMatrix::new(dim, dim);
        for y in 0..dim {
            for (x, a) in column(y).into_iter().enumerate() {
                if !a.is_zero() {
                    coo.push(x, y, a);
                }
            }
        }
        OperatorMatrix {
            label,
            sites,
            storage: Storage::Sparse(CsrMatrix::from(&coo)),
        }
    }

    pub fn dimension(&self) -> usize {
        1 << self.sites
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dimension());
        match &self.storage {
            Storage::Dense(m) => {
                let out = m * nalgebra::DVector::from_column_slice(v);
                out.as_slice().to_vec()
            }
            Storage::Sparse(m) => {
                let mut out = vec![Complex64::zero(); v.len()];
                for (x, row) in m.row_iter().enumerate() {
                    out[x] = row.col_indices().iter().zip(row.values()).map(|(&y, a)| a * v[y]).sum();
                }
                out
            }
        }
    }

    /// Dense copy; refused above [`DENSE_LIMIT`] sites.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        match &self.storage {
            Storage::Dense(m) => Ok(m.clone()),
            Storage::Sparse(m) => {
                check_cap(self.sites, DENSE_LIMIT)?;
                let mut d = DMatrix::zeros(m.nrows(), m.ncols());
                for (x, y, a) in m.triplet_iter() {
                    d[(x, y)] += *a;
                }
                Ok(d)
            }
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Sparse(m) => m
                .get_entry(row, col)
                .map(|e| e.into_value())
                .unwrap_or_else(Complex64::zero),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dimension()).map(|x| self.entry(x, x)).sum()
    }

    /// Frobenius norm of `[self, other]`.
    pub fn commutator_norm(&self, other: &OperatorMatrix) -> Result<f64> {
        let a = self.to_dense()?;
        let b = other.to_dense()?;
        Ok((&a * &b - &b * &a).norm())
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        let d = self.to_dense()? - other.to_dense()?;
        Ok(d.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    pub fn hermiticity_defect(&self) -> Result<f64> {
        let a = self.to_dense()?;
        Ok((&a - a.adjoint()).norm())
    }

    pub fn scaled(&self, c: Complex64) -> Result<OperatorMatrix> {
        Ok(Self::from_dense(OperatorLabel::Composite, self.sites, self.to_dense()? * c))
    }

    pub fn sum(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        Ok(Self::from_dense(OperatorLabel::Composite, self.sites, self.to_dense()? + other.to_dense()?))
    }

    pub fn rayleigh_quotient(&self, v: &StateVector<f64>) -> Result<Complex64> {
        let norm2: f64 = v.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(BetheError::ZeroVector);
        }
        let w = self.apply(&v.amplitudes);
        Ok(cx::inner(&v.amplitudes, &w) / norm2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

fn is_down(x: usize, site: usize) -> bool {
    x >> site & 1 == 1
}

/// Pauli matrix on `site` (0-based).
pub fn pauli(sites: usize, axis: Axis, site: usize) -> Result<OperatorMatrix> {
    check_cap(sites, DEFAULT_SIZE_CAP)?;
    assert!(site < sites);
    let label = match axis {
        Axis::X => OperatorLabel::PauliX(site),
        Axis::Y => OperatorLabel::PauliY(site),
        Axis::Z => OperatorLabel::PauliZ(site),
    };
    Ok(OperatorMatrix::from_columns(label, sites, |y| {
        let mut col = vec![Complex64::zero(); 1 << sites];
        let down = is_down(y, site);
        match axis {
            Axis::X => col[y ^ 1 << site] = Complex64::new(1.0, 0.0),
            // σ^y|↑⟩ = i|↓⟩, σ^y|↓⟩ = −i|↑⟩
            Axis::Y => col[y ^ 1 << site] = Complex64::new(0.0, if down { -1.0 } else { 1.0 }),
            Axis::Z => col[y] = Complex64::new(if down { -1.0 } else { 1.0 }, 0.0),
        }
        col
    }))
}

/// Exchange of sites `i` and `j`.
pub fn permutation(sites: usize, i: usize, j: usize) -> Result<OperatorMatrix> {
    check_cap(sites, DEFAULT_SIZE_CAP)?;
    Ok(OperatorMatrix::from_columns(OperatorLabel::Permutation(i, j), sites, |y| {
        let mut col = vec![Complex64::zero(); 1 << sites];
        let x = if is_down(y, i) == is_down(y, j) { y } else { y ^ (1 << i | 1 << j) };
        col[x] = Complex64::new(1.0, 0.0);
        col
    }))
}

/// Total spin component `Σ_n σ_n^a / 2`.
pub fn total_spin(sites: usize, axis: Axis) -> Result<OperatorMatrix> {
    let mut acc = pauli(sites, axis, 0)?.scaled(Complex64::new(0.5, 0.0))?;
    for n in 1..sites {
        acc = acc.sum(&pauli(sites, axis, n)?.scaled(Complex64::new(0.5, 0.0))?)?;
    }
    Ok(acc)
}

/// Number of down spins in a basis state.
pub fn magnons_of(x: usize) -> usize {
    x.count_ones() as usize
}

/// A chain state with fixed magnon number.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    pub sites: usize,
    pub magnon_number: usize,
    pub amplitudes: Vec<Cx<T>>,
}

impl<T: Real> StateVector<T> {
    /// The all-up state `|0⟩`.
    pub fn reference(sites: usize) -> Self {
        let mut amplitudes = vec![Cx::zero(); 1 << sites];
        amplitudes[0] = cx::from_f64(1.0, 0.0);
        StateVector {
            sites,
            magnon_number: 0,
            amplitudes,
        }
    }

    /// Wraps amplitudes supported in a single magnon sector. A zero vector is
    /// assigned the sector `expected`.
    pub fn from_amplitudes(sites: usize, expected: usize, amplitudes: Vec<Cx<T>>) -> Result<Self> {
        if amplitudes.len() != 1 << sites {
            return Err(BetheError::DimensionMismatch {
                expected: 1 << sites,
                got: amplitudes.len(),
            });
        }
        let scale = cx::max_norm(&amplitudes);
        let stray = amplitudes
            .iter()
            .enumerate()
            .filter(|(x, _)| magnons_of(*x) != expected)
            .map(|(_, a)| cx::norm_f64(a))
            .fold(0.0, f64::max);
        if stray > 1e-12 * scale {
            return Err(BetheError::InvalidOptions(format!(
                "state has weight {stray:e} outside the {expected}-magnon sector"
            )));
        }
        Ok(StateVector {
            sites,
            magnon_number: expected,
            amplitudes,
        })
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> T {
        cx::l2_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Cx<T> {
        cx::inner(&self.amplitudes, &other.amplitudes)
    }

    /// Unit norm with the first non-negligible amplitude real and positive.
    pub fn canonical(&self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > T::zero()) {
            return Err(BetheError::ZeroVector);
        }
        let big = cx::max_norm(&self.amplitudes);
        let lead = self
            .amplitudes
            .iter()
            .find(|a| cx::norm_f64(a) > 1e-6 * big)
            .expect("nonzero vector has a leading amplitude");
        let phase = lead.clone().conj() / Cx::new(cx::abs(lead), T::zero());
        let factor = phase / Cx::new(norm, T::zero());
        Ok(StateVector {
            sites: self.sites,
            magnon_number: self.magnon_number,
            amplitudes: self.amplitudes.iter().map(|a| a.clone() * factor.clone()).collect(),
        })
    }

    pub fn to_f64(&self) -> StateVector<f64> {
        StateVector {
            sites: self.sites,
            magnon_number: self.magnon_number,
            amplitudes: self.amplitudes.iter().map(cx::to_f64).collect(),
        }
    }
}
