use bethe_core::aba::{singular_limit_vector, total_spin, Axis, StateVector};
use bethe_core::census::{census_options, run_census};
use bethe_core::ed::{
    build_hamiltonian, eigvec_overlap, full_spectrum, match_spectrum, sector_basis, sector_eigensystem, sector_spectrum,
    BetheLevel,
};
use bethe_core::model::{BetheSystem, ModelSpec, RootSet, SingularDecomposition};
use bethe_core::numeric::{with_digits, Mp};
use bethe_core::twist::expand_series;
use bethe_core::BetheError;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Gauge-transformed twisted chain: the boundary phase spread as
/// `e^{−iβ/N}` over every bond. Built from scratch on one sector.
fn gauge_sector_spectrum(n: usize, m: usize, beta: f64) -> Vec<f64> {
    let basis: Vec<usize> = (0..1usize << n).filter(|x| x.count_ones() as usize == m).collect();
    let index = |x: usize| basis.iter().position(|&y| y == x).unwrap();
    let hop = Complex64::from_polar(0.5, -beta / n as f64);
    let mut h = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
    for (col, &x) in basis.iter().enumerate() {
        for a in 0..n {
            let b = (a + 1) % n;
            let (da, db) = (x >> a & 1, x >> b & 1);
            if da == db {
                continue;
            }
            h[(col, col)] -= c(0.5, 0.0);
            let y = x ^ (1 << a) ^ (1 << b);
            // σ⁺_a σ⁻_b: site a down → up, site b up → down
            let amp = if da == 1 { hop } else { hop.conj() };
            h[(index(y), col)] += amp;
        }
    }
    sorted(SymmetricEigen::new(h).eigenvalues.iter().copied().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hermitian_and_u1_at_every_twist(n in 2usize..=7, beta in -3.0..3.0f64) {
        let h = build_hamiltonian(n, beta).unwrap();
        prop_assert!(h.hermiticity_defect().unwrap() < 1e-12);
        prop_assert!(h.commutator_norm(&total_spin(n, Axis::Z).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn gauge_form_has_the_same_spectrum(n in 2usize..=7, beta in -3.0..3.0f64, m_frac in 0.0..1.0f64) {
        let m = ((n as f64 + 1.0) * m_frac) as usize;
        let m = m.min(n);
        let ours = sector_spectrum(n, m, beta).unwrap();
        let gauge = gauge_sector_spectrum(n, m, beta);
        prop_assert_eq!(ours.len(), gauge.len());
        for (a, b) in ours.iter().zip(&gauge) {
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn trace_identity(n in 2usize..=8, beta in -1.0..1.0f64) {
        // each bond is antiparallel in half of the basis states
        let want = -(n as f64) * (1u64 << n) as f64 / 4.0;
        let sum: f64 = full_spectrum(n, beta).unwrap().iter().flatten().sum();
        prop_assert!((sum - want).abs() < 1e-9);
        prop_assert!((build_hamiltonian(n, beta).unwrap().trace() - c(want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn su2_only_without_twist() {
    for n in 2..=8 {
        let h = build_hamiltonian(n, 0.0).unwrap();
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            assert!(h.commutator_norm(&total_spin(n, axis).unwrap()).unwrap() < 1e-12);
        }
    }
    let h = build_hamiltonian(4, 0.3).unwrap();
    assert!(h.commutator_norm(&total_spin(4, Axis::Z).unwrap()).unwrap() < 1e-12);
    assert!(h.commutator_norm(&total_spin(4, Axis::X).unwrap()).unwrap() > 1e-2);
}

#[test]
fn two_site_spectrum() {
    assert_eq!(sorted(full_spectrum(2, 0.0).unwrap().concat()).len(), 4);
    let all = sorted(full_spectrum(2, 0.0).unwrap().concat());
    for (a, b) in all.iter().zip([-2.0, 0.0, 0.0, 0.0]) {
        assert!((a - b).abs() < 1e-14);
    }
    let m1 = sector_spectrum(2, 1, 0.0).unwrap();
    assert!((m1[0] + 2.0).abs() < 1e-14 && m1[1].abs() < 1e-14);
}

#[test]
fn sector_examples() {
    assert_eq!(sector_spectrum(4, 0, 0.0).unwrap(), vec![0.0]);
    let m2 = sector_spectrum(4, 2, 0.0).unwrap();
    assert_eq!(m2.len(), 6);
    assert!(m2.iter().any(|e| (e + 1.0).abs() < 1e-12));
    for n in 2..=8 {
        for m in 0..=n {
            assert_eq!(sector_basis(n, m).len(), sector_spectrum(n, m, 0.2).unwrap().len());
        }
    }
}

#[test]
fn spectrum_is_continuous_in_the_twist() {
    // Weyl: |ΔE| ≤ ‖ΔH‖ ≤ |e^{−iβ} − 1|
    let beta = 1e-3;
    for n in 3..=8 {
        for m in 0..=n / 2 {
            let a = sector_spectrum(n, m, 0.0).unwrap();
            let b = sector_spectrum(n, m, beta).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= beta + 1e-12);
            }
        }
    }
}

fn census_levels(n: usize) -> Vec<BetheLevel> {
    let report = run_census(n, &census_options()).unwrap();
    report
        .rows
        .iter()
        .flat_map(|r| r.entries.iter())
        .filter_map(|e| {
            e.energy.map(|energy| BetheLevel {
                roots: e.roots.clone(),
                energy,
            })
        })
        .collect()
}

#[test]
fn four_site_middle_sector_decomposition() {
    let levels = census_levels(4);
    let report = match_spectrum(4, 2, 0.0, &levels, 1e-8).unwrap();
    assert!(report.is_complete());
    let mut by_magnons = [0usize; 3];
    for m in &report.bethe_matches {
        by_magnons[m.level.magnons()] += 1;
    }
    assert_eq!(by_magnons, [1, 3, 2]);
}

#[test]
fn five_site_matching() {
    let levels = census_levels(5);
    let regular: Vec<BetheLevel> = levels.iter().filter(|l| l.magnons() == 2).cloned().collect();
    assert_eq!(regular.len(), 5);
    let report = match_spectrum(5, 2, 0.0, &regular, 1e-8).unwrap();
    assert!(report.unmatched_bethe().is_empty());
    // formal energy −1 of the unphysical pair
    let pair = BetheLevel {
        roots: RootSet::from_f64(&[(0.0, 0.5), (0.0, -0.5)]),
        energy: -1.0,
    };
    let report = match_spectrum(5, 2, 0.0, &[pair], 1e-8).unwrap();
    assert_eq!(report.unmatched_bethe(), vec![0]);
}

#[test]
fn empty_input_matches_nothing() {
    let report = match_spectrum(4, 2, 0.0, &[], 1e-8).unwrap();
    assert_eq!(report.unmatched_ed, (0..6).collect::<Vec<_>>());
    assert!(report.bethe_matches.is_empty());
}

#[test]
fn overlap_examples() {
    let ed = sector_eigensystem(4, 2, 0.0).unwrap();
    let vs = ed.eigenvectors.unwrap();
    assert!((eigvec_overlap(&vs[0], &vs[0]).unwrap() - 1.0).abs() < 1e-14);
    let basis = |x: usize| {
        let mut a = vec![c(0.0, 0.0); 16];
        a[x] = c(1.0, 0.0);
        StateVector::from_amplitudes(4, 2, a).unwrap()
    };
    assert_eq!(eigvec_overlap(&basis(3), &basis(5)).unwrap(), 0.0);
    let zero = StateVector::from_amplitudes(4, 2, vec![c(0.0, 0.0); 16]).unwrap();
    assert_eq!(eigvec_overlap(&zero, &basis(3)), Err(BetheError::ZeroVector));

    let limit = with_digits(40, || {
        let sys = BetheSystem::<Mp>::new(&ModelSpec::xxx(4, 2)).unwrap();
        let dec = SingularDecomposition::exact(&sys, RootSet::empty());
        singular_limit_vector(&expand_series(&sys, &dec, 4).unwrap()).unwrap().to_f64()
    });
    // E = −1 is threefold degenerate in this sector: project on the eigenspace
    let weight: f64 = ed
        .eigenvalues
        .iter()
        .zip(&vs)
        .filter(|(e, _)| (**e + 1.0).abs() < 1e-8)
        .map(|(_, w)| eigvec_overlap(&limit, w).unwrap().powi(2))
        .sum();
    assert!(weight.sqrt() > 1.0 - 1e-8);
}

#[test]
fn eigenvectors_are_eigenvectors() {
    let h = build_hamiltonian(6, 0.4).unwrap();
    let ed = sector_eigensystem(6, 3, 0.4).unwrap();
    for (e, v) in ed.eigenvalues.iter().zip(ed.eigenvectors.unwrap()) {
        let hv = h.apply(&v.amplitudes);
        let r: f64 = hv.iter().zip(&v.amplitudes).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
        assert!(r < 1e-12);
    }
}

#[test]
fn census_energies_appear_in_the_spectrum() {
    let levels = census_levels(6);
    for m in 0..=6 {
        let report = match_spectrum(6, m, 0.0, &levels, 1e-8).unwrap();
        assert!(report.is_complete(), "sector {m}");
    }
    assert!(levels.iter().all(|l| l.magnons() <= 3));
}

#[test]
fn oversized_requests() {
    assert!(matches!(build_hamiltonian(15, 0.0), Err(BetheError::SizeCap { .. })));
    assert!(build_hamiltonian(1, 0.0).is_err());
}
