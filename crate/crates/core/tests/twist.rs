use bethe_core::census::{census_options, run_census};
use bethe_core::model::{physical_constraint, BetheSystem, ModelSpec, RootSet, SingularDecomposition, SolutionKind};
use bethe_core::numeric::{cx, with_digits, Mp, Real, Tolerances};
use bethe_core::solver::{newton_solve, refine_remainder, SolveOptions};
use bethe_core::twist::{
    epsilon_constraint_check, evaluate_series, expand_series, first_order_correction, homotopy_track, regulated_limit,
    HomotopyOptions, RegulatorRegistry, TwistSeries,
};
use bethe_core::BetheError;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exact<T: Real>(spec: &ModelSpec, remainder: RootSet<T>) -> (BetheSystem<T>, SingularDecomposition<T>) {
    let sys = BetheSystem::<T>::new(spec).unwrap();
    let dec = SingularDecomposition::exact(&sys, remainder);
    (sys, dec)
}

fn mp_remainder(values: &[(f64, f64)]) -> RootSet<Mp> {
    RootSet::new(values.iter().map(|&(a, b)| cx::from_f64(a, b)).collect())
}

fn residual_at<T: Real>(series: &TwistSeries<T>, beta: f64) -> f64 {
    let b = T::from_f64(beta);
    let sys = BetheSystem::<T>::at_beta(&series.spec.clone().with_beta(beta), b.clone()).unwrap();
    sys.scaled_residual_norm(evaluate_series(series, &b).roots()).unwrap()
}

#[test]
fn first_order_examples() {
    let (sys, dec) = exact::<f64>(&ModelSpec::xxx(4, 2), RootSet::empty());
    let shift = first_order_correction(&sys, &dec).unwrap();
    assert!((shift - c(0.25, 0.0)).norm() < 1e-14);
    let s = expand_series(&sys, &dec, 1).unwrap();
    assert!((s.coefficient(0, 1) - s.coefficient(1, 1)).norm() < 1e-14);
}

#[test]
fn six_site_remainder_first_order() {
    let (sys, dec) = exact::<f64>(&ModelSpec::xxx(6, 3), RootSet::from_f64(&[(0.0, 0.0)]));
    let s = expand_series(&sys, &dec, 1).unwrap();
    assert!((s.coefficient(0, 1) - s.coefficient(1, 1)).norm() < 1e-12);
    assert_eq!(first_order_correction(&sys, &dec).unwrap(), s.coefficient(0, 1));
    // first-order truncation leaves O(β²), or O(β³) when the second-order
    // coefficients vanish
    let second = expand_series(&sys, &dec, 2).unwrap();
    let even = (0..3).all(|j| second.coefficient(j, 2).norm() < 1e-12);
    let want = if even { 3.0 } else { 2.0 };
    let r1 = residual_at(&s, 1e-4);
    let r2 = residual_at(&s, 5e-5);
    assert!(r1 < 1e-7, "{r1}");
    assert!(((r1 / r2).log2() - want).abs() < 0.05, "{}", r1 / r2);
}

#[test]
fn order_one_is_the_first_order_correction() {
    with_digits(40, || {
        for (n, m, rem) in [(4, 2, vec![]), (6, 2, vec![]), (6, 3, vec![(0.0, 0.0)])] {
            let (sys, dec) = exact::<Mp>(&ModelSpec::xxx(n, m), mp_remainder(&rem));
            let one = expand_series(&sys, &dec, 1).unwrap();
            let many = expand_series(&sys, &dec, n).unwrap();
            let c1 = first_order_correction(&sys, &dec).unwrap();
            for j in 0..m {
                assert!(cx::norm_f64(&(one.coefficient(j, 1) - many.coefficient(j, 1))) < 1e-30);
            }
            assert!(cx::norm_f64(&(c1 - one.coefficient(0, 1))) < 1e-30);
        }
    });
}

#[test]
fn six_site_order_six_residual_decay() {
    with_digits(40, || {
        let (sys, dec) = exact::<Mp>(&ModelSpec::xxx(6, 3), mp_remainder(&[(0.0, 0.0)]));
        let s = expand_series(&sys, &dec, 6).unwrap();
        let r1 = residual_at(&s, 1e-2);
        let r2 = residual_at(&s, 5e-3);
        assert!(r1 < 1e-13, "{r1}");
        let ratio = r1 / r2;
        // O(β^7) halves to 1/128
        assert!((ratio.log2() - 7.0).abs() < 0.3, "ratio {ratio}");
    });
}

#[test]
fn series_evaluation() {
    with_digits(40, || {
        let (sys, dec) = exact::<Mp>(&ModelSpec::xxx(4, 2), RootSet::empty());
        let s = expand_series(&sys, &dec, 4).unwrap();
        let at0 = evaluate_series(&s, &Mp::from_f64(0.0)).to_f64();
        assert_eq!(at0.roots(), &[c(0.0, 0.5), c(0.0, -0.5)]);

        let at = evaluate_series(&s, &Mp::from_f64(0.1)).to_f64();
        let spec = ModelSpec::xxx(4, 2).with_beta(0.1);
        let newton = newton_solve(
            &BetheSystem::<f64>::new(&spec).unwrap(),
            &RootSet::<f64>::from_f64(&[(0.025, 0.5), (0.025, -0.5)]),
            &SolveOptions::default(),
        )
        .unwrap();
        let series_sorted = at.canonicalize();
        for (a, b) in series_sorted.roots().iter().zip(newton.roots()) {
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }

        // odd part of the truncation: (λ(β) − λ(−β)) / 2 = c1 β + c3 β³
        let beta = 0.05;
        let plus = evaluate_series(&s, &Mp::from_f64(beta)).to_f64();
        let minus = evaluate_series(&s, &Mp::from_f64(-beta)).to_f64();
        for j in 0..2 {
            let odd = (plus.roots()[j] - minus.roots()[j]) / 2.0;
            let want = cx::to_f64(&s.coefficient(j, 1)) * beta + cx::to_f64(&s.coefficient(j, 3)) * beta.powi(3);
            assert!((odd - want).norm() < 1e-15, "{odd} vs {want}");
            let even = (plus.roots()[j] + minus.roots()[j]) / 2.0 - at0.roots()[j];
            let want = cx::to_f64(&s.coefficient(j, 2)) * beta.powi(2) + cx::to_f64(&s.coefficient(j, 4)) * beta.powi(4);
            assert!((even - want).norm() < 1e-15);
        }
    });
}

#[test]
fn homotopy_reaches_the_series() {
    let series = with_digits(40, || {
        let (sys, dec) = exact::<Mp>(&ModelSpec::xxx(4, 2), RootSet::empty());
        let s = expand_series(&sys, &dec, 4).unwrap();
        (evaluate_series(&s, &Mp::from_f64(0.5)).to_f64(), evaluate_series(&s, &Mp::from_f64(1e-3)).to_f64())
    });
    let path = homotopy_track(
        &ModelSpec::xxx(4, 2),
        &series.0,
        &0.5,
        &1e-3,
        20,
        &HomotopyOptions::for_precision::<f64>(),
    )
    .unwrap();
    let end = path.last().unwrap();
    assert_eq!(end.beta, 1e-3);
    for (a, b) in end.roots.roots().iter().zip(series.1.roots()) {
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
    for p in &path {
        let sys = BetheSystem::<f64>::at_beta(&ModelSpec::xxx(4, 2).with_beta(p.beta), p.beta).unwrap();
        assert!(sys.scaled_residual_norm(p.roots.roots()).unwrap() < 1e-10);
    }
}

#[test]
fn identity_path() {
    let spec = ModelSpec::xxx(4, 2);
    let start = RootSet::<f64>::from_f64(&[(0.1, 0.5), (0.1, -0.5)]);
    let sys = BetheSystem::<f64>::new(&spec.clone().with_beta(0.3)).unwrap();
    let start = newton_solve(&sys, &start, &SolveOptions::default()).unwrap();
    let path = homotopy_track(&spec, &start, &0.3, &0.3, 1, &HomotopyOptions::for_precision::<f64>()).unwrap();
    assert_eq!(path.last().unwrap().roots.roots(), start.roots());
}

#[test]
fn odd_chain_pair_has_no_deformed_family() {
    // observed: the exact pair solves the polynomial equations for every β,
    // so the tracked path never leaves it; the expansion is inconsistent
    let spec = ModelSpec::xxx(5, 2);
    let pair = RootSet::<f64>::from_f64(&[(0.0, 0.5), (0.0, -0.5)]);
    let path = homotopy_track(&spec, &pair, &0.0, &0.1, 10, &HomotopyOptions::for_precision::<f64>()).unwrap();
    let end = &path.last().unwrap().roots;
    let shift = (end.roots()[0] - c(0.0, 0.5)) / 0.1;
    assert!(shift.norm() < 1e-12, "{shift}");
    let (sys, dec) = exact::<f64>(&spec, RootSet::empty());
    assert!(matches!(first_order_correction(&sys, &dec), Err(BetheError::Inconsistent { order: 0, .. })));
}

#[test]
fn epsilon_examples() {
    let (_, dec4) = exact::<f64>(&ModelSpec::xxx(4, 2), RootSet::empty());
    let v = epsilon_constraint_check(&ModelSpec::xxx(4, 2), &dec4, &[1e-3, 5e-4, 2.5e-4]).unwrap();
    assert!((v[0] - 1.0).norm() < 1e-2);
    let e: Vec<f64> = v.iter().map(|z| (z - 1.0).norm()).collect();
    assert!(e[0] > e[1] && e[1] > e[2]);
    assert!((e[0] / e[1] - 2.0).abs() < 0.01 && (e[1] / e[2] - 2.0).abs() < 0.01);

    let (_, dec5) = exact::<f64>(&ModelSpec::xxx(5, 2), RootSet::empty());
    let v = epsilon_constraint_check(&ModelSpec::xxx(5, 2), &dec5, &[1e-3, 1e-4, 1e-5]).unwrap();
    let e: Vec<f64> = v.iter().map(|z| (z + 1.0).norm()).collect();
    assert!(e[2] < e[1] && e[1] < e[0] && e[2] < 1e-4, "{e:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epsilon_value_matches_the_closed_form(eps in 1e-6..1.0f64, half in 2usize..8) {
        let n = 2 * half;
        let spec = ModelSpec::xxx(n, 2);
        let (_, dec) = exact::<f64>(&spec, RootSet::empty());
        let got = epsilon_constraint_check(&spec, &dec, &[eps]).unwrap()[0];
        let i = c(0.0, 1.0);
        let e = c(eps, 0.0);
        let want = ((i + e) / e * (e / (e - i))).powi(n as i32);
        prop_assert!(got.is_finite());
        prop_assert!((got - want).norm() <= 1e-12 * want.norm(), "{} vs {}", got, want);
    }
}

/// Twist and ε limits of the product identity for one physical solution,
/// with the constraint value, all in 40-digit arithmetic.
fn regulator_limits(spec: &ModelSpec, remainder: &RootSet<f64>) -> (Complex64, Complex64, Complex64) {
    with_digits(40, || {
        let opts = SolveOptions::for_precision::<Mp>();
        let rem: RootSet<Mp> = if remainder.is_empty() {
            RootSet::empty()
        } else {
            refine_remainder::<Mp>(spec, remainder, &opts).unwrap()
        };
        let (sys, dec) = exact::<Mp>(spec, rem);
        let (lhs, physical) = physical_constraint(&sys, &dec, &Tolerances::for_precision::<Mp>()).unwrap();
        assert!(physical);
        let registry = RegulatorRegistry::<Mp>::standard();
        let hs: Vec<Mp> = [4e-4, 2e-4, 1e-4].iter().map(|&h| Mp::from_f64(h)).collect();
        let twist = regulated_limit(registry.build("twist", spec, &dec).unwrap().as_ref(), &hs).unwrap();
        let eps = regulated_limit(registry.build("epsilon", spec, &dec).unwrap().as_ref(), &hs).unwrap();
        (cx::to_f64(&twist.value), cx::to_f64(&eps.value), cx::to_f64(&lhs))
    })
}

#[test]
fn regularizations_agree() {
    for (n, m, rem) in [(4, 2, vec![]), (6, 3, vec![(0.0, 0.0)])] {
        let (t, e, lhs) = regulator_limits(&ModelSpec::xxx(n, m), &RootSet::from_f64(&rem));
        assert!((t - lhs).norm() < 1e-6, "twist {t} vs {lhs}");
        assert!((e - lhs).norm() < 1e-6, "epsilon {e} vs {lhs}");
    }
}

#[test]
fn first_order_equality_on_census_singular_solutions() {
    for n in [5, 6, 7, 8] {
        let report = run_census(n, &census_options()).unwrap();
        let mut physical = 0;
        let mut unphysical = 0;
        for row in &report.rows {
            for e in &row.entries {
                let kind = e.classification.kind;
                if !kind.is_singular() {
                    continue;
                }
                let spec = ModelSpec::xxx(n, row.magnons);
                let sys = BetheSystem::<f64>::new(&spec).unwrap();
                let dec = bethe_core::model::detect_singular(&sys, &e.roots, 1e-8).unwrap().unwrap();
                let expanded = expand_series(&sys, &dec, 1);
                if kind == SolutionKind::SingularPhysical {
                    let s = expanded.unwrap();
                    assert!((s.coefficient(0, 1) - s.coefficient(1, 1)).norm() < 1e-8);
                    physical += 1;
                } else {
                    assert!(matches!(expanded, Err(BetheError::Inconsistent { .. })), "N = {n}: {:?}", e.roots);
                    unphysical += 1;
                }
            }
        }
        assert!(physical + unphysical > 0);
    }
}
