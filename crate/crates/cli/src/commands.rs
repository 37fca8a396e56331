//! Dispatch of a validated [`RunConfig`] to the library.

use bethe_core::aba::{bethe_vector, singular_limit_vector, transfer_eigenvalue_check, StateVector, TransferCheck};
use bethe_core::census::{multiplet_sum_check, run_census_for, CensusReport};
use bethe_core::ed::{build_hamiltonian, match_spectrum, BetheLevel};
use bethe_core::io::{
    emit, encode_complex, encode_real, encode_roots, parse_roots, CensusReportDto, ClassificationDto, SolutionSetDto,
    SpectrumReportDto, TwistSeriesDto,
};
use bethe_core::model::{classify_with, detect_singular, energy, Family, SolutionKind};
use bethe_core::numeric::{with_digits, Mp};
use bethe_core::solver::{enumerate_solutions, newton_solve, refine_remainder, SolutionSet};
use bethe_core::twist::{expand_series_with, TwistSeries};
use bethe_core::{BetheError, BetheSystem, Cx, Real, Result, RootSet, SingularDecomposition};
use serde_json::json;

use crate::args::{CommandKind, RunConfig};
use crate::render;

/// A result in both output formats.
pub struct Output {
    pub json: String,
    pub table: String,
}

/// Generic test points for the transfer-matrix check.
pub const TEST_POINTS: [Cx<f64>; 2] = [Cx::new(0.31, 0.17), Cx::new(-0.83, 0.42)];

pub fn run(config: &RunConfig) -> Result<Output> {
    if config.precision_digits == 0 {
        dispatch::<f64>(config)
    } else {
        with_digits(config.precision_digits, || dispatch::<Mp>(config))
    }
}

fn dispatch<T: Real>(config: &RunConfig) -> Result<Output> {
    match config.command {
        CommandKind::Solve => solve::<T>(config),
        CommandKind::Classify => classify_cmd::<T>(config),
        CommandKind::Expand => expand::<T>(config),
        CommandKind::Verify => verify::<T>(config),
        CommandKind::Census => census(config),
        CommandKind::Spectrum => spectrum(config),
    }
}

fn input_roots<T: Real>(config: &RunConfig) -> Result<Option<RootSet<T>>> {
    config
        .roots
        .as_deref()
        .map(|text| Ok(RootSet::new(parse_roots(text)?)))
        .transpose()
}

fn energies<T: Real>(sys: &BetheSystem<T>, set: &SolutionSet<T>, config: &RunConfig) -> Vec<Option<T>> {
    set.solutions
        .iter()
        .map(|(r, c)| match c.kind {
            SolutionKind::Regular | SolutionKind::SingularPhysical => energy(sys, r, &config.options.tolerances).ok(),
            _ => None,
        })
        .collect()
}

fn solve<T: Real>(config: &RunConfig) -> Result<Output> {
    let sys = BetheSystem::<T>::new(&config.spec)?;
    let set = match input_roots::<T>(config)? {
        Some(seed) => {
            let roots = newton_solve(&sys, &seed, &config.options)?;
            let class = classify_with(&sys, &roots, &config.options.tolerances);
            SolutionSet {
                spec: config.spec.clone(),
                solutions: vec![(roots, class)],
                seeds_tried: 1,
                failures: 0,
            }
        }
        None => enumerate_solutions::<T>(&config.spec, &config.options)?,
    };
    let dto = SolutionSetDto::from_set(&set, &energies(&sys, &set, config));
    Ok(Output {
        json: emit("solutions", &dto)?,
        table: render::solutions(&dto),
    })
}

fn classify_cmd<T: Real>(config: &RunConfig) -> Result<Output> {
    let sys = BetheSystem::<T>::new(&config.spec)?;
    let roots = input_roots::<T>(config)?.expect("validated");
    sys.check_len(roots.roots(), config.spec.magnons)?;
    let dto = ClassificationDto::from_result(&classify_with(&sys, &roots, &config.options.tolerances));
    Ok(Output {
        json: emit("classification", &dto)?,
        table: render::classification(&dto),
    })
}

/// Decomposition of the input roots, or the bare string when none are given.
/// A non-empty remainder is polished at the working precision.
fn singular_input<T: Real>(sys: &BetheSystem<T>, config: &RunConfig) -> Result<SingularDecomposition<T>> {
    let tol = &config.options.tolerances;
    let Some(roots) = input_roots::<T>(config)? else {
        if config.spec.magnons != config.spec.spin.string_length() {
            return Err(BetheError::InvalidOptions(format!(
                "without --roots the state is the bare string, which needs M = {}",
                config.spec.spin.string_length()
            )));
        }
        return Ok(SingularDecomposition::exact(sys, RootSet::empty()));
    };
    sys.check_len(roots.roots(), config.spec.magnons)?;
    let dec = detect_singular(sys, &roots, tol.detection)?
        .ok_or_else(|| BetheError::InvalidOptions("the roots contain no exact string".into()))?;
    if dec.remainder.is_empty() {
        return Ok(dec);
    }
    let zero_twist = config.spec.clone().with_beta(0.0);
    let polished = refine_remainder::<T>(&zero_twist, &dec.remainder.to_f64(), &config.options)?;
    Ok(SingularDecomposition::exact(sys, polished))
}

fn series_for<T: Real>(config: &RunConfig, order: usize) -> Result<TwistSeries<T>> {
    let sys = BetheSystem::<T>::new(&config.spec.clone().with_beta(0.0))?;
    let dec = singular_input(&sys, config)?;
    expand_series_with(&sys, &dec, order, &config.options.tolerances)
}

fn expand<T: Real>(config: &RunConfig) -> Result<Output> {
    let dto = TwistSeriesDto::from_series(&series_for::<T>(config, config.order)?);
    Ok(Output {
        json: emit("twist_series", &dto)?,
        table: render::series(&dto),
    })
}

fn require_xxx_half(config: &RunConfig, what: &str) -> Result<()> {
    if config.spec.family != Family::Xxx || !config.spec.spin.is_half() {
        return Err(BetheError::Unsupported(format!("{what} is available for the isotropic spin-1/2 chain only")));
    }
    Ok(())
}

/// `‖Hv − ⟨H⟩v‖` and `⟨H⟩` for a unit vector.
fn hamiltonian_check(config: &RunConfig, v: &StateVector<f64>) -> Result<(f64, f64)> {
    let h = build_hamiltonian(config.spec.sites, config.spec.beta)?;
    let e = h.rayleigh_quotient(v)?;
    let norm: f64 = v.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let hv = h.apply(&v.amplitudes);
    let r: f64 = hv.iter().zip(&v.amplitudes).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
    Ok((r / norm, e.re))
}

fn transfer_json(check: &TransferCheck) -> serde_json::Value {
    json!({
        "max_residual": check.max_residual,
        "points": check.points.iter().map(|p| json!({
            "mu": encode_complex(&p.mu),
            "eigenvalue": encode_complex(&p.eigenvalue),
            "predicted": p.predicted.as_ref().map(encode_complex),
            "residual": p.residual,
        })).collect::<Vec<_>>(),
    })
}

fn verify<T: Real>(config: &RunConfig) -> Result<Output> {
    require_xxx_half(config, "verify")?;
    let sys = BetheSystem::<T>::new(&config.spec)?;
    let tol = config.options.tolerances.clone();
    let roots = input_roots::<T>(config)?.expect("validated");
    sys.check_len(roots.roots(), config.spec.magnons)?;
    let class = classify_with(&sys, &roots, &tol);
    let sites = config.spec.sites;
    let beta = T::from_f64(config.spec.beta);

    let mut transfer = None;
    let (vector, predicted_energy) = match class.kind {
        SolutionKind::Regular => {
            let v = bethe_vector(sites, &roots)?;
            transfer = Some(transfer_eigenvalue_check(sites, &roots, &beta, &TEST_POINTS)?);
            let e = energy(&sys, &roots, &tol).ok().map(|e| e.to_f64());
            (Some(v.canonical()?.to_f64()), e)
        }
        SolutionKind::SingularPhysical => {
            let series = series_for::<T>(config, sites)?;
            let v = singular_limit_vector(&series)?.to_f64();
            (Some(v), energy(&sys, &roots, &tol).ok().map(|e| e.to_f64()))
        }
        _ => (None, None),
    };
    let hamiltonian = vector.as_ref().map(|v| hamiltonian_check(config, v)).transpose()?;
    // the Hamiltonian check runs in double precision
    let threshold = tol.detection.max(1e-10);
    let passed = match hamiltonian {
        None => false,
        Some((residual, e)) => {
            residual < threshold
                && transfer.as_ref().is_none_or(|t| t.max_residual < threshold)
                && predicted_energy.is_none_or(|p| (p - e).abs() < threshold)
        }
    };
    let value = json!({
        "spec": config.spec,
        "roots": encode_roots(roots.roots()),
        "classification": ClassificationDto::from_result(&class),
        "transfer_check": transfer.as_ref().map(transfer_json),
        "hamiltonian_residual": hamiltonian.map(|h| h.0),
        "rayleigh_energy": hamiltonian.map(|h| encode_real(&h.1)),
        "bethe_energy": predicted_energy.map(|e| encode_real(&e)),
        "threshold": threshold,
        "passed": passed,
    });
    Ok(Output {
        table: render::verification(&value),
        json: emit("verification", &value)?,
    })
}

fn census(config: &RunConfig) -> Result<Output> {
    if config.precision_digits > 0 {
        return Err(BetheError::Unsupported("the census runs in double precision only".into()));
    }
    let report: CensusReport = run_census_for(&config.spec, &config.options)?;
    let dto = CensusReportDto::from_report(&report);
    let mut table = report.table();
    table.push_str(&match multiplet_sum_check(&report) {
        Ok(ok) => format!(
            "weighted total {} of 2^{} = {}: {}\n",
            report.weighted_total(),
            report.sites(),
            1u64 << report.sites(),
            if ok { "complete" } else { "incomplete" }
        ),
        Err(_) => format!("weighted total {} (unchecked)\n", report.weighted_total()),
    });
    Ok(Output {
        json: emit("census", &dto)?,
        table,
    })
}

fn spectrum(config: &RunConfig) -> Result<Output> {
    require_xxx_half(config, "spectrum")?;
    if config.precision_digits > 0 {
        return Err(BetheError::Unsupported("exact diagonalization runs in double precision only".into()));
    }
    let spec = &config.spec;
    let magnons: Vec<usize> = if spec.beta == 0.0 {
        (0..=spec.magnons.min(spec.sites - spec.magnons)).collect()
    } else {
        vec![spec.magnons]
    };
    let mut levels = Vec::new();
    for m in magnons.into_iter().filter(|&m| m <= spec.sites / 2) {
        let s = spec.clone().with_magnons(m);
        let sys = BetheSystem::<f64>::new(&s)?;
        let set = enumerate_solutions::<f64>(&s, &config.options)?;
        for ((roots, _), e) in set.solutions.iter().zip(energies(&sys, &set, config)) {
            if let Some(energy) = e {
                levels.push(BetheLevel {
                    roots: roots.clone(),
                    energy,
                });
            }
        }
    }
    let report = match_spectrum(spec.sites, spec.magnons, spec.beta, &levels, config.options.tolerances.detection)?;
    let dto = SpectrumReportDto::from_report(&report);
    Ok(Output {
        json: emit("spectrum", &dto)?,
        table: render::spectrum(&dto),
    })
}
