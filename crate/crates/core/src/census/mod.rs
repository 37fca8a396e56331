//! Completeness census: all solutions per magnon number, classified and
//! counted against the number of highest-weight states.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::ed::{match_spectrum, BetheLevel, SpectrumReport};
use crate::error::{BetheError, Result};
use crate::model::{energy, root_set_distance, BetheSystem, ClassificationResult, Family, ModelSpec, RootSet, SolutionKind};
use crate::solver::{enumerate_solutions, SolveOptions};

/// Largest chain accepted by [`run_census`].
pub const MAX_CENSUS_SITES: usize = 10;
/// Seed multiplier for the single rerun of an incomplete row.
pub const RERUN_FACTOR: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct CensusEntry {
    pub roots: RootSet<f64>,
    pub classification: ClassificationResult<f64>,
    /// Energy of regular and physical singular solutions.
    pub energy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub magnons: usize,
    pub n_regular: usize,
    pub n_singular_physical: usize,
    pub n_singular_unphysical: usize,
    /// `C(N,M) − C(N,M−1)`; absent for families without a known count.
    pub expected: Option<usize>,
    pub seeds_tried: usize,
    pub reran: bool,
    /// `Some(true)` when the physical count reaches `expected`.
    pub complete: Option<bool>,
    pub entries: Vec<CensusEntry>,
}

impl CensusRow {
    pub fn physical(&self) -> usize {
        self.n_regular + self.n_singular_physical
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusReport {
    pub spec: ModelSpec,
    pub rows: Vec<CensusRow>,
}

impl CensusReport {
    pub fn sites(&self) -> usize {
        self.spec.sites
    }

    /// `Σ_M (n_regular + n_singular_physical)(N − 2M + 1)`.
    pub fn weighted_total(&self) -> usize {
        let n = self.sites();
        self.rows.iter().map(|r| r.physical() * (n + 1 - 2 * r.magnons)).sum()
    }

    pub fn incomplete_rows(&self) -> Vec<usize> {
        self.rows
            .iter()
            .filter(|r| r.complete != Some(true))
            .map(|r| r.magnons)
            .collect()
    }

    /// Aligned text table, one line per magnon number.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "N = {}  ({}, s = {})",
            self.sites(),
            self.spec.family,
            self.spec.spin
        );
        let _ = writeln!(
            s,
            "{:>3} {:>8} {:>10} {:>12} {:>9} {:>7}  {}",
            "M", "regular", "sing.phys", "sing.unphys", "expected", "seeds", "status"
        );
        for r in &self.rows {
            let expected = r.expected.map_or("-".to_string(), |e| e.to_string());
            let status = match (r.complete, r.reran) {
                (Some(true), false) => "complete",
                (Some(true), true) => "complete (rerun)",
                (Some(false), _) => "INCOMPLETE",
                (None, _) => "unchecked",
            };
            let _ = writeln!(
                s,
                "{:>3} {:>8} {:>10} {:>12} {:>9} {:>7}  {}",
                r.magnons,
                r.n_regular,
                r.n_singular_physical,
                r.n_singular_unphysical,
                expected,
                r.seeds_tried,
                status
            );
        }
        s
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of highest-weight states with `M` magnons, `C(N,M) − C(N,M−1)`.
pub fn highest_weight_count(sites: usize, magnons: usize) -> usize {
    let below = if magnons == 0 { 0 } else { binomial(sites, magnons - 1) };
    binomial(sites, magnons) - below
}

fn has_expected_count(spec: &ModelSpec) -> bool {
    spec.family == Family::Xxx && spec.spin.is_half()
}

fn merge(into: &mut Vec<CensusEntry>, more: Vec<CensusEntry>, distance: f64) {
    for e in more {
        if into.iter().all(|f| root_set_distance(&f.roots, &e.roots) > distance) {
            into.push(e);
        }
    }
}

fn enumerate_row(spec: &ModelSpec, opts: &SolveOptions) -> Result<(Vec<CensusEntry>, usize)> {
    if spec.magnons == 0 {
        let sys = BetheSystem::<f64>::new(spec)?;
        let empty = RootSet::empty();
        let classification = crate::model::classify(&sys, &empty);
        return Ok((
            vec![CensusEntry {
                roots: empty,
                classification,
                energy: Some(0.0),
            }],
            0,
        ));
    }
    let set = enumerate_solutions::<f64>(spec, opts)?;
    let sys = BetheSystem::<f64>::new(spec)?;
    let entries = set
        .solutions
        .into_iter()
        .map(|(roots, classification)| {
            let energy = match classification.kind {
                SolutionKind::Regular | SolutionKind::SingularPhysical => energy(&sys, &roots, &opts.tolerances).ok(),
                _ => None,
            };
            CensusEntry {
                roots,
                classification,
                energy,
            }
        })
        .collect();
    Ok((entries, set.seeds_tried))
}

fn count(entries: &[CensusEntry], kind: SolutionKind) -> usize {
    entries.iter().filter(|e| e.classification.kind == kind).count()
}

fn census_row(spec: &ModelSpec, opts: &SolveOptions) -> Result<CensusRow> {
    let expected = has_expected_count(spec).then(|| highest_weight_count(spec.sites, spec.magnons));
    let (mut entries, mut seeds_tried) = enumerate_row(spec, opts)?;
    let physical = |e: &[CensusEntry]| count(e, SolutionKind::Regular) + count(e, SolutionKind::SingularPhysical);
    let mut reran = false;
    if let Some(want) = expected {
        if physical(&entries) < want {
            let more = opts
                .clone()
                .with_seeds(opts.seed_count * RERUN_FACTOR)
                .with_random_seed(opts.random_seed.wrapping_add(1));
            let (extra, tried) = enumerate_row(spec, &more)?;
            merge(&mut entries, extra, opts.dedup_distance);
            seeds_tried += tried;
            reran = true;
        }
    }
    Ok(CensusRow {
        magnons: spec.magnons,
        n_regular: count(&entries, SolutionKind::Regular),
        n_singular_physical: count(&entries, SolutionKind::SingularPhysical),
        n_singular_unphysical: count(&entries, SolutionKind::SingularUnphysical),
        expected,
        seeds_tried,
        reran,
        complete: expected.map(|e| physical(&entries) == e),
        entries,
    })
}

/// Census of the periodic spin-1/2 XXX chain for `M = 0 … N/2`.
pub fn run_census(sites: usize, opts: &SolveOptions) -> Result<CensusReport> {
    run_census_for(&ModelSpec::xxx(sites, 0), opts)
}

/// Census for an arbitrary family and spin at zero twist. Only the spin-1/2
/// XXX chain has an expected count; other rows are reported unchecked.
pub fn run_census_for(base: &ModelSpec, opts: &SolveOptions) -> Result<CensusReport> {
    if base.sites > MAX_CENSUS_SITES {
        return Err(BetheError::SizeCap {
            n: base.sites,
            cap: MAX_CENSUS_SITES,
        });
    }
    let base = base.clone().with_beta(0.0);
    base.clone().with_magnons(0).validate()?;
    opts.validate()?;
    let rows = (0..=base.sites / 2)
        .into_par_iter()
        .map(|m| census_row(&base.clone().with_magnons(m), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusReport {
        spec: base.with_magnons(0),
        rows,
    })
}

/// Census defaults: 1000 seeds per row in double precision.
pub fn census_options() -> SolveOptions {
    SolveOptions::for_precision::<f64>().with_seeds(1000)
}

/// Whether the weighted count of a complete report equals `2^N`.
pub fn multiplet_sum_check(report: &CensusReport) -> Result<bool> {
    let missing = report.incomplete_rows();
    if !missing.is_empty() {
        return Err(BetheError::IncompleteReport(missing));
    }
    Ok(report.weighted_total() == 1usize << report.sites())
}

/// Matches the census energies against the ED spectrum of every sector
/// `M = 0 … N`, SU(2) descendants included.
pub fn energy_cross_check(report: &CensusReport, tol: f64) -> Result<Vec<SpectrumReport>> {
    if !has_expected_count(&report.spec) {
        return Err(BetheError::Unsupported("energies are available for the spin-1/2 XXX chain only".into()));
    }
    let levels: Vec<BetheLevel> = report
        .rows
        .iter()
        .flat_map(|r| r.entries.iter())
        .filter_map(|e| {
            e.energy.map(|energy| BetheLevel {
                roots: e.roots.clone(),
                energy,
            })
        })
        .collect();
    let n = report.sites();
    (0..=n)
        .into_par_iter()
        .map(|m| match_spectrum(n, m, 0.0, &levels, tol))
        .collect()
}
