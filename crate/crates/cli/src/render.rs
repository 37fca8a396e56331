//! Plain-text tables for `--format table`.

use std::fmt::Write as _;

use bethe_core::io::{ClassificationDto, ComplexDto, SolutionSetDto, SpectrumReportDto, TwistSeriesDto};

fn complex(z: &ComplexDto) -> String {
    let im = &z[1];
    match im.strip_prefix('-') {
        Some(abs) => format!("{}-{}i", z[0], abs),
        None => format!("{}+{}i", z[0], im),
    }
}

fn roots(rs: &[ComplexDto]) -> String {
    if rs.is_empty() {
        return "(none)".into();
    }
    rs.iter().map(complex).collect::<Vec<_>>().join(", ")
}

pub fn classification(c: &ClassificationDto) -> String {
    let mut out = format!("kind        {}\n", c.kind.name());
    if let Some(v) = &c.constraint_value {
        writeln!(out, "constraint  {}", complex(v)).unwrap();
    }
    writeln!(out, "residual    {:e}", c.residual_norm).unwrap();
    out
}

pub fn solutions(s: &SolutionSetDto) -> String {
    let mut out = format!(
        "N = {}, M = {}, beta = {}: {} solutions from {} seeds\n",
        s.spec.sites,
        s.spec.magnons,
        s.spec.beta,
        s.solutions.len(),
        s.seeds_tried
    );
    let width = s.solutions.iter().map(|x| x.classification.kind.name().len()).max().unwrap_or(0);
    for x in &s.solutions {
        let energy = x.energy.as_deref().unwrap_or("-");
        writeln!(
            out,
            "{:<width$}  E = {:<24}  {}",
            x.classification.kind.name(),
            energy,
            roots(&x.roots)
        )
        .unwrap();
    }
    out
}

pub fn series(s: &TwistSeriesDto) -> String {
    let mut out = format!("string     {}\nremainder  {}\n", roots(&s.string), roots(&s.remainder));
    let base: Vec<&ComplexDto> = s.string.iter().chain(&s.remainder).collect();
    for (j, (b, cs)) in base.iter().zip(&s.coefficients).enumerate() {
        writeln!(out, "root {j}: {}", complex(b)).unwrap();
        for (l, c) in cs.iter().enumerate() {
            writeln!(out, "  c{}  {}", l + 1, complex(c)).unwrap();
        }
    }
    out
}

pub fn spectrum(s: &SpectrumReportDto) -> String {
    let mut out = format!("N = {}, sector M = {}, beta = {}\n", s.sites, s.sector, s.beta);
    let mut bethe: Vec<Option<usize>> = vec![None; s.ed_eigenvalues.len()];
    for (k, m) in s.bethe_matches.iter().enumerate() {
        if let Some(i) = m.ed_index {
            bethe[i] = Some(k);
        }
    }
    for (i, e) in s.ed_eigenvalues.iter().enumerate() {
        match bethe[i] {
            Some(k) => writeln!(out, "{e:<24}  {}", roots(&s.bethe_matches[k].roots)).unwrap(),
            None => writeln!(out, "{e:<24}  unmatched").unwrap(),
        }
    }
    let unmatched = s.bethe_matches.iter().filter(|m| m.ed_index.is_none()).count();
    if unmatched > 0 {
        writeln!(out, "{unmatched} Bethe levels without an ED partner").unwrap();
    }
    out
}

pub fn verification(v: &serde_json::Value) -> String {
    let mut out = String::new();
    let kind = v["classification"]["kind"].as_str().unwrap_or("?");
    writeln!(out, "kind                  {kind}").unwrap();
    if let Some(r) = v["transfer_check"]["max_residual"].as_f64() {
        writeln!(out, "transfer residual     {r:e}").unwrap();
    }
    if let Some(r) = v["hamiltonian_residual"].as_f64() {
        writeln!(out, "hamiltonian residual  {r:e}").unwrap();
    }
    for (label, key) in [("rayleigh energy", "rayleigh_energy"), ("bethe energy", "bethe_energy")] {
        if let Some(e) = v[key].as_str() {
            writeln!(out, "{label:<22}{e}").unwrap();
        }
    }
    writeln!(out, "passed                {}", v["passed"]).unwrap();
    out
}
