//! JSON persistence of results.
//!
//! Every document is an [`Envelope`] `{schema_version, kind, result}`.
//! Complex numbers are two-element arrays of decimal strings `[re, im]`,
//! written with [`Real::to_decimal`] so multiprecision values survive a round
//! trip at the working precision. Struct fields serialize in declaration
//! order, which keeps the output deterministic.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::census::{CensusEntry, CensusReport, CensusRow};
use crate::ed::{BetheLevel, BetheMatch, SpectrumReport};
use crate::error::{BetheError, Result};
use crate::model::{ClassificationResult, ModelSpec, RootSet, SingularDecomposition, SolutionKind};
use crate::numeric::{Cx, Real};
use crate::solver::SolutionSet;
use crate::twist::TwistSeries;

pub const SCHEMA_VERSION: u32 = 1;

pub type ComplexDto = [String; 2];

pub fn encode_complex<T: Real>(z: &Cx<T>) -> ComplexDto {
    [z.re.to_decimal(), z.im.to_decimal()]
}

pub fn decode_complex<T: Real>(d: &ComplexDto) -> Result<Cx<T>> {
    let part = |s: &str| T::parse_decimal(s).ok_or_else(|| BetheError::Parse(format!("invalid decimal '{s}'")));
    Ok(Cx::new(part(&d[0])?, part(&d[1])?))
}

pub fn encode_roots<T: Real>(r: &[Cx<T>]) -> Vec<ComplexDto> {
    r.iter().map(encode_complex).collect()
}

pub fn decode_roots<T: Real>(d: &[ComplexDto]) -> Result<Vec<Cx<T>>> {
    d.iter().map(decode_complex).collect()
}

pub fn encode_real<T: Real>(x: &T) -> String {
    x.to_decimal()
}

pub fn decode_real<T: Real>(s: &str) -> Result<T> {
    T::parse_decimal(s).ok_or_else(|| BetheError::Parse(format!("invalid decimal '{s}'")))
}

/// Parses a comma-separated root list.
///
/// Each token is `a`, `bi`, `a+bi` or `a-bi` with decimal `a`, `b`, where a
/// bare `i` means `1i`. The imaginary part may also be a rational `ki/d`
/// (`i/2`, `-3i/2`, `0.25+i/2`), which is formed exactly at the working
/// precision instead of going through a decimal.
pub fn parse_roots<T: Real>(text: &str) -> Result<Vec<Cx<T>>> {
    let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(parse_root).collect()
}

fn parse_root<T: Real>(token: &str) -> Result<Cx<T>> {
    let bad = || BetheError::Parse(format!("invalid root '{token}'"));
    if token.is_empty() {
        return Err(bad());
    }
    let bytes = token.as_bytes();
    // a sign that is neither leading nor part of an exponent splits re / im
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&token[..k], Some(&token[k..])),
        None if token.contains('i') => ("", Some(token)),
        None => (token, None),
    };
    let re = if re.is_empty() {
        T::zero()
    } else {
        T::parse_decimal(re).filter(|x| x.to_f64().is_finite()).ok_or_else(bad)?
    };
    let im = match im {
        Some(s) => parse_imaginary::<T>(s).ok_or_else(bad)?,
        None => T::zero(),
    };
    Ok(Cx::new(re, im))
}

fn parse_imaginary<T: Real>(s: &str) -> Option<T> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (coeff, den) = match body.split_once("i/") {
        Some((c, d)) => (c, Some(d.parse::<i64>().ok().filter(|&d| d > 0)?)),
        None => (body.strip_suffix('i')?, None),
    };
    let mut value = if coeff.is_empty() {
        T::one()
    } else {
        T::parse_decimal(coeff).filter(|x| x.to_f64().is_finite())?
    };
    if let Some(d) = den {
        value = value / T::from_i64(d);
    }
    Some(if neg { -value } else { value })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub kind: String,
    pub result: R,
}

/// Serializes `result` as a pretty-printed envelope.
pub fn emit<R: Serialize>(kind: &str, result: &R) -> Result<String> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        result,
    };
    serde_json::to_string_pretty(&env).map_err(|e| BetheError::Parse(e.to_string()))
}

/// Parses an envelope, checking the schema version and the kind.
pub fn parse<R: DeserializeOwned>(kind: &str, text: &str) -> Result<R> {
    let env: Envelope<R> = serde_json::from_str(text).map_err(|e| BetheError::Parse(e.to_string()))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(BetheError::Parse(format!(
            "schema version {} is not supported (expected {SCHEMA_VERSION})",
            env.schema_version
        )));
    }
    if env.kind != kind {
        return Err(BetheError::Parse(format!("expected a '{kind}' document, found '{}'", env.kind)));
    }
    Ok(env.result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationDto {
    pub kind: SolutionKind,
    pub constraint_value: Option<ComplexDto>,
    pub residual_norm: f64,
}

impl ClassificationDto {
    pub fn from_result<T: Real>(c: &ClassificationResult<T>) -> Self {
        ClassificationDto {
            kind: c.kind,
            constraint_value: c.constraint_value.as_ref().map(encode_complex),
            residual_norm: c.residual_norm,
        }
    }

    pub fn to_result<T: Real>(&self) -> Result<ClassificationResult<T>> {
        Ok(ClassificationResult {
            kind: self.kind,
            constraint_value: self.constraint_value.as_ref().map(decode_complex).transpose()?,
            residual_norm: self.residual_norm,
        })
    }
}

/// A root set with its classification and, where defined, its energy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionDto {
    pub roots: Vec<ComplexDto>,
    pub classification: ClassificationDto,
    pub energy: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSetDto {
    pub spec: ModelSpec,
    pub seeds_tried: usize,
    pub failures: usize,
    pub solutions: Vec<SolutionDto>,
}

impl SolutionSetDto {
    pub fn from_set<T: Real>(s: &SolutionSet<T>, energies: &[Option<T>]) -> Self {
        SolutionSetDto {
            spec: s.spec.clone(),
            seeds_tried: s.seeds_tried,
            failures: s.failures,
            solutions: s
                .solutions
                .iter()
                .enumerate()
                .map(|(k, (r, c))| SolutionDto {
                    roots: encode_roots(r.roots()),
                    classification: ClassificationDto::from_result(c),
                    energy: energies.get(k).cloned().flatten().as_ref().map(encode_real),
                })
                .collect(),
        }
    }

    pub fn to_set<T: Real>(&self) -> Result<SolutionSet<T>> {
        Ok(SolutionSet {
            spec: self.spec.clone(),
            seeds_tried: self.seeds_tried,
            failures: self.failures,
            solutions: self
                .solutions
                .iter()
                .map(|s| Ok((RootSet::new(decode_roots(&s.roots)?), s.classification.to_result()?)))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistSeriesDto {
    pub spec: ModelSpec,
    pub order: usize,
    /// Exact string values, top first.
    pub string: Vec<ComplexDto>,
    pub remainder: Vec<ComplexDto>,
    /// `coefficients[j][l-1]` is the order-`l` coefficient of root `j`
    /// (string members first).
    pub coefficients: Vec<Vec<ComplexDto>>,
}

impl TwistSeriesDto {
    pub fn from_series<T: Real>(s: &TwistSeries<T>) -> Self {
        TwistSeriesDto {
            spec: s.spec.clone(),
            order: s.order,
            string: encode_roots(&s.base.string_part),
            remainder: encode_roots(s.base.remainder.roots()),
            coefficients: s.coefficients.iter().map(|c| encode_roots(c)).collect(),
        }
    }

    pub fn to_series<T: Real>(&self) -> Result<TwistSeries<T>> {
        Ok(TwistSeries {
            spec: self.spec.clone(),
            base: SingularDecomposition {
                string_part: decode_roots(&self.string)?,
                remainder: RootSet::new(decode_roots(&self.remainder)?),
            },
            coefficients: self.coefficients.iter().map(|c| decode_roots(c)).collect::<Result<_>>()?,
            order: self.order,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRowDto {
    pub magnons: usize,
    pub n_regular: usize,
    pub n_singular_physical: usize,
    pub n_singular_unphysical: usize,
    pub expected: Option<usize>,
    pub seeds_tried: usize,
    pub reran: bool,
    pub complete: Option<bool>,
    pub solutions: Vec<SolutionDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReportDto {
    pub spec: ModelSpec,
    pub weighted_total: usize,
    pub rows: Vec<CensusRowDto>,
}

impl CensusReportDto {
    pub fn from_report(r: &CensusReport) -> Self {
        CensusReportDto {
            spec: r.spec.clone(),
            weighted_total: r.weighted_total(),
            rows: r
                .rows
                .iter()
                .map(|row| CensusRowDto {
                    magnons: row.magnons,
                    n_regular: row.n_regular,
                    n_singular_physical: row.n_singular_physical,
                    n_singular_unphysical: row.n_singular_unphysical,
                    expected: row.expected,
                    seeds_tried: row.seeds_tried,
                    reran: row.reran,
                    complete: row.complete,
                    solutions: row
                        .entries
                        .iter()
                        .map(|e| SolutionDto {
                            roots: encode_roots(e.roots.roots()),
                            classification: ClassificationDto::from_result(&e.classification),
                            energy: e.energy.as_ref().map(encode_real),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_report(&self) -> Result<CensusReport> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                Ok(CensusRow {
                    magnons: row.magnons,
                    n_regular: row.n_regular,
                    n_singular_physical: row.n_singular_physical,
                    n_singular_unphysical: row.n_singular_unphysical,
                    expected: row.expected,
                    seeds_tried: row.seeds_tried,
                    reran: row.reran,
                    complete: row.complete,
                    entries: row
                        .solutions
                        .iter()
                        .map(|s| {
                            Ok(CensusEntry {
                                roots: RootSet::new(decode_roots(&s.roots)?),
                                classification: s.classification.to_result()?,
                                energy: s.energy.as_deref().map(decode_real).transpose()?,
                            })
                        })
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(CensusReport {
            spec: self.spec.clone(),
            rows,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchDto {
    pub roots: Vec<ComplexDto>,
    pub energy: String,
    pub ed_index: Option<usize>,
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReportDto {
    pub sites: usize,
    pub sector: usize,
    pub beta: f64,
    pub tolerance: f64,
    pub ed_eigenvalues: Vec<String>,
    pub bethe_matches: Vec<MatchDto>,
    pub unmatched_ed: Vec<usize>,
    pub ambiguous: Vec<usize>,
}

impl SpectrumReportDto {
    pub fn from_report(r: &SpectrumReport) -> Self {
        SpectrumReportDto {
            sites: r.sites,
            sector: r.sector,
            beta: r.beta,
            tolerance: r.tolerance,
            ed_eigenvalues: r.ed_eigenvalues.iter().map(encode_real).collect(),
            bethe_matches: r
                .bethe_matches
                .iter()
                .map(|m| MatchDto {
                    roots: encode_roots(m.level.roots.roots()),
                    energy: encode_real(&m.level.energy),
                    ed_index: m.ed_index,
                    delta: m.delta,
                })
                .collect(),
            unmatched_ed: r.unmatched_ed.clone(),
            ambiguous: r.ambiguous.clone(),
        }
    }

    pub fn to_report(&self) -> Result<SpectrumReport> {
        Ok(SpectrumReport {
            sites: self.sites,
            sector: self.sector,
            beta: self.beta,
            tolerance: self.tolerance,
            ed_eigenvalues: self.ed_eigenvalues.iter().map(|s| decode_real(s)).collect::<Result<_>>()?,
            bethe_matches: self
                .bethe_matches
                .iter()
                .map(|m| {
                    Ok(BetheMatch {
                        level: BetheLevel {
                            roots: RootSet::new(decode_roots(&m.roots)?),
                            energy: decode_real(&m.energy)?,
                        },
                        ed_index: m.ed_index,
                        delta: m.delta,
                    })
                })
                .collect::<Result<_>>()?,
            unmatched_ed: self.unmatched_ed.clone(),
            ambiguous: self.ambiguous.clone(),
        })
    }
}
