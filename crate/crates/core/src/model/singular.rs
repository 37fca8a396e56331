//! Singular solutions: string detection, the physicality constraint,
//! classification and energies.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{BetheError, Result};
use crate::numeric::{cx, Cx, Real, Tolerances};

use super::system::BetheSystem;
use super::{show, Family, RootSet};

/// Exact string `{s·u, …, −s·u}` plus the remaining roots.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularDecomposition<T: Real> {
    /// Exact string values, top first.
    pub string_part: Vec<Cx<T>>,
    pub remainder: RootSet<T>,
}

impl<T: Real> SingularDecomposition<T> {
    /// Builds the decomposition with the exact string of `sys` and the given
    /// remainder.
    pub fn exact(sys: &BetheSystem<T>, remainder: RootSet<T>) -> Self {
        SingularDecomposition {
            string_part: sys.string_values(),
            remainder,
        }
    }

    /// String values followed by the remainder.
    pub fn all_roots(&self) -> Vec<Cx<T>> {
        let mut v = self.string_part.clone();
        v.extend(self.remainder.roots().iter().cloned());
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Regular,
    SingularPhysical,
    SingularUnphysical,
    NotASolution,
}

impl SolutionKind {
    pub fn name(self) -> &'static str {
        match self {
            SolutionKind::Regular => "regular",
            SolutionKind::SingularPhysical => "singular_physical",
            SolutionKind::SingularUnphysical => "singular_unphysical",
            SolutionKind::NotASolution => "not_a_solution",
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, SolutionKind::SingularPhysical | SolutionKind::SingularUnphysical)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult<T: Real> {
    pub kind: SolutionKind,
    /// Constraint LHS, present for singular candidates.
    pub constraint_value: Option<Cx<T>>,
    /// Scaled residual norm of the system that decided the verdict.
    pub residual_norm: f64,
}

/// Splits off the exact string if the roots contain it.
///
/// Returns `None` when neither endpoint `±s·u` is present. Roots containing
/// an endpoint but not the whole string are rejected as
/// [`BetheError::NotDecomposable`].
pub fn detect_singular<T: Real>(
    sys: &BetheSystem<T>,
    roots: &RootSet<T>,
    tol: f64,
) -> Result<Option<SingularDecomposition<T>>> {
    if roots.len() != sys.magnons() {
        return Err(BetheError::DimensionMismatch {
            expected: sys.magnons(),
            got: roots.len(),
        });
    }
    let values = sys.string_values();
    let mut used = vec![false; roots.len()];
    let mut matched = vec![false; values.len()];
    for (v, value) in values.iter().enumerate() {
        let best = roots
            .roots()
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, r)| (k, cx::dist(r, value).to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, d)) = best {
            if d <= tol {
                used[k] = true;
                matched[v] = true;
            }
        }
    }
    let last = values.len() - 1;
    if !matched[0] && !matched[last] {
        return Ok(None);
    }
    let remainder: Vec<Cx<T>> = roots
        .roots()
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(r, _)| r.clone())
        .collect();
    let repeated = remainder
        .iter()
        .any(|r| values.iter().any(|v| cx::dist(r, v).to_f64() <= tol));
    if matched.iter().all(|&m| m) && !repeated {
        return Ok(Some(SingularDecomposition {
            string_part: values,
            remainder: RootSet::new(remainder),
        }));
    }
    let found = values
        .iter()
        .zip(&matched)
        .filter(|(_, m)| **m)
        .map(|(v, _)| show(v))
        .collect();
    let missing = if repeated {
        vec!["(string value repeated in the remainder)".to_string()]
    } else {
        values
            .iter()
            .zip(&matched)
            .filter(|(_, m)| !**m)
            .map(|(v, _)| show(v))
            .collect()
    };
    Err(BetheError::NotDecomposable { found, missing })
}

/// Constraint LHS and the physical verdict `|LHS − 1| < tol.constraint`.
pub fn physical_constraint<T: Real>(
    sys: &BetheSystem<T>,
    dec: &SingularDecomposition<T>,
    tol: &Tolerances,
) -> Result<(Cx<T>, bool)> {
    let value = sys.constraint_value(dec.remainder.roots(), tol.detection)?;
    let physical = cx::norm_f64(&(value.clone() - cx::real(T::one()))) < tol.constraint;
    Ok((value, physical))
}

/// [`classify_with`] at the default tolerances of the working precision.
pub fn classify<T: Real>(sys: &BetheSystem<T>, roots: &RootSet<T>) -> ClassificationResult<T> {
    classify_with(sys, roots, &Tolerances::for_precision::<T>())
}

/// Classifies a candidate root set.
///
/// Singular candidates are judged by the reduced equations and the
/// constraint when `β = 0`. An exact singular root set at `β ≠ 0` that solves
/// the twisted equations is reported as unphysical: it does not deform with
/// the twist.
pub fn classify_with<T: Real>(sys: &BetheSystem<T>, roots: &RootSet<T>, tol: &Tolerances) -> ClassificationResult<T> {
    let not_a_solution = |residual_norm: f64, constraint_value: Option<Cx<T>>| ClassificationResult {
        kind: SolutionKind::NotASolution,
        constraint_value,
        residual_norm,
    };
    if roots.len() != sys.magnons() || !roots.is_finite() {
        return not_a_solution(f64::INFINITY, None);
    }
    let full_norm = || sys.scaled_residual_norm(roots.roots()).unwrap_or(f64::INFINITY);
    match detect_singular(sys, roots, tol.detection) {
        Err(_) => not_a_solution(full_norm(), None),
        Ok(None) => {
            let r = full_norm();
            // The polynomial form is also nearly satisfied where both sides
            // almost vanish; a regular solution must solve the rational form.
            let relative = sys.relative_residual_norm(roots.roots()).unwrap_or(f64::INFINITY);
            if r > tol.solution || relative > tol.detection || roots.min_separation() <= tol.detection {
                not_a_solution(r, None)
            } else {
                ClassificationResult {
                    kind: SolutionKind::Regular,
                    constraint_value: None,
                    residual_norm: r,
                }
            }
        }
        Ok(Some(dec)) => {
            let (value, physical) = match physical_constraint(sys, &dec, tol) {
                Ok(v) => v,
                Err(_) => return not_a_solution(full_norm(), None),
            };
            if dec.remainder.min_separation() <= tol.detection {
                return not_a_solution(full_norm(), Some(value));
            }
            if sys.is_untwisted() {
                let r = match sys.scaled_reduced_norm(dec.remainder.roots()) {
                    Ok(r) => r,
                    Err(_) => return not_a_solution(f64::INFINITY, Some(value)),
                };
                let relative = sys.relative_reduced_norm(dec.remainder.roots()).unwrap_or(f64::INFINITY);
                if r > tol.solution || relative > tol.detection {
                    return not_a_solution(r, Some(value));
                }
                let kind = if physical {
                    SolutionKind::SingularPhysical
                } else {
                    SolutionKind::SingularUnphysical
                };
                ClassificationResult {
                    kind,
                    constraint_value: Some(value),
                    residual_norm: r,
                }
            } else {
                let r = full_norm();
                if r > tol.solution {
                    return not_a_solution(r, Some(value));
                }
                ClassificationResult {
                    kind: SolutionKind::SingularUnphysical,
                    constraint_value: Some(value),
                    residual_norm: r,
                }
            }
        }
    }
}

/// Energy of a Bethe state of the isotropic spin-1/2 chain.
///
/// Regular roots: `−½ Σ 1/(λ² + ¼)`. A physical singular solution at
/// `β = 0` contributes `−1` for the pair plus the remainder sum.
pub fn energy<T: Real>(sys: &BetheSystem<T>, roots: &RootSet<T>, tol: &Tolerances) -> Result<T> {
    let spec = sys.spec();
    if spec.family != Family::Xxx || !spec.spin.is_half() {
        return Err(BetheError::Unsupported(format!(
            "energies are available for the isotropic spin-1/2 chain only (got {}, s = {})",
            spec.family, spec.spin
        )));
    }
    let sum = |rs: &[Cx<T>]| -> T {
        let quarter = cx::real(T::ratio(1, 4));
        let total = rs.iter().fold(Cx::<T>::zero(), |acc, l| {
            acc + cx::real(T::one()) / (l.clone() * l.clone() + quarter.clone())
        });
        -(total.re * T::ratio(1, 2))
    };
    match detect_singular(sys, roots, tol.detection)? {
        None => Ok(sum(roots.roots())),
        Some(dec) => {
            if !sys.is_untwisted() {
                return Err(BetheError::Unsupported(
                    "the singular energy is defined at beta = 0 only".into(),
                ));
            }
            let (value, physical) = physical_constraint(sys, &dec, tol)?;
            if !physical {
                return Err(BetheError::Unphysical { value: show(&value) });
            }
            Ok(sum(dec.remainder.roots()) - T::one())
        }
    }
}
