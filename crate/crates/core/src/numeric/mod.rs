//! Scalar arithmetic shared by every module.
//!
//! All numerical routines are generic over [`Real`], which is implemented for
//! machine `f64` and for the multiprecision [`Mp`] float. Complex values use
//! `num_complex::Complex<T>` (aliased [`Cx`]); the helpers in [`cx`] supply the
//! transcendental functions that `num_complex` only provides for `Float` types.

pub mod cx;
pub mod extrapolate;
pub mod linalg;
mod mp;
pub mod series;

use std::fmt;
use std::ops::Neg;

use num_traits::Num;

pub use mp::{set_working_digits, with_digits, working_digits, Mp, PrecisionScope, DEFAULT_DIGITS};

/// Complex number over a [`Real`] field.
pub type Cx<T> = num_complex::Complex<T>;

/// Real scalar field used by the solvers.
///
/// Constants created through this trait (`from_f64`, `pi`, `zero`, ...) use the
/// current working precision; see [`set_working_digits`] for `Mp`.
pub trait Real:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Send + Sync + 'static + Num + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn atan2(&self, x: &Self) -> Self;

    fn pi() -> Self;
    /// Unit roundoff at the working precision.
    fn epsilon() -> Self;
    /// Significant decimal digits carried at the working precision.
    fn decimal_digits() -> u32;
    /// True for the multiprecision implementation.
    fn is_multiprecision() -> bool;

    fn parse_decimal(s: &str) -> Option<Self>;
    /// Decimal rendering that round-trips through [`Real::parse_decimal`] at the
    /// working precision. Trailing zeros are stripped, so dyadic values such as
    /// `0.25` print exactly.
    fn to_decimal(&self) -> String;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn hypot(&self, other: &Self) -> Self {
        (self.clone() * self.clone() + other.clone() * other.clone()).sqrt()
    }

    fn powi(&self, n: i32) -> Self {
        let mut base = if n < 0 { Self::one() / self.clone() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn atan2(&self, x: &Self) -> Self {
        f64::atan2(*self, *x)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn decimal_digits() -> u32 {
        16
    }
    fn is_multiprecision() -> bool {
        false
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        s.trim().parse::<f64>().ok()
    }
    fn to_decimal(&self) -> String {
        if *self == 0.0 {
            return "0".to_string();
        }
        if !self.is_finite() {
            return format!("{self}");
        }
        normalize_scientific(&format!("{self:e}"))
    }
}

/// Rewrites `d.ddde±x` output into a compact decimal: trailing zeros removed and
/// positional notation for moderate exponents.
pub(crate) fn normalize_scientific(s: &str) -> String {
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().unwrap_or(0)),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits: String = format!("{int_part}{frac_part}");
    // position of the decimal point relative to the start of `digits`
    let mut point = int_part.len() as i64 + exp;
    let lead = digits.len() - digits.trim_start_matches('0').len();
    digits.drain(..lead);
    point -= lead as i64;
    let trimmed = digits.trim_end_matches('0').len();
    digits.truncate(trimmed);
    if digits.is_empty() {
        return "0".to_string();
    }
    let sign = if neg { "-" } else { "" };
    let n = digits.len() as i64;
    if point > 21 || point < -6 {
        let (head, tail) = digits.split_at(1);
        let e = point - 1;
        return if tail.is_empty() {
            format!("{sign}{head}e{e}")
        } else {
            format!("{sign}{head}.{tail}e{e}")
        };
    }
    if point <= 0 {
        format!("{sign}0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point >= n {
        format!("{sign}{}{}", digits, "0".repeat((point - n) as usize))
    } else {
        let (a, b) = digits.split_at(point as usize);
        format!("{sign}{a}.{b}")
    }
}

/// Numerical thresholds tied to the working precision.
///
/// Comparisons are carried out on `f64` magnitudes; even 40-digit tolerances
/// are far inside the `f64` exponent range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Distance below which a root is identified with an exact string value.
    pub detection: f64,
    /// Scaled residual norm accepted as a solution.
    pub solution: f64,
    /// Allowed deviation `|LHS - 1|` of the physicality constraint.
    pub constraint: f64,
}

impl Tolerances {
    /// Defaults: `1e-8` / `1e-10` in double precision, `10^-(d/2)` /
    /// `10^-(d-10)` at `d` decimal digits.
    pub fn for_precision<T: Real>() -> Self {
        if T::is_multiprecision() {
            let d = T::decimal_digits() as i32;
            let detection = 10f64.powi(-(d / 2));
            Tolerances {
                detection,
                solution: 10f64.powi(-(d - 10).max(10)),
                constraint: detection,
            }
        } else {
            Tolerances {
                detection: 1e-8,
                solution: 1e-10,
                constraint: 1e-8,
            }
        }
    }
}
