//! Multiprecision real numbers backed by MPFR.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_traits::{Num, One, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::{normalize_scientific, Real};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 40;

thread_local! {
    static WORKING_DIGITS: Cell<u32> = const { Cell::new(DEFAULT_DIGITS) };
}

fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

fn working_bits() -> u32 {
    digits_to_bits(working_digits())
}

/// Working precision (decimal digits) of the current thread.
pub fn working_digits() -> u32 {
    WORKING_DIGITS.with(|d| d.get())
}

/// Sets the working precision of the current thread. New `Mp` constants are
/// created at this precision; arithmetic keeps the larger operand precision.
pub fn set_working_digits(digits: u32) {
    WORKING_DIGITS.with(|d| d.set(digits.max(1)));
}

/// Restores the previous working precision on drop.
pub struct PrecisionScope {
    previous: u32,
}

impl PrecisionScope {
    pub fn new(digits: u32) -> Self {
        let previous = working_digits();
        set_working_digits(digits);
        PrecisionScope { previous }
    }
}

impl Drop for PrecisionScope {
    fn drop(&mut self) {
        set_working_digits(self.previous);
    }
}

/// Runs `f` with the working precision temporarily set to `digits`.
pub fn with_digits<R>(digits: u32, f: impl FnOnce() -> R) -> R {
    let _scope = PrecisionScope::new(digits);
    f()
}

/// MPFR float carrying its own precision.
#[derive(Clone)]
pub struct Mp(Float);

impl Mp {
    pub fn from_float(f: Float) -> Self {
        Mp(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    fn prec_with(&self, other: &Mp) -> u32 {
        self.0.prec().max(other.0.prec())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Mp {
            type Output = Mp;
            fn $method(self, rhs: Mp) -> Mp {
                let p = self.prec_with(&rhs);
                Mp(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, rhs: Mp) -> Mp {
        let p = self.prec_with(&rhs);
        let mut out = Float::with_val(p, &self.0);
        out %= &rhs.0;
        Mp(out)
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl PartialEq for Mp {
    fn eq(&self, other: &Mp) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Mp {
    fn partial_cmp(&self, other: &Mp) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Zero for Mp {
    fn zero() -> Mp {
        Mp(Float::with_val(working_bits(), 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Mp {
        Mp(Float::with_val(working_bits(), 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Mp, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(Mp(Float::with_val(working_bits(), parsed)))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({})", self.to_decimal())
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp(Float::with_val(working_bits(), x))
    }
    fn from_i64(n: i64) -> Self {
        Mp(Float::with_val(working_bits(), n))
    }
    fn ratio(n: i64, d: i64) -> Self {
        let p = working_bits();
        Mp(Float::with_val(p, Float::with_val(p, n) / d))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn abs(&self) -> Self {
        Mp(self.0.clone().abs())
    }
    fn sqrt(&self) -> Self {
        Mp(self.0.clone().sqrt())
    }
    fn sin(&self) -> Self {
        Mp(self.0.clone().sin())
    }
    fn cos(&self) -> Self {
        Mp(self.0.clone().cos())
    }
    fn exp(&self) -> Self {
        Mp(self.0.clone().exp())
    }
    fn ln(&self) -> Self {
        Mp(self.0.clone().ln())
    }
    fn sinh(&self) -> Self {
        Mp(self.0.clone().sinh())
    }
    fn cosh(&self) -> Self {
        Mp(self.0.clone().cosh())
    }
    fn atan2(&self, x: &Self) -> Self {
        let p = self.prec_with(x);
        Mp(Float::with_val(p, &self.0).atan2(&x.0))
    }
    fn hypot(&self, other: &Self) -> Self {
        let p = self.prec_with(other);
        Mp(Float::with_val(p, &self.0).hypot(&other.0))
    }
    fn powi(&self, n: i32) -> Self {
        Mp(self.0.clone().pow(n))
    }
    fn pi() -> Self {
        Mp(Float::with_val(working_bits(), Constant::Pi))
    }
    fn epsilon() -> Self {
        let p = working_bits();
        Mp(Float::with_val(p, 1) >> (p - 1))
    }
    fn decimal_digits() -> u32 {
        working_digits()
    }
    fn is_multiprecision() -> bool {
        true
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(Mp(Float::with_val(working_bits(), parsed)))
    }
    fn to_decimal(&self) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        let raw = self.0.to_string_radix(10, Some(working_digits() as usize));
        normalize_scientific(&raw)
    }
}
