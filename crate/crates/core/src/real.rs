//! Working-precision plumbing for MPFR floats.

use std::fmt;

use rug::ops::Pow;
use rug::Float;

/// Arbitrary-precision real number.
pub type Real = Float;

/// Working precision in significant decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

/// log2(10), rounded up far enough that `bits()` never undershoots.
const BITS_PER_DIGIT: f64 = 3.321_928_094_887_363;

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 60;

    pub const fn digits(digits: u32) -> Self {
        Precision(digits)
    }

    pub fn decimal_digits(self) -> u32 {
        self.0
    }

    /// Mantissa size in bits, with a small guard so that `digits` decimal
    /// places survive rounding.
    pub fn bits(self) -> u32 {
        (f64::from(self.0) * BITS_PER_DIGIT).ceil() as u32 + 8
    }

    /// `10^-(digits - 10)`: residual tolerance leaving ten guard digits.
    pub fn residual_tolerance(self) -> Real {
        let exp = i32::try_from(self.0).unwrap_or(i32::MAX).saturating_sub(10).max(1);
        self.pow10(-exp)
    }

    pub fn real(self, v: impl Into<f64>) -> Real {
        Float::with_val(self.bits(), v.into())
    }

    pub fn int(self, v: i64) -> Real {
        Float::with_val(self.bits(), v)
    }

    pub fn pow10(self, exp: i32) -> Real {
        Float::with_val(self.bits(), 10).pow(exp)
    }

    pub fn pi(self) -> Real {
        Float::with_val(self.bits(), rug::float::Constant::Pi)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(Self::DEFAULT_DIGITS)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} digits", self.0)
    }
}

/// Renders `x` with `digits` significant decimal digits, in positional
/// notation when the decimal exponent lies in `-6..=digits` and in
/// scientific notation otherwise.
pub fn to_decimal(x: &Real, digits: u32) -> String {
    let digits = digits.max(1) as usize;
    if !x.is_normal() {
        return x.to_string_radix(10, Some(digits));
    }
    // x = 0.mantissa * 10^exp
    let (negative, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    let exp = exp.expect("normal floats have an exponent");
    let sign = if negative { "-" } else { "" };
    if exp > digits as i32 || exp < -6 {
        return x.to_string_radix(10, Some(digits));
    }
    if exp <= 0 {
        let zeros = "0".repeat((-exp) as usize);
        return format!("{sign}0.{zeros}{mantissa}");
    }
    let (int, frac) = mantissa.split_at(exp as usize);
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
