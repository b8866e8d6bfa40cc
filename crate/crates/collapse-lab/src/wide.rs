//! Floating-point scalars with an extended binary exponent.
//!
//! Along a certified nearly-linear collapse the gap, the flight time, and the
//! normal velocity components contract geometrically: each collision removes
//! a fixed fraction of their decades, and several hundred collisions traverse
//! hundreds of orders of magnitude. IEEE-754 doubles bottom out near 1e-308,
//! so the collapse-regime scalars are carried as a pair `(m, e)` representing
//! `m · 2^e` with `m` a 53-bit mantissa normalized to `0.5 ≤ |m| < 1` and `e`
//! an unbounded (i64) binary exponent.
//!
//! Arithmetic delegates mantissa work to ordinary `f64` operations, so every
//! operation rounds once at 53-bit precision, exactly like an `f64` with no
//! exponent limits. Directions and tangential velocity components are O(1)
//! quantities and stay in plain `f64`; only the scalars that underflow use
//! [`Wide`].
//!
//! The normalized representation is unique, there are no NaNs or infinities
//! (constructing from a non-finite `f64` panics), so equality and the total
//! order are well defined.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A scalar `m · 2^e` with unbounded exponent; `0.5 ≤ |m| < 1` or `m = e = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wide {
    m: f64,
    e: i64,
}

/// Exact power of two for `k ∈ [-1022, 1023]`.
#[inline]
fn pow2i(k: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// Splits a finite nonzero `f64` into `(m, e)` with `0.5 ≤ |m| < 1`.
fn frexp(x: f64) -> (f64, i64) {
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    if exp_field == 0 {
        // Subnormal: rescale into the normal range first.
        let (m, e) = frexp(x * pow2i(64));
        (m, e - 64)
    } else {
        let e = exp_field - 1022;
        let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
        (m, e)
    }
}

impl Wide {
    pub const ZERO: Wide = Wide { m: 0.0, e: 0 };
    pub const ONE: Wide = Wide { m: 0.5, e: 1 };

    /// Builds from any finite `f64`. Panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Wide {
        assert!(x.is_finite(), "Wide::from_f64 requires a finite value, got {x}");
        if x == 0.0 {
            return Wide::ZERO;
        }
        let (m, e) = frexp(x);
        Wide { m, e }
    }

    /// Renormalizes an intermediate `(m, e)` pair.
    fn normalize(m: f64, e: i64) -> Wide {
        debug_assert!(m.is_finite());
        if m == 0.0 {
            return Wide::ZERO;
        }
        let (f, k) = frexp(m);
        Wide { m: f, e: e + k }
    }

    /// Mantissa in `[0.5, 1)` (or 0), carrying the sign.
    #[inline]
    pub fn mantissa(self) -> f64 {
        self.m
    }

    /// Binary exponent of the normalized representation.
    #[inline]
    pub fn exponent(self) -> i64 {
        self.e
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    #[inline]
    pub fn is_sign_positive(self) -> bool {
        self.m > 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.m < 0.0
    }

    #[inline]
    pub fn abs(self) -> Wide {
        Wide {
            m: self.m.abs(),
            e: self.e,
        }
    }

    /// Nearest `f64`, rounding into subnormals, zero, or infinity as needed.
    pub fn to_f64(self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        if self.e > 1025 {
            return if self.m > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if self.e < -1130 {
            return if self.m > 0.0 { 0.0 } else { -0.0 };
        }
        // Two exact power-of-two factors keep each step in range.
        let half = (self.e / 2) as i32;
        let rest = (self.e - half as i64) as i32;
        self.m * pow2i(half) * pow2i(rest)
    }

    /// Natural log of the absolute value. Well defined (finite) for any
    /// nonzero value, no matter the exponent. Panics on zero.
    pub fn ln_abs(self) -> f64 {
        assert!(self.m != 0.0, "ln_abs of zero");
        self.m.abs().ln() + self.e as f64 * std::f64::consts::LN_2
    }

    /// Base-10 log of the absolute value. Panics on zero.
    pub fn log10_abs(self) -> f64 {
        assert!(self.m != 0.0, "log10_abs of zero");
        self.m.abs().log10() + self.e as f64 * std::f64::consts::LOG10_2
    }

    /// Square root. Panics on negative input.
    pub fn sqrt(self) -> Wide {
        assert!(self.m >= 0.0, "sqrt of a negative Wide value");
        if self.m == 0.0 {
            return Wide::ZERO;
        }
        let q = self.e.div_euclid(2);
        let r = self.e.rem_euclid(2);
        // value = m · 2^r · 4^q with m·2^r in [0.5, 2)
        Wide::normalize((self.m * pow2i(r as i32)).sqrt(), q)
    }

    /// `self²`, convenience for the many squared scalars in the formulas.
    #[inline]
    pub fn square(self) -> Wide {
        self * self
    }

    /// Total-order comparison (no NaNs exist by construction).
    pub fn cmp_total(self, other: Wide) -> Ordering {
        let sa = sign_class(self);
        let sb = sign_class(other);
        if sa != sb {
            return sa.cmp(&sb);
        }
        match sa {
            0 => Ordering::Equal,
            1 => cmp_same_sign_magnitude(self, other),
            _ => cmp_same_sign_magnitude(other, self),
        }
    }

    pub fn min(self, other: Wide) -> Wide {
        if self.cmp_total(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Wide) -> Wide {
        if self.cmp_total(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Scientific-notation string with the given number of significant digits
    /// (the decimal exponent is computed from the binary one, so values far
    /// outside the `f64` range print correctly).
    pub fn to_sci_string(self, sig_digits: usize) -> String {
        if self.m == 0.0 {
            return "0.0".to_string();
        }
        let l10 = self.log10_abs();
        let mut d = l10.floor() as i64;
        let mut mant = 10f64.powf(l10 - d as f64);
        // Guard against rounding drift at decade boundaries.
        if mant >= 10.0 {
            mant /= 10.0;
            d += 1;
        }
        if mant < 1.0 {
            mant *= 10.0;
            d -= 1;
        }
        let digits = sig_digits.saturating_sub(1).min(16);
        let sign = if self.m < 0.0 { "-" } else { "" };
        let formatted = format!("{mant:.digits$}");
        // Formatting may round the mantissa up to exactly 10.
        if formatted.starts_with("10") {
            let rescaled = format!("{:.digits$}", mant / 10.0);
            format!("{sign}{rescaled}e{}", d + 1)
        } else {
            format!("{sign}{formatted}e{d}")
        }
    }
}

#[inline]
fn sign_class(x: Wide) -> i32 {
    if x.m > 0.0 {
        1
    } else if x.m < 0.0 {
        -1
    } else {
        0
    }
}

/// Magnitude comparison for two values of identical (nonzero) sign, returning
/// the ordering of `a` vs `b` as signed values with positive sign convention.
fn cmp_same_sign_magnitude(a: Wide, b: Wide) -> Ordering {
    match a.e.cmp(&b.e) {
        Ordering::Equal => a.m.abs().partial_cmp(&b.m.abs()).unwrap(),
        ord => ord,
    }
}

impl Eq for Wide {}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Wide) -> Option<Ordering> {
        Some(self.cmp_total(*other))
    }
}

impl Ord for Wide {
    fn cmp(&self, other: &Wide) -> Ordering {
        self.cmp_total(*other)
    }
}

impl From<f64> for Wide {
    fn from(x: f64) -> Wide {
        Wide::from_f64(x)
    }
}

impl Neg for Wide {
    type Output = Wide;
    #[inline]
    fn neg(self) -> Wide {
        Wide {
            m: -self.m,
            e: self.e,
        }
    }
}

impl Add for Wide {
    type Output = Wide;
    fn add(self, rhs: Wide) -> Wide {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.e >= rhs.e {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = hi.e - lo.e;
        if shift > 60 {
            // The low part is beyond half an ulp of the high part.
            return hi;
        }
        let sum = hi.m + lo.m * pow2i(-(shift as i32));
        Wide::normalize(sum, hi.e)
    }
}

impl Sub for Wide {
    type Output = Wide;
    #[inline]
    fn sub(self, rhs: Wide) -> Wide {
        self + (-rhs)
    }
}

impl Mul for Wide {
    type Output = Wide;
    fn mul(self, rhs: Wide) -> Wide {
        if self.is_zero() || rhs.is_zero() {
            return Wide::ZERO;
        }
        let m = self.m * rhs.m; // in [0.25, 1)
        let e = self.e + rhs.e;
        if m.abs() >= 0.5 {
            Wide { m, e }
        } else {
            Wide { m: m * 2.0, e: e - 1 }
        }
    }
}

impl Div for Wide {
    type Output = Wide;
    fn div(self, rhs: Wide) -> Wide {
        assert!(!rhs.is_zero(), "Wide division by zero");
        if self.is_zero() {
            return Wide::ZERO;
        }
        let m = self.m / rhs.m; // in (0.5, 2)
        let e = self.e - rhs.e;
        if m.abs() < 1.0 {
            Wide { m, e }
        } else {
            Wide { m: m * 0.5, e: e + 1 }
        }
    }
}

impl fmt::Display for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(9))
    }
}

impl Serialize for Wide {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_sci_string(17))
    }
}
