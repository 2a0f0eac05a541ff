//! Nonnegative reals with an unbounded binary exponent.

use std::cmp::Ordering;
use std::f64::consts::{LN_10, LN_2};
use std::fmt;
use std::ops::{Add, Div, Mul};

use crate::error::{invalid, Result};

/// A nonnegative real `m · 2^e` with `m ∈ [1, 2)` and a 64-bit exponent.
///
/// Values far outside the `f64` range (up to about `10^(10^18)`) are
/// represented without overflow, and values that do fit round-trip
/// exactly. Zero has `m = 0`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct LogScalar {
    m: f64,
    e: i64,
}

/// Splits a positive finite `x` into `(m, e)` with `m ∈ [1, 2)`.
fn split(x: f64) -> (f64, i64) {
    debug_assert!(x > 0.0 && x.is_finite());
    let (x, bias) = if x < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, exp + bias)
}

/// `m · 2^e` for `|e|` within `f64` reach, saturating otherwise.
fn scale(m: f64, e: i64) -> f64 {
    if e > 1100 {
        return m * f64::INFINITY;
    }
    if e < -1200 {
        return 0.0;
    }
    let half = (e / 2) as i32;
    m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { m: 0.0, e: 0 };
    pub const ONE: LogScalar = LogScalar { m: 1.0, e: 0 };

    fn normalized(m: f64, e: i64) -> Self {
        if m == 0.0 {
            return Self::ZERO;
        }
        let (mm, de) = split(m);
        LogScalar { m: mm, e: e + de }
    }

    /// From `log2` of the value.
    fn from_log2(l: f64) -> Self {
        if l == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let e = l.floor();
        Self::normalized((l - e).exp2(), e as i64)
    }

    /// From a nonnegative finite value.
    pub fn new(x: f64) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(invalid(
                "x",
                format!("{x} is not a nonnegative finite number"),
            ));
        }
        if x == 0.0 {
            return Ok(Self::ZERO);
        }
        let (m, e) = split(x);
        Ok(LogScalar { m, e })
    }

    /// From a natural logarithm; `NaN` and `+inf` are rejected.
    pub fn from_ln(ln: f64) -> Result<Self> {
        if ln.is_nan() || ln == f64::INFINITY {
            return Err(invalid("ln", format!("{ln} is not a valid logarithm")));
        }
        Ok(Self::from_log2(ln / LN_2))
    }

    /// Same as [`LogScalar::from_ln`] for values known to be valid.
    pub(crate) fn from_ln_unchecked(ln: f64) -> Self {
        debug_assert!(!ln.is_nan() && ln != f64::INFINITY);
        Self::from_log2(ln / LN_2)
    }

    /// Natural logarithm; `-inf` for zero.
    pub fn ln(self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.m.ln() + self.e as f64 * LN_2
    }

    pub fn log10(self) -> f64 {
        self.ln() / LN_10
    }

    /// Native value; saturates to `inf` or `0` outside the `f64` range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        scale(self.m, self.e)
    }

    /// Native value if it is representable as a normal `f64` (or is zero).
    pub fn try_f64(self) -> Option<f64> {
        let x = self.to_f64();
        (self.is_zero() || x.is_normal()).then_some(x)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.m == 0.0
    }

    pub fn powf(self, a: f64) -> Self {
        if a == 0.0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        if a == a.trunc() && a.abs() <= 64.0 {
            // exact exponent arithmetic for small integer powers
            let k = a as i32;
            return Self::normalized(self.m.powi(k), 0) * Self::from_exp2(self.e * k as i64);
        }
        let whole = self.e as f64 * a;
        let wf = whole.floor();
        let rest = (whole - wf) + a * self.m.log2();
        Self::from_log2(rest) * Self::from_exp2(wf as i64)
    }

    fn from_exp2(e: i64) -> Self {
        LogScalar { m: 1.0, e }
    }

    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return self;
        }
        if self.e % 2 == 0 {
            LogScalar {
                m: self.m.sqrt(),
                e: self.e / 2,
            }
        } else {
            Self::normalized((2.0 * self.m).sqrt(), (self.e - 1) / 2)
        }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    /// `self - other`, or `None` when the difference would be negative.
    pub fn checked_sub(self, other: Self) -> Option<Self> {
        match self.partial_cmp(&other)? {
            Ordering::Less => None,
            Ordering::Equal => Some(Self::ZERO),
            Ordering::Greater if other.is_zero() => Some(self),
            Ordering::Greater => {
                let d = self.e - other.e;
                if d > 60 {
                    return Some(self);
                }
                Some(Self::normalized(
                    self.m - other.m * 2f64.powi(-d as i32),
                    self.e,
                ))
            }
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn sum<I: IntoIterator<Item = LogScalar>>(terms: I) -> Self {
        terms.into_iter().fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => Some(self.e.cmp(&other.e).then(self.m.total_cmp(&other.m))),
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self >= rhs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        if lo.is_zero() {
            return hi;
        }
        let d = hi.e - lo.e;
        if d > 60 {
            return hi;
        }
        Self::normalized(hi.m + lo.m * 2f64.powi(-d as i32), hi.e)
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.m * rhs.m, self.e + rhs.e)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division of a LogScalar by zero");
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::normalized(self.m / rhs.m, self.e - rhs.e)
    }
}

impl Mul<f64> for LogScalar {
    type Output = LogScalar;
    /// Multiplication by a positive native factor.
    fn mul(self, rhs: f64) -> Self {
        assert!(rhs > 0.0 && rhs.is_finite(), "LogScalar scaled by {rhs}");
        let (m, e) = split(rhs);
        self * LogScalar { m, e }
    }
}

impl fmt::Debug for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogScalar({} * 2^{})", self.m, self.e)
    }
}

impl fmt::Display for LogScalar {
    /// Scientific notation with an arbitrary-size exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let prec = f.precision().unwrap_or(6);
        if let Some(x) = self.try_f64() {
            return write!(f, "{x:.prec$e}");
        }
        let l10 = self.log10();
        let mut e = l10.floor();
        let mut m = 10f64.powf(l10 - e);
        if format!("{m:.prec$}").starts_with("10") {
            m /= 10.0;
            e += 1.0;
        }
        write!(f, "{m:.prec$}e{e}")
    }
}
