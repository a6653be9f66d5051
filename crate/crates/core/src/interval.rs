//! Moore interval arithmetic on closed real intervals.
//!
//! Every operation returns the exact range of the pointwise real operation
//! over its operands, computed with ordinary round-to-nearest floating point
//! (no directed rounding). Degenerate intervals `[x, x]` behave exactly like
//! the real number `x`.

use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("invalid interval bounds [{lo}, {hi}]: lower endpoint exceeds upper endpoint")]
    Inverted { lo: f64, hi: f64 },
    #[error("interval endpoints must be finite, got [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("arithmetic overflow in interval {op}")]
    Overflow { op: &'static str },
    #[error("division by an interval containing zero: {divisor}")]
    DivisionByZero { divisor: Interval },
    #[error("square root of an interval with negative lower endpoint: {arg}")]
    NegativeSqrt { arg: Interval },
}

/// A closed interval `[lo, hi]` with finite endpoints and `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NonFinite { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Inverted { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// The degenerate interval `[x, x]`.
    ///
    /// Panics if `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "degenerate interval from non-finite value {x}");
        Interval { lo: x, hi: x }
    }

    /// Symmetric interval `[center - radius, center + radius]`.
    pub fn from_center_radius(center: f64, radius: f64) -> Result<Self, IntervalError> {
        Interval::new(center - radius, center + radius)
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.width() <= tol
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `self ⊆ other`, with `tol` slack on both endpoints.
    pub fn is_subset_of(&self, other: &Interval, tol: f64) -> bool {
        other.lo - tol <= self.lo && self.hi <= other.hi + tol
    }

    pub fn checked_add(self, rhs: Interval) -> Result<Interval, IntervalError> {
        finish(self.lo + rhs.lo, self.hi + rhs.hi, "addition")
    }

    pub fn checked_sub(self, rhs: Interval) -> Result<Interval, IntervalError> {
        finish(self.lo - rhs.hi, self.hi - rhs.lo, "subtraction")
    }

    pub fn checked_mul(self, rhs: Interval) -> Result<Interval, IntervalError> {
        let (lo, hi) = min_max4(self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi);
        finish(lo, hi, "multiplication")
    }

    /// Moore division; the divisor must not contain zero.
    ///
    /// Evaluated as the hull of the four endpoint quotients, which is the
    /// same set as `self × [1/rhs.hi, 1/rhs.lo]` without the extra rounding
    /// of the reciprocal.
    pub fn checked_div(self, rhs: Interval) -> Result<Interval, IntervalError> {
        if rhs.contains(0.0) {
            return Err(IntervalError::DivisionByZero { divisor: rhs });
        }
        let (lo, hi) = min_max4(self.lo / rhs.lo, self.lo / rhs.hi, self.hi / rhs.lo, self.hi / rhs.hi);
        finish(lo, hi, "division")
    }

    pub fn checked_sqrt(self) -> Result<Interval, IntervalError> {
        if self.lo < 0.0 {
            return Err(IntervalError::NegativeSqrt { arg: self });
        }
        Ok(Interval { lo: self.lo.sqrt(), hi: self.hi.sqrt() })
    }

    /// Real-by-interval product `c · self`.
    pub fn checked_scale(self, c: f64) -> Result<Interval, IntervalError> {
        if !c.is_finite() {
            return Err(IntervalError::Overflow { op: "scalar multiplication" });
        }
        let (lo, hi) = if c >= 0.0 { (c * self.lo, c * self.hi) } else { (c * self.hi, c * self.lo) };
        // 0 · x yields -0.0 for negative x; normalise so [0, 0] compares bitwise.
        finish(lo + 0.0, hi + 0.0, "scalar multiplication")
    }

    /// Smallest interval containing both operands.
    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }
}

#[inline]
fn min_max4(a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    (a.min(b).min(c.min(d)), a.max(b).max(c.max(d)))
}

#[inline]
fn finish(lo: f64, hi: f64, op: &'static str) -> Result<Interval, IntervalError> {
    if lo.is_finite() && hi.is_finite() {
        Ok(Interval { lo, hi })
    } else {
        Err(IntervalError::Overflow { op })
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

// Serialized as a `[lo, hi]` pair.
impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.lo, self.hi].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [lo, hi] = <[f64; 2]>::deserialize(deserializer)?;
        Interval::new(lo, hi).map_err(serde::de::Error::custom)
    }
}
