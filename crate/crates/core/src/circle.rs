//! Arithmetic on the circle ℝ/ℤ, measured in turns.
//!
//! A point of S¹ is an [`Angle`] with canonical representative in `[0, 1)`.
//! Complex division of unit numbers becomes subtraction of turns, so the
//! chart `t ↦ e^{2πit}` is the identity here.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A point of the circle in turns, normalized to `[0, 1)`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Reduces `r` mod 1. Fails on non-finite input.
    pub fn new(r: f64) -> Result<Angle> {
        if !r.is_finite() {
            return Err(Error::NonFinite(r));
        }
        Ok(Angle::wrap(r))
    }

    /// Reduces a finite real mod 1.
    #[inline]
    pub fn wrap(r: f64) -> Angle {
        debug_assert!(r.is_finite(), "non-finite angle {r}");
        let v = r.rem_euclid(1.0);
        // rem_euclid rounds tiny negatives up to exactly 1.0
        Angle(if v >= 1.0 { 0.0 } else { v })
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Signed difference `self − other` in `(−½, ½]`.
    #[inline]
    pub fn sub(self, other: Angle) -> f64 {
        angle_sub(self, other)
    }

    /// Unsigned distance along the circle, in `[0, ½]`.
    #[inline]
    pub fn distance(self, other: Angle) -> f64 {
        angle_sub(self, other).abs()
    }

    /// Offset of `self` from `base` travelling positively, in `[0, 1)`.
    #[inline]
    pub fn offset_from(self, base: Angle) -> f64 {
        Angle::wrap(self.0 - base.0).0
    }

    pub fn rotate(self, by: f64) -> Angle {
        Angle::wrap(self.0 + by)
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;
    fn try_from(r: f64) -> Result<Angle> {
        Angle::new(r)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Angle({})", self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `r mod 1` in `[0, 1)`.
pub fn angle_normalize(r: f64) -> Result<Angle> {
    Angle::new(r)
}

/// Representative of a real number mod 1 in `(−½, ½]`.
#[inline]
pub fn signed_turns(d: f64) -> f64 {
    let r = d - (d - 0.5).ceil();
    // guard the rounding edge where r lands just outside the window
    if r <= -0.5 {
        r + 1.0
    } else {
        r
    }
}

/// Unique representative of `a − b` in `(−½, ½]`.
#[inline]
pub fn angle_sub(a: Angle, b: Angle) -> f64 {
    signed_turns(a.0 - b.0)
}

/// True iff travelling positively from `a` meets `b` before `c`.
pub fn cyclic_order(a: Angle, b: Angle, c: Angle) -> Result<bool> {
    if a == b {
        return Err(Error::CoincidentPoints(a.0, b.0));
    }
    if a == c {
        return Err(Error::CoincidentPoints(a.0, c.0));
    }
    if b == c {
        return Err(Error::CoincidentPoints(b.0, c.0));
    }
    Ok(b.offset_from(a) < c.offset_from(a))
}

/// An open arc of S¹ traversed positively from `start`.
///
/// `length` lies in `(0, 1]`; length 1 is the complement of the single point
/// `start`, which is the only arc available when there is one marked point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    start: Angle,
    length: f64,
}

impl CircleArc {
    /// The open arc from `start` to `end`; the endpoints must differ.
    pub fn new(start: Angle, end: Angle) -> Result<CircleArc> {
        if start == end {
            return Err(Error::CoincidentPoints(start.0, end.0));
        }
        Ok(CircleArc {
            start,
            length: end.offset_from(start),
        })
    }

    /// S¹ minus the point `p`.
    pub fn punctured(p: Angle) -> CircleArc {
        CircleArc {
            start: p,
            length: 1.0,
        }
    }

    pub fn start(&self) -> Angle {
        self.start
    }

    pub fn end(&self) -> Angle {
        self.start.rotate(self.length)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Membership in the open arc, decided by cyclic order.
    pub fn contains(&self, x: Angle) -> bool {
        if x == self.start {
            return false;
        }
        x.offset_from(self.start) < self.length
    }
}
