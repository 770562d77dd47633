//! Smooth maps `f: S¹ → S¹` given by their lifts.

mod analysis;
pub mod catalog;
mod equivalence;
mod symmetry;
mod word;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::circle::Angle;
use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::numeric::roots::solve_increasing;

pub use analysis::{
    analyze, normalize_exceptional, Branch, CriticalPoint, ExceptionalPoint, Level, MapAnalysis,
    MERGE_TOL, MORSE_TOL, SCAN_POINTS,
};
pub use equivalence::{conjugacy_residual, right_equivalence, RESIDUAL_GRID, RESIDUAL_TOL};
pub use symmetry::{post_rotate, symmetry_group, SymmetryInfo, SymmetryWitness};
pub use word::{cyclic_word, CriticalKind, CyclicWord, Letter};

/// A smooth map of the circle, described by a lift `L` with
/// `L(t + 1) = L(t) + degree`.
pub trait CircleMap: Send + Sync {
    fn degree(&self) -> i64;
    fn lift(&self, t: f64) -> f64;
    fn lift_derivative(&self, t: f64) -> f64;

    /// `L″(t)`; central differences of `L′` unless overridden.
    fn lift_second_derivative(&self, t: f64) -> f64 {
        let h = 1e-5;
        (self.lift_derivative(t + h) - self.lift_derivative(t - h)) / (2.0 * h)
    }

    fn eval(&self, x: Angle) -> Angle {
        Angle::wrap(self.lift(x.value()))
    }

    fn describe(&self) -> Value;

    #[doc(hidden)]
    fn as_composed(&self) -> Option<&ComposedMap> {
        None
    }
}

impl fmt::Debug for dyn CircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircleMap({})", self.describe())
    }
}

/// `L(t) = degree·t + c₀ + Σⱼ aⱼ cos 2πjt + bⱼ sin 2πjt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleValuedMap {
    pub degree: i64,
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl CircleValuedMap {
    pub fn new(
        degree: i64,
        constant: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    ) -> Result<CircleValuedMap> {
        let m = CircleValuedMap {
            degree,
            constant,
            cos,
            sin,
        };
        m.validate()?;
        Ok(m)
    }

    /// Rejects non-finite coefficients.
    pub fn validate(&self) -> Result<()> {
        for &c in std::iter::once(&self.constant)
            .chain(&self.cos)
            .chain(&self.sin)
        {
            if !c.is_finite() {
                return Err(Error::NonFinite(c));
            }
        }
        Ok(())
    }

    pub fn from_json(v: &Value) -> Result<CircleValuedMap> {
        let m: CircleValuedMap =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    /// Sum over harmonics of `(aⱼ·c, bⱼ·s)` where `(c, s)` are the `p`-th
    /// derivatives of `cos 2πjt`, `sin 2πjt`.
    fn harmonics(&self, t: f64, order: u32) -> f64 {
        let len = self.cos.len().max(self.sin.len());
        let mut acc = 0.0;
        for j in 1..=len {
            let w = TAU * j as f64;
            let (s, c) = (w * t).sin_cos();
            let a = self.cos.get(j - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(j - 1).copied().unwrap_or(0.0);
            // d^p/dt^p of a cos + b sin cycles through (c, −s, −c, s) scaled by w^p
            let scale = w.powi(order as i32);
            acc += scale
                * match order % 4 {
                    0 => a * c + b * s,
                    1 => -a * s + b * c,
                    2 => -a * c - b * s,
                    _ => a * s - b * c,
                };
        }
        acc
    }
}

impl CircleMap for CircleValuedMap {
    fn degree(&self) -> i64 {
        self.degree
    }

    fn lift(&self, t: f64) -> f64 {
        self.degree as f64 * t + self.constant + self.harmonics(t, 0)
    }

    fn lift_derivative(&self, t: f64) -> f64 {
        self.degree as f64 + self.harmonics(t, 1)
    }

    fn lift_second_derivative(&self, t: f64) -> f64 {
        self.harmonics(t, 2)
    }

    fn describe(&self) -> Value {
        json!({"degree": self.degree, "constant": self.constant, "cos": self.cos, "sin": self.sin})
    }
}

/// `R ∘ f ∘ h⁻¹` for diffeomorphisms `R` (target) and `h` (domain).
#[derive(Clone)]
pub struct ComposedMap {
    base: Arc<dyn CircleMap>,
    target: CircleDiffeo,
    domain: CircleDiffeo,
}

impl ComposedMap {
    /// Builds `target ∘ base ∘ domain⁻¹`, absorbing nested compositions.
    pub fn new(
        base: Arc<dyn CircleMap>,
        target: CircleDiffeo,
        domain: CircleDiffeo,
    ) -> ComposedMap {
        if let Some(inner) = base.as_composed() {
            return ComposedMap {
                base: inner.base.clone(),
                target: target.compose(&inner.target),
                domain: domain.compose(&inner.domain),
            };
        }
        ComposedMap {
            base,
            target,
            domain,
        }
    }

    pub fn base(&self) -> &Arc<dyn CircleMap> {
        &self.base
    }

    pub fn target(&self) -> &CircleDiffeo {
        &self.target
    }

    pub fn domain(&self) -> &CircleDiffeo {
        &self.domain
    }

    fn pull(&self, t: f64) -> f64 {
        if self.domain.is_identity() {
            t
        } else {
            self.domain.solve_lift(t)
        }
    }
}

impl CircleMap for ComposedMap {
    fn degree(&self) -> i64 {
        self.base.degree()
    }

    fn lift(&self, t: f64) -> f64 {
        self.target.lift(self.base.lift(self.pull(t)))
    }

    fn lift_derivative(&self, t: f64) -> f64 {
        let x = self.pull(t);
        let dx = if self.domain.is_identity() {
            1.0
        } else {
            1.0 / self.domain.derivative(x)
        };
        self.target.derivative(self.base.lift(x)) * self.base.lift_derivative(x) * dx
    }

    fn lift_second_derivative(&self, t: f64) -> f64 {
        if self.domain.is_identity() && self.target.as_rotation().is_some() {
            return self.base.lift_second_derivative(t);
        }
        let h = 1e-5;
        (self.lift_derivative(t + h) - self.lift_derivative(t - h)) / (2.0 * h)
    }

    fn describe(&self) -> Value {
        json!({"composed": {
            "target": self.target.provenance(),
            "map": self.base.describe(),
            "domain": self.domain.provenance(),
        }})
    }

    fn as_composed(&self) -> Option<&ComposedMap> {
        Some(self)
    }
}

/// `x` on ℝ with `L(x) = y`, for a map without critical points.
pub fn invert_covering(f: &dyn CircleMap, y: f64) -> Result<f64> {
    let d = f.degree();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "degree-zero map is not a covering".into(),
        ));
    }
    let sign = d.signum() as f64;
    let guess = (y - f.lift(0.0)) / d as f64;
    solve_increasing(
        |x| (sign * (f.lift(x) - y), sign * f.lift_derivative(x)),
        guess,
        1e-15,
    )
}
