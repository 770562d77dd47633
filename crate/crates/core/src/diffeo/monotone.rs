//! The smooth monotone interpolant μ(t; x₁, …, x_{n−1}).
//!
//! On each knot interval `[a/n, (a+1)/n]` the derivative is the density
//! `exp(λ_a · P_w(u))`, `u = n·t − a`, where `P_w` is a plateau that vanishes to
//! infinite order at `u = 0, 1` and equals 1 on `[w, 1 − w]`. The scalar `λ_a`
//! is the unique root of `∫₀¹ exp(λ P_w) = n·(x_{a+1} − x_a)`; the left side is
//! strictly increasing in λ with range `(0, ∞)`. The plateau width `w` shrinks
//! with the target so that small gaps need only a moderate negative λ.
//!
//! Each interval is anchored at its left knot and rescaled by the computed
//! integral, so `μ(a/n) = x_a` holds exactly and the derivative is `1 + O(ε)`
//! at every knot.

use serde::Serialize;

use crate::config::SimplexPoint;
use crate::error::{Error, Result};
use crate::numeric::bump::plateau;
use crate::numeric::quadrature::Panels;

/// Bisection tolerance on λ.
pub const LAMBDA_TOL: f64 = 1e-13;
/// Bisection step budget for λ.
pub const LAMBDA_MAX_STEPS: usize = 200;

const PANEL_TOL: f64 = 1e-16;
const INITIAL_PANELS: usize = 8;

/// Plateau width used for a rescaled target integral `g = n·gap`.
pub fn plateau_width(g: f64) -> f64 {
    0.25 * g / (1.0 + g)
}

/// Density `exp(λ·P_w(u))` on the unit interval.
#[inline]
pub fn density(lambda: f64, width: f64, u: f64) -> f64 {
    (lambda * plateau(u, width)).exp()
}

#[derive(Clone, Debug)]
struct Interval {
    start: f64,
    gap: f64,
    lambda: f64,
    width: f64,
    /// ∫₀¹ density
    integral: f64,
    /// `None` when λ = 0 and the density is identically 1
    panels: Option<Panels>,
}

impl Interval {
    fn cumulative(&self, u: f64) -> f64 {
        match &self.panels {
            None => u,
            Some(p) => {
                let (lambda, width) = (self.lambda, self.width);
                p.integral_to(&|v| density(lambda, width, v), u)
            }
        }
    }

    fn density(&self, u: f64) -> f64 {
        if self.panels.is_none() {
            1.0
        } else {
            density(self.lambda, self.width, u)
        }
    }
}

/// Summary of one knot interval, for reports and tests.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalSummary {
    pub gap: f64,
    pub lambda: f64,
    pub plateau_width: f64,
}

/// μ for a fixed simplex point.
#[derive(Clone, Debug)]
pub struct MonotoneLift {
    knots: SimplexPoint,
    intervals: Vec<Interval>,
}

fn integral(lambda: f64, width: f64) -> f64 {
    let f = |u: f64| density(lambda, width, u);
    Panels::build(
        &f,
        0.0,
        1.0,
        INITIAL_PANELS,
        PANEL_TOL * (1.0 + lambda.exp()),
    )
    .total()
}

/// Solves `∫₀¹ exp(λ P_w) = target` for λ by bracketing and bisection.
pub fn solve_lambda(target: f64, width: f64) -> Result<f64> {
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::InvalidParameter(format!("density target {target}")));
    }
    if (target - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(0.0);
    }
    let residual = |l: f64| integral(l, width) - target;
    let (mut lo, mut hi) = if target > 1.0 {
        (0.0, 1.0)
    } else {
        (-1.0, 0.0)
    };
    let mut steps = 0;
    while target > 1.0 && residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::NoConvergence(format!(
                "no upper bracket for λ, target {target}"
            )));
        }
    }
    while target < 1.0 && residual(lo) > 0.0 {
        hi = lo;
        lo *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::NoConvergence(format!(
                "no lower bracket for λ, target {target}"
            )));
        }
    }
    for _ in 0..LAMBDA_MAX_STEPS {
        if hi - lo <= LAMBDA_TOL {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!(
        "λ bisection stalled on [{lo}, {hi}] for target {target}"
    )))
}

/// Builds μ for the knot targets `t = (x₁, …, x_{n−1})`.
pub fn mu_build(t: &SimplexPoint) -> Result<MonotoneLift> {
    let n = t.n();
    let mut xs = Vec::with_capacity(n + 1);
    xs.push(0.0);
    xs.extend_from_slice(t.coords());
    xs.push(1.0);
    let mut intervals = Vec::with_capacity(n);
    for a in 0..n {
        let gap = xs[a + 1] - xs[a];
        let g = n as f64 * gap;
        let width = plateau_width(g);
        let lambda = solve_lambda(g, width)?;
        let (integral, panels) = if lambda == 0.0 {
            (1.0, None)
        } else {
            let f = |u: f64| density(lambda, width, u);
            let p = Panels::build(
                &f,
                0.0,
                1.0,
                INITIAL_PANELS,
                PANEL_TOL * (1.0 + lambda.exp()),
            );
            (p.total(), Some(p))
        };
        intervals.push(Interval {
            start: xs[a],
            gap,
            lambda,
            width,
            integral,
            panels,
        });
    }
    Ok(MonotoneLift {
        knots: t.clone(),
        intervals,
    })
}

impl MonotoneLift {
    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn knots(&self) -> &SimplexPoint {
        &self.knots
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.intervals.iter().map(|i| i.lambda).collect()
    }

    pub fn summary(&self) -> Vec<IntervalSummary> {
        self.intervals
            .iter()
            .map(|i| IntervalSummary {
                gap: i.gap,
                lambda: i.lambda,
                plateau_width: i.width,
            })
            .collect()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.n();
        let s = t * n as f64;
        let a = (s.floor() as usize).min(n - 1);
        (a, s - a as f64)
    }

    /// μ(t) on ℝ: identity outside `(0, 1)`.
    pub fn value(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return t;
        }
        let (a, u) = self.locate(t);
        let iv = &self.intervals[a];
        if u <= 0.0 {
            return iv.start;
        }
        iv.start + iv.gap * iv.cumulative(u) / iv.integral
    }

    /// μ′(t) on ℝ.
    pub fn derivative(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 1.0;
        }
        let (a, u) = self.locate(t);
        let iv = &self.intervals[a];
        self.n() as f64 * iv.gap * iv.density(u) / iv.integral
    }

    /// Degree-one periodic extension `⌊t⌋ + μ(t − ⌊t⌋)`.
    pub fn periodic_value(&self, t: f64) -> f64 {
        let k = t.floor();
        k + self.value(t - k)
    }

    pub fn periodic_derivative(&self, t: f64) -> f64 {
        self.derivative(t - t.floor())
    }
}
