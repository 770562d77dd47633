//! Orientation-preserving diffeomorphisms of S¹ as composable expressions.
//!
//! A [`CircleDiffeo`] is an expression tree over primitive constructors.
//! Group operations build new nodes without resampling; numerics only enter
//! when a lift is evaluated. Every diffeomorphism carries the lift `L` with
//! `L(0) ∈ [0, 1)`, `L(t + 1) = L(t) + 1`.

pub mod monotone;
pub mod section;

use serde_json::{json, Value};
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::numeric::roots::{newton_bisect, solve_increasing};

pub use monotone::{mu_build, MonotoneLift};
pub use section::{
    contract_fixing, contract_toward_identity, evaluation_map, fixes_exceptional, fixes_values,
    interpolating_diffeo, permutation_shift, permutes_exceptional,
};

/// A degree-one lift supplied from outside this module (e.g. a diffeomorphism
/// defined by branch inversion of a circle-valued map).
pub trait LiftPrimitive: Send + Sync {
    /// A strictly increasing lift with `lift(t + 1) = lift(t) + 1`.
    fn lift(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// Provenance for reports.
    fn describe(&self) -> Value;
}

const TABLE_SIZE: usize = 64;
const SOLVE_TOL: f64 = 1e-15;

#[derive(Clone)]
enum Node {
    Rotation(f64),
    Monotone(Arc<MonotoneLift>),
    /// `outer ∘ inner`
    Compose(CircleDiffeo, CircleDiffeo),
    Inverse(CircleDiffeo),
    /// `(1 − s)·L̂_a + s·L̂_b` with both lifts anchored at a common fixed point
    Convex {
        a: CircleDiffeo,
        b: CircleDiffeo,
        s: f64,
        shift_a: f64,
        shift_b: f64,
        anchor: f64,
    },
    Primitive(Arc<dyn LiftPrimitive>),
}

struct Inner {
    node: Node,
    offset: f64,
    table: OnceLock<Vec<f64>>,
}

#[derive(Clone)]
pub struct CircleDiffeo(Arc<Inner>);

impl CircleDiffeo {
    fn from_node(node: Node) -> CircleDiffeo {
        let mut inner = Inner {
            node,
            offset: 0.0,
            table: OnceLock::new(),
        };
        inner.offset = raw_lift(&inner.node, 0.0).floor();
        CircleDiffeo(Arc::new(inner))
    }

    pub fn identity() -> CircleDiffeo {
        CircleDiffeo::rotation(Angle::ZERO)
    }

    /// Lift `t ↦ t + φ`.
    pub fn rotation(phi: Angle) -> CircleDiffeo {
        CircleDiffeo::from_node(Node::Rotation(phi.value()))
    }

    pub fn monotone(mu: MonotoneLift) -> CircleDiffeo {
        if mu.n() == 1 {
            return CircleDiffeo::identity();
        }
        CircleDiffeo::from_node(Node::Monotone(Arc::new(mu)))
    }

    pub fn primitive(p: Arc<dyn LiftPrimitive>) -> CircleDiffeo {
        CircleDiffeo::from_node(Node::Primitive(p))
    }

    /// `self ∘ inner`. Cancels `g ∘ g⁻¹`, drops identities and merges rotations.
    pub fn compose(&self, inner: &CircleDiffeo) -> CircleDiffeo {
        if self.is_identity() {
            return inner.clone();
        }
        if inner.is_identity() {
            return self.clone();
        }
        if let (Node::Rotation(a), Node::Rotation(b)) = (&self.0.node, &inner.0.node) {
            return CircleDiffeo::rotation(Angle::wrap(a + b));
        }
        if let Node::Inverse(x) = &self.0.node {
            if Arc::ptr_eq(&x.0, &inner.0) {
                return CircleDiffeo::identity();
            }
        }
        if let Node::Inverse(x) = &inner.0.node {
            if Arc::ptr_eq(&x.0, &self.0) {
                return CircleDiffeo::identity();
            }
        }
        CircleDiffeo::from_node(Node::Compose(self.clone(), inner.clone()))
    }

    pub fn inverse(&self) -> CircleDiffeo {
        match &self.0.node {
            Node::Rotation(phi) => CircleDiffeo::rotation(Angle::wrap(-phi)),
            Node::Inverse(x) => x.clone(),
            _ => CircleDiffeo::from_node(Node::Inverse(self.clone())),
        }
    }

    /// Lift `(1 − s)·L̂_a + s·L̂_b`, where `L̂` is the lift fixing the lifted
    /// anchor point. Both maps must fix `anchor`.
    pub(crate) fn convex(a: &CircleDiffeo, b: &CircleDiffeo, s: f64, anchor: f64) -> CircleDiffeo {
        let shift_a = (a.lift(anchor) - anchor).round();
        let shift_b = (b.lift(anchor) - anchor).round();
        CircleDiffeo::from_node(Node::Convex {
            a: a.clone(),
            b: b.clone(),
            s,
            shift_a,
            shift_b,
            anchor,
        })
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.0.node, Node::Rotation(phi) if phi == 0.0)
    }

    /// Rotation angle when this is a bare rotation node.
    pub fn as_rotation(&self) -> Option<Angle> {
        match self.0.node {
            Node::Rotation(phi) => Some(Angle::wrap(phi)),
            _ => None,
        }
    }

    /// The lift `L` on ℝ, normalized by `L(0) ∈ [0, 1)`.
    #[inline]
    pub fn lift(&self, t: f64) -> f64 {
        raw_lift(&self.0.node, t) - self.0.offset
    }

    /// `L′(t)`; strictly positive for a well-formed expression.
    #[inline]
    pub fn derivative(&self, t: f64) -> f64 {
        raw_derivative(&self.0.node, t)
    }

    /// `L′(t)`, rejecting a non-positive or non-finite value.
    pub fn checked_derivative(&self, t: f64) -> Result<f64> {
        let d = self.derivative(t);
        if d > 0.0 && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonPositiveDerivative { t, value: d })
        }
    }

    /// The circle map.
    pub fn eval(&self, x: Angle) -> Angle {
        Angle::wrap(self.lift(x.value()))
    }

    /// `x` with `self(x) = y`.
    pub fn inverse_eval(&self, y: Angle) -> Result<Angle> {
        let t = self.solve_lift(y.value());
        if !t.is_finite() {
            return Err(Error::NoBracket(format!("inverse of {self:?} at {y}")));
        }
        Ok(Angle::wrap(t))
    }

    /// `L⁻¹(s)` on ℝ. Returns NaN if the lift cannot be bracketed.
    pub fn solve_lift(&self, s: f64) -> f64 {
        let l0 = self.lift(0.0);
        let k = (s - l0).floor();
        let target = s - k;
        let table = self.0.table.get_or_init(|| {
            (0..=TABLE_SIZE)
                .map(|i| self.lift(i as f64 / TABLE_SIZE as f64))
                .collect()
        });
        // table is increasing with table[0] = l0 ≤ target < l0 + 1 = table[N]
        let j = table.partition_point(|&v| v <= target).clamp(1, TABLE_SIZE);
        let lo = (j - 1) as f64 / TABLE_SIZE as f64;
        let hi = j as f64 / TABLE_SIZE as f64;
        if table[j - 1] == target {
            return lo + k;
        }
        let (tlo, thi) = (table[j - 1], table[j]);
        let guess = lo + (hi - lo) * (target - tlo) / (thi - tlo);
        let g = |t: f64| (self.lift(t) - target, self.derivative(t));
        // rounding can push the target an ulp past the tabulated bracket
        newton_bisect(g, lo, hi, Some(guess), SOLVE_TOL)
            .or_else(|_| solve_increasing(g, guess, SOLVE_TOL))
            .map_or(f64::NAN, |t| t + k)
    }

    /// JSON description of the constructor tree.
    pub fn provenance(&self) -> Value {
        match &self.0.node {
            Node::Rotation(phi) if *phi == 0.0 => json!({"identity": {}}),
            Node::Rotation(phi) => json!({"rotation": phi}),
            Node::Monotone(mu) => json!({
                "monotone_lift": {
                    "knots": mu.knots().coords(),
                    "intervals": mu.summary(),
                }
            }),
            Node::Compose(a, b) => json!({"compose": [a.provenance(), b.provenance()]}),
            Node::Inverse(a) => json!({"inverse": a.provenance()}),
            Node::Convex {
                a, b, s, anchor, ..
            } => json!({
                "convex_lift": {"s": s, "anchor": anchor, "from": a.provenance(), "to": b.provenance()}
            }),
            Node::Primitive(p) => p.describe(),
        }
    }

    /// `(t, L(t), L′(t))` at `t = i/resolution`, `i = 0..resolution`.
    pub fn sample_table(&self, resolution: usize) -> Vec<[f64; 3]> {
        (0..resolution)
            .map(|i| {
                let t = i as f64 / resolution as f64;
                [t, self.lift(t), self.derivative(t)]
            })
            .collect()
    }

    /// Largest circle distance between `self` and `other` on a uniform grid.
    pub fn grid_distance(&self, other: &CircleDiffeo, resolution: usize) -> f64 {
        (0..resolution)
            .map(|i| {
                let x = Angle::wrap(i as f64 / resolution as f64);
                self.eval(x).distance(other.eval(x))
            })
            .fold(0.0, f64::max)
    }
}

fn raw_lift(node: &Node, t: f64) -> f64 {
    match node {
        Node::Rotation(phi) => t + phi,
        Node::Monotone(mu) => mu.periodic_value(t),
        Node::Compose(a, b) => a.lift(b.lift(t)),
        Node::Inverse(a) => a.solve_lift(t),
        Node::Convex {
            a,
            b,
            s,
            shift_a,
            shift_b,
            anchor: _,
        } => (1.0 - s) * (a.lift(t) - shift_a) + s * (b.lift(t) - shift_b),
        Node::Primitive(p) => p.lift(t),
    }
}

fn raw_derivative(node: &Node, t: f64) -> f64 {
    match node {
        Node::Rotation(_) => 1.0,
        Node::Monotone(mu) => mu.periodic_derivative(t),
        Node::Compose(a, b) => a.derivative(b.lift(t)) * b.derivative(t),
        Node::Inverse(a) => 1.0 / a.derivative(a.solve_lift(t)),
        Node::Convex { a, b, s, .. } => (1.0 - s) * a.derivative(t) + s * b.derivative(t),
        Node::Primitive(p) => p.derivative(t),
    }
}

impl fmt::Debug for CircleDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CircleDiffeo({})", self.provenance())
    }
}
