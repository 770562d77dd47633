//! Vector fields compatible with a circle map, and their flows.
//!
//! With `v = f(x)` the value dynamics of a field `V` is `v′ = df(V) = L′·V`.
//! The regular field `G_a = 1/L′` moves values at unit speed; the exceptional
//! field `F_a = angle_sub(f, p_a)/L′` moves them exponentially away from `p_a`.

mod shift;
mod stabilizer;

use serde::Serialize;

use crate::circle::{Angle, CircleArc};
use crate::error::{Error, Result};
use crate::maps::MapAnalysis;
use crate::numeric::bump::smooth_step;
use crate::numeric::ode;

pub use shift::{dif_shift, shift_times, ShiftTimes};
pub use stabilizer::{
    path_to_periodic, stabilizer_residual, stabilizer_section, PeriodicPath, StabilizerElement,
};

/// Default local tolerance of the flow integrator.
pub const FLOW_TOL: f64 = 1e-9;
/// Below this distance from a critical point `F_a` is evaluated by its limit.
const SINGULAR_WINDOW: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LevelClass {
    Attractive,
    Reflective,
}

/// Open arc `(p_a, p_{a+1})` of values containing `v`, with `v − p_a` in turns.
fn value_arc(values: &[Angle], v: Angle) -> (usize, f64) {
    let p0 = values[0];
    let u = v.offset_from(p0);
    let a = values
        .partition_point(|p| p.offset_from(p0) <= u)
        .saturating_sub(1);
    (a, v.offset_from(values[a]))
}

/// Length of the value arc from `p_a` to `p_{a+1}`.
fn arc_length(values: &[Angle], a: usize) -> f64 {
    if values.len() == 1 {
        1.0
    } else {
        values[(a + 1) % values.len()].offset_from(values[a])
    }
}

/// The patches `G_a` on `B_a` and `F_a` on `N_a`.
#[derive(Clone, Debug)]
pub struct LocalFields {
    analysis: MapAnalysis,
    radius: f64,
}

impl LocalFields {
    pub fn new(analysis: &MapAnalysis) -> Result<LocalFields> {
        let n = analysis.n();
        if n == 0 {
            return Err(Error::NoExceptionalValues);
        }
        let values = analysis.values();
        let min_gap = (0..n).map(|a| arc_length(values, a)).fold(1.0, f64::min);
        Ok(LocalFields {
            analysis: analysis.clone(),
            radius: min_gap / 4.0,
        })
    }

    pub fn analysis(&self) -> &MapAnalysis {
        &self.analysis
    }

    /// Value-space radius of the neighbourhoods `N_a`; `1/(4n)` when normalized.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n(&self) -> usize {
        self.analysis.n()
    }

    /// The value arc `(p_a, p_{a+1})` whose preimage is `B_a`.
    pub fn arc(&self, a: usize) -> CircleArc {
        let values = self.analysis.values();
        if values.len() == 1 {
            CircleArc::punctured(values[0])
        } else {
            CircleArc::new(values[a], values[(a + 1) % values.len()]).expect("values are distinct")
        }
    }

    pub fn in_regular_patch(&self, a: usize, x: f64) -> bool {
        self.arc(a)
            .contains(self.analysis.map().eval(Angle::wrap(x)))
    }

    pub fn in_exceptional_patch(&self, a: usize, x: f64) -> bool {
        let v = self.analysis.map().eval(Angle::wrap(x));
        v.distance(self.analysis.values()[a]) < self.radius
    }

    /// `G_a(x) = 1/L′(x)` on `B_a`.
    pub fn regular(&self, a: usize, x: f64) -> Result<f64> {
        if !self.in_regular_patch(a, x) {
            return Err(Error::OutsidePatch {
                patch: format!("B{a}"),
                x,
            });
        }
        Ok(1.0 / self.analysis.map().lift_derivative(x))
    }

    /// `F_a(x) = angle_sub(f(x), p_a)/L′(x)` on `N_a`, equal to `(x − c)/2`
    /// at a Morse critical point `c`.
    pub fn exceptional(&self, a: usize, x: f64) -> Result<f64> {
        if !self.in_exceptional_patch(a, x) {
            return Err(Error::OutsidePatch {
                patch: format!("N{a}"),
                x,
            });
        }
        Ok(exceptional_quotient(&self.analysis, a, x))
    }

    /// `x′ = G_a(x)` for time `t`.
    pub fn flow_regular(&self, a: usize, x: Angle, t: f64, tol: f64) -> Result<Angle> {
        flow_integrate(|y| self.regular(a, y), x, t, tol)
    }

    /// `x′ = F_a(x)` for time `t`.
    pub fn flow_exceptional(&self, a: usize, x: Angle, t: f64, tol: f64) -> Result<Angle> {
        flow_integrate(|y| self.exceptional(a, y), x, t, tol)
    }
}

fn exceptional_quotient(analysis: &MapAnalysis, a: usize, x: f64) -> f64 {
    let xa = Angle::wrap(x);
    for c in analysis.critical_points().iter().filter(|c| c.level == a) {
        let dx = xa.sub(c.t);
        if dx.abs() <= SINGULAR_WINDOW {
            return 0.5 * dx;
        }
    }
    let f = analysis.map();
    f.eval(xa).sub(analysis.values()[a]) / f.lift_derivative(x)
}

#[derive(Clone, Debug)]
enum Assembly {
    /// `n = 0`: `V = 1/L′`
    Covering,
    /// `n` even: sign `(−1)^a` on the arc starting at `p_a`
    Alternating { radius: f64 },
}

/// A global field satisfying both compatibility conditions.
#[derive(Clone, Debug)]
pub struct CompatibleField {
    analysis: MapAnalysis,
    assembly: Assembly,
}

/// One row of a field table.
#[derive(Clone, Debug, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub v: f64,
    pub df: f64,
    pub patch: String,
    pub weight: f64,
}

fn sign(a: usize) -> f64 {
    if a.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Global compatible field; fails with [`Error::ParityObstruction`] for odd `n`.
pub fn global_field(analysis: &MapAnalysis) -> Result<CompatibleField> {
    let n = analysis.n();
    let assembly = if n == 0 {
        Assembly::Covering
    } else if n % 2 == 1 {
        return Err(Error::ParityObstruction { n });
    } else {
        Assembly::Alternating {
            radius: LocalFields::new(analysis)?.radius(),
        }
    };
    Ok(CompatibleField {
        analysis: analysis.clone(),
        assembly,
    })
}

impl CompatibleField {
    pub fn analysis(&self) -> &MapAnalysis {
        &self.analysis
    }

    /// `ε_a = −1` levels attract, `ε_a = +1` levels reflect.
    pub fn level_classes(&self) -> Vec<LevelClass> {
        (0..self.analysis.n())
            .map(|a| {
                if sign(a) < 0.0 {
                    LevelClass::Attractive
                } else {
                    LevelClass::Reflective
                }
            })
            .collect()
    }

    /// `ε_a` per level.
    pub fn signs(&self) -> Vec<f64> {
        (0..self.analysis.n()).map(sign).collect()
    }

    /// Value speed `w(v)`, the weight of the unit-speed part, and the patch label.
    fn value_speed(&self, v: Angle) -> (f64, f64, String) {
        match self.assembly {
            Assembly::Covering => (1.0, 1.0, "G".into()),
            Assembly::Alternating { radius } => {
                let values = self.analysis.values();
                let (a, u) = value_arc(values, v);
                let len = arc_length(values, a);
                let eps = sign(a);
                let (dist, near) = if u <= 0.5 * len {
                    (u, a)
                } else {
                    (len - u, (a + 1) % values.len())
                };
                if dist < radius {
                    return (eps * dist, 0.0, format!("N{near}"));
                }
                let weight = smooth_step((dist - radius) / radius);
                (
                    eps * ((1.0 - weight) * dist + weight),
                    weight,
                    format!("B{a}"),
                )
            }
        }
    }

    /// `V(x)`.
    pub fn value(&self, x: f64) -> f64 {
        let f = self.analysis.map();
        match self.assembly {
            Assembly::Covering => 1.0 / f.lift_derivative(x),
            Assembly::Alternating { radius } => {
                let v = f.eval(Angle::wrap(x));
                let (a, u) = value_arc(self.analysis.values(), v);
                let len = arc_length(self.analysis.values(), a);
                let near = if u <= 0.5 * len {
                    a
                } else {
                    (a + 1) % self.analysis.n()
                };
                if v.distance(self.analysis.values()[near]) < radius {
                    return sign(near) * exceptional_quotient(&self.analysis, near, x);
                }
                self.value_speed(v).0 / f.lift_derivative(x)
            }
        }
    }

    /// `df(V)(x)`, a function of `f(x)` alone.
    pub fn df(&self, x: f64) -> f64 {
        self.value_speed(self.analysis.map().eval(Angle::wrap(x))).0
    }

    pub fn sample(&self, x: f64) -> FieldSample {
        let (df, weight, patch) = self.value_speed(self.analysis.map().eval(Angle::wrap(x)));
        FieldSample {
            x,
            v: self.value(x),
            df,
            patch,
            weight,
        }
    }

    pub fn flow(&self, x: Angle, t: f64, tol: f64) -> Result<Angle> {
        flow_integrate(|y| Ok(self.value(y)), x, t, tol)
    }
}

/// `Ψ(x, t)` for `x′ = V(x)`, by adaptive Dormand–Prince integration.
pub fn flow_integrate<V>(field: V, x: Angle, t: f64, tol: f64) -> Result<Angle>
where
    V: Fn(f64) -> Result<f64>,
{
    ode::integrate(field, x.value(), t, tol).map(Angle::wrap)
}

/// The shift map `x ↦ Ψ(x, α(x))`.
pub fn shift_map<'a, V, A>(field: V, alpha: A, tol: f64) -> impl Fn(Angle) -> Result<Angle> + 'a
where
    V: Fn(f64) -> Result<f64> + Clone + 'a,
    A: Fn(Angle) -> f64 + 'a,
{
    move |x| flow_integrate(field.clone(), x, alpha(x), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{analyze, normalize_exceptional, CircleMap, CircleValuedMap};
    use std::sync::Arc;

    fn fourier(degree: i64, cos: &[f64], sin: &[f64]) -> Arc<dyn CircleMap> {
        Arc::new(CircleValuedMap::new(degree, 0.0, cos.to_vec(), sin.to_vec()).unwrap())
    }

    fn sine_analysis() -> MapAnalysis {
        normalize_exceptional(fourier(1, &[], &[0.3])).unwrap().1
    }

    #[test]
    fn regular_field_has_unit_speed() {
        let a = sine_analysis();
        let lf = LocalFields::new(&a).unwrap();
        assert!((lf.radius() - 0.125).abs() < 1e-9);
        let f = a.map();
        let mut hits = 0;
        for i in 0..512 {
            let x = i as f64 / 512.0;
            for arc in 0..2 {
                if let Ok(g) = lf.regular(arc, x) {
                    hits += 1;
                    assert!((f.lift_derivative(x) * g - 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(hits > 500);
    }

    #[test]
    fn exceptional_field_at_critical_point() {
        let a = sine_analysis();
        let lf = LocalFields::new(&a).unwrap();
        for c in a.critical_points() {
            let x = c.t.value();
            assert_eq!(lf.exceptional(c.level, x).unwrap(), 0.0);
            // derivative ½ from the Taylor quotient, measured outside the limit window
            let h = 1e-4;
            let d = (lf.exceptional(c.level, x + h).unwrap()
                - lf.exceptional(c.level, x - h).unwrap())
                / (2.0 * h);
            assert!((d - 0.5).abs() < 1e-3, "{d}");
        }
    }

    #[test]
    fn exceptional_field_matches_value_offset() {
        let a = sine_analysis();
        let lf = LocalFields::new(&a).unwrap();
        let f = a.map();
        for i in 0..2048 {
            let x = i as f64 / 2048.0;
            for level in 0..2 {
                if let Ok(v) = lf.exceptional(level, x) {
                    let target = f.eval(Angle::wrap(x)).sub(a.values()[level]);
                    let near_critical = a
                        .critical_points()
                        .iter()
                        .any(|c| c.t.distance(Angle::wrap(x)) <= 1e-6);
                    if !near_critical {
                        assert!((f.lift_derivative(x) * v - target).abs() < 1e-10);
                    }
                }
            }
        }
        let far = a
            .critical_points()
            .iter()
            .find(|c| c.level == 1)
            .unwrap()
            .t
            .value();
        assert!(matches!(
            lf.exceptional(0, far),
            Err(Error::OutsidePatch { .. })
        ));
    }

    #[test]
    fn covering_field() {
        let a = analyze(fourier(2, &[], &[])).unwrap();
        let v = global_field(&a).unwrap();
        assert_eq!(v.value(0.3), 0.5);
        assert_eq!(v.df(0.7), 1.0);
        // f(Ψ(x, t)) = f(x) + t in lifted values
        let x = Angle::wrap(0.1);
        let y = v.flow(x, 0.8, FLOW_TOL).unwrap();
        let moved = a.map().eval(y).sub(a.map().eval(x).rotate(0.8));
        assert!(moved.abs() < 1e-8);
    }

    #[test]
    fn even_field_alternates_and_audits() {
        let a = sine_analysis();
        let v = global_field(&a).unwrap();
        assert_eq!(
            v.level_classes(),
            vec![LevelClass::Reflective, LevelClass::Attractive]
        );
        let f = a.map();
        let r = 0.25 / a.n() as f64;
        for i in 0..2048 {
            let x = i as f64 / 2048.0;
            let val = f.eval(Angle::wrap(x));
            let df = v.df(x);
            let on_level = a.values().iter().any(|p| p.distance(val) < 1e-12);
            if !on_level {
                assert!(df != 0.0);
            }
            for (lvl, p) in a.values().iter().enumerate() {
                if val.distance(*p) < r {
                    assert!((df - sign(lvl) * val.sub(*p)).abs() <= 1e-9);
                }
            }
            // V and df agree away from critical points
            if a.critical_points()
                .iter()
                .all(|c| c.t.distance(Angle::wrap(x)) > 1e-3)
            {
                assert!((v.value(x) * f.lift_derivative(x) - df).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn odd_count_is_obstructed() {
        let a = normalize_exceptional(fourier(0, &[0.2, 0.15], &[]))
            .unwrap()
            .1;
        assert_eq!(a.n(), 3);
        assert!(matches!(
            global_field(&a),
            Err(Error::ParityObstruction { n: 3 })
        ));
    }

    #[test]
    fn flow_additivity() {
        let a = sine_analysis();
        let v = global_field(&a).unwrap();
        let x = Angle::wrap(0.05);
        let once = v.flow(x, 0.7, FLOW_TOL).unwrap();
        let twice = v
            .flow(v.flow(x, 0.3, FLOW_TOL).unwrap(), 0.4, FLOW_TOL)
            .unwrap();
        assert!(once.distance(twice) < 1e-7);
        assert_eq!(v.flow(x, 0.0, FLOW_TOL).unwrap(), x);
    }

    #[test]
    fn zero_shift_is_identity() {
        let a = sine_analysis();
        let v = global_field(&a).unwrap();
        let phi = shift_map(|y| Ok(v.value(y)), |_| 0.0, FLOW_TOL);
        assert_eq!(phi(Angle::wrap(0.42)).unwrap().value(), 0.42);
        // constant time on the covering shifts f-values by that time
        let cov = analyze(fourier(2, &[], &[])).unwrap();
        let g = global_field(&cov).unwrap();
        let phi = shift_map(|y| Ok(g.value(y)), |_| 0.3, FLOW_TOL);
        let x = Angle::wrap(0.2);
        let y = phi(x).unwrap();
        assert!(cov.map().eval(y).distance(cov.map().eval(x).rotate(0.3)) < 1e-9);
    }
}
