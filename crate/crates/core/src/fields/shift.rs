//! Flow times `λ′`, `λ` of a value diffeomorphism and the lift `difShift(R)`
//! with `R ∘ f = f ∘ difShift(R)`.

use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::circle::Angle;
use crate::diffeo::{fixes_values, CircleDiffeo, LiftPrimitive};
use crate::error::{Error, Result};
use crate::maps::{invert_covering, CircleMap, MapAnalysis};
use crate::numeric::roots::newton_bisect;

use super::{value_arc, LocalFields};

const FIX_TOL: f64 = 1e-10;
const LEVEL_TOL: f64 = 1e-13;
const CRITICAL_WINDOW: f64 = 1e-6;

/// Flow times carrying `f(x)` to `R(f(x))`: `regular` along `G_a` (unit
/// speed) and `exceptional` along `F_a` inside `N_a` (exponential speed).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftTimes {
    pub regular: Option<f64>,
    pub exceptional: Option<f64>,
    /// Index of the arc `B_a` containing `x`.
    pub arc: usize,
    /// Index of the level whose `N_b` contains `x`, if any. `exceptional`
    /// is set only when the `F_b` trajectory stays in `N_b`, i.e. `R(f(x))`
    /// is also within the patch radius of `p_b`.
    pub level: Option<usize>,
}

fn require_dcr(analysis: &MapAnalysis, r: &CircleDiffeo) -> Result<()> {
    if fixes_values(r, analysis.values(), FIX_TOL) {
        Ok(())
    } else {
        Err(Error::NotInDcr(format!("{r:?}")))
    }
}

/// `λ′(x)` and `λ(x)` for `R` fixing every exceptional value.
pub fn shift_times(analysis: &MapAnalysis, r: &CircleDiffeo, x: Angle) -> Result<ShiftTimes> {
    if analysis.n() == 0 {
        return Err(Error::NoExceptionalValues);
    }
    require_dcr(analysis, r)?;
    let values = analysis.values();
    let v = analysis.map().eval(x);
    if values.iter().any(|p| p.distance(v) <= LEVEL_TOL) {
        return Err(Error::OnExceptionalLevel(x.value()));
    }
    let (a, u) = value_arc(values, v);
    let rv = r.eval(v);
    let regular = rv.offset_from(values[a]) - u;
    let fields = LocalFields::new(analysis)?;
    let level = (0..values.len()).find(|&b| v.distance(values[b]) < fields.radius());
    let exceptional = level
        .filter(|&b| rv.distance(values[b]) < fields.radius())
        .map(|b| (rv.sub(values[b]) / v.sub(values[b])).ln());
    Ok(ShiftTimes {
        regular: Some(regular),
        exceptional,
        arc: a,
        level,
    })
}

/// A maximal interval of `M ∖ ∪E_a`, where `f` is monotone.
#[derive(Clone, Copy, Debug)]
struct Component {
    start: f64,
    end: f64,
    lift_start: f64,
    lift_end: f64,
    start_critical: bool,
    end_critical: bool,
}

/// `difShift(R)` on a map with exceptional values, built componentwise as
/// `(f|_C)⁻¹ ∘ R̂ ∘ f|_C`.
struct DifShift {
    f: Arc<dyn CircleMap>,
    r: CircleDiffeo,
    components: Vec<Component>,
}

impl DifShift {
    fn new(analysis: &MapAnalysis, r: CircleDiffeo) -> DifShift {
        let pts = analysis.exceptional_points();
        let f = analysis.map().clone();
        let m = pts.len();
        let components = (0..m)
            .map(|j| {
                let start = pts[j].t.value();
                let end = if j + 1 < m {
                    pts[j + 1].t.value()
                } else {
                    pts[0].t.value() + 1.0
                };
                Component {
                    start,
                    end,
                    lift_start: f.lift(start),
                    lift_end: f.lift(end),
                    start_critical: pts[j].critical,
                    end_critical: pts[(j + 1) % m].critical,
                }
            })
            .collect();
        DifShift { f, r, components }
    }

    /// Component index, the reduced point `τ` and its integer shift.
    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let first = self.components[0].start;
        let k = (t - first).floor();
        let tau = t - k;
        let j = self
            .components
            .partition_point(|c| c.start <= tau)
            .saturating_sub(1);
        (j, tau, k)
    }

    /// `R̂`: the lift of `R` fixing the lifted value `anchor`.
    fn r_hat(&self, anchor: f64, y: f64) -> f64 {
        self.r.lift(y) - (self.r.lift(anchor) - anchor).round()
    }

    fn image(&self, c: &Component, tau: f64) -> f64 {
        if tau == c.start {
            return tau;
        }
        let y = self.r_hat(c.lift_start, self.f.lift(tau));
        let (lo, hi) = if c.lift_end > c.lift_start {
            (c.lift_start, c.lift_end)
        } else {
            (c.lift_end, c.lift_start)
        };
        let y = y.clamp(lo, hi);
        if y == c.lift_start {
            return c.start;
        }
        if y == c.lift_end {
            return c.end;
        }
        let sign = if c.lift_end > c.lift_start { 1.0 } else { -1.0 };
        let guess = c.start + (c.end - c.start) * (y - c.lift_start) / (c.lift_end - c.lift_start);
        newton_bisect(
            |s| {
                (
                    sign * (self.f.lift(s) - y),
                    sign * self.f.lift_derivative(s),
                )
            },
            c.start,
            c.end,
            Some(guess),
            1e-15,
        )
        .unwrap_or(f64::NAN)
    }
}

impl LiftPrimitive for DifShift {
    fn lift(&self, t: f64) -> f64 {
        let (j, tau, k) = self.locate(t);
        self.image(&self.components[j], tau) + k
    }

    fn derivative(&self, t: f64) -> f64 {
        let (j, tau, _) = self.locate(t);
        let c = &self.components[j];
        // at a critical endpoint the conjugate of R scales distances by √R′
        if c.start_critical && tau - c.start <= CRITICAL_WINDOW {
            return self.r.derivative(c.lift_start).sqrt();
        }
        if c.end_critical && c.end - tau <= CRITICAL_WINDOW {
            return self.r.derivative(c.lift_end).sqrt();
        }
        let x = self.image(c, tau);
        self.r.derivative(self.f.lift(tau)) * self.f.lift_derivative(tau)
            / self.f.lift_derivative(x)
    }

    fn describe(&self) -> Value {
        json!({"dif_shift": {"components": self.components.len(), "target": self.r.provenance()}})
    }
}

/// `L_f⁻¹ ∘ R ∘ L_f` for a covering `f` (no exceptional values).
struct CoveringShift {
    f: Arc<dyn CircleMap>,
    r: CircleDiffeo,
}

impl LiftPrimitive for CoveringShift {
    fn lift(&self, t: f64) -> f64 {
        invert_covering(self.f.as_ref(), self.r.lift(self.f.lift(t))).unwrap_or(f64::NAN)
    }

    fn derivative(&self, t: f64) -> f64 {
        let x = self.lift(t);
        self.r.derivative(self.f.lift(t)) * self.f.lift_derivative(t) / self.f.lift_derivative(x)
    }

    fn describe(&self) -> Value {
        json!({"dif_shift": {"covering_degree": self.f.degree(), "target": self.r.provenance()}})
    }
}

/// The domain diffeomorphism `h` with `R ∘ f = f ∘ h` fixing every point of
/// every exceptional level.
pub fn dif_shift(analysis: &MapAnalysis, r: &CircleDiffeo) -> Result<CircleDiffeo> {
    if analysis.n() == 0 {
        if analysis.degree() == 0 {
            return Err(Error::InvalidParameter(
                "degree-zero map without critical points".into(),
            ));
        }
        if r.is_identity() {
            return Ok(CircleDiffeo::identity());
        }
        return Ok(CircleDiffeo::primitive(Arc::new(CoveringShift {
            f: analysis.map().clone(),
            r: r.clone(),
        })));
    }
    require_dcr(analysis, r)?;
    if r.is_identity() {
        return Ok(CircleDiffeo::identity());
    }
    Ok(CircleDiffeo::primitive(Arc::new(DifShift::new(
        analysis,
        r.clone(),
    ))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimplexPoint;
    use crate::diffeo::{contract_toward_identity, mu_build};
    use crate::maps::{analyze, conjugacy_residual, normalize_exceptional, CircleValuedMap};

    fn fourier(degree: i64, sin: &[f64]) -> Arc<dyn CircleMap> {
        Arc::new(CircleValuedMap::new(degree, 0.0, vec![], sin.to_vec()).unwrap())
    }

    fn dcr(q1: f64, q3: f64, s: f64) -> CircleDiffeo {
        let g = CircleDiffeo::monotone(
            mu_build(&SimplexPoint::new(vec![q1, 0.5, q3]).unwrap()).unwrap(),
        );
        contract_toward_identity(&g, s, 2).unwrap()
    }

    /// Residual measured through the circle values only.
    fn residual(a: &MapAnalysis, r: &CircleDiffeo, h: &CircleDiffeo) -> f64 {
        (0..2048)
            .map(|i| {
                let x = Angle::wrap(i as f64 / 2048.0);
                r.eval(a.map().eval(x)).distance(a.map().eval(h.eval(x)))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_gives_identity() {
        let a = normalize_exceptional(fourier(1, &[0.3])).unwrap().1;
        assert!(dif_shift(&a, &CircleDiffeo::identity())
            .unwrap()
            .is_identity());
        let t = shift_times(&a, &CircleDiffeo::identity(), Angle::wrap(0.1)).unwrap();
        assert_eq!(t.regular, Some(0.0));
        assert!(t.exceptional.is_none_or(|l| l == 0.0));
    }

    #[test]
    fn covering_rotation_halves() {
        let a = analyze(fourier(2, &[])).unwrap();
        let r = CircleDiffeo::rotation(Angle::wrap(0.3));
        let h = dif_shift(&a, &r).unwrap();
        assert!(h.grid_distance(&CircleDiffeo::rotation(Angle::wrap(0.15)), 256) < 1e-12);
    }

    #[test]
    fn conjugacy_and_fixed_levels() {
        let a = normalize_exceptional(fourier(1, &[0.3])).unwrap().1;
        let r = dcr(0.1, 0.8, 0.3);
        let h = dif_shift(&a, &r).unwrap();
        assert!(residual(&a, &r, &h) <= 1e-8);
        for p in a.exceptional_points() {
            assert_eq!(h.eval(p.t), p.t);
        }
        for i in 0..1000 {
            assert!(h.derivative(i as f64 / 1000.0) > 0.0);
        }
        let rf: Arc<dyn CircleMap> = Arc::new(crate::maps::ComposedMap::new(
            a.map().clone(),
            r.clone(),
            CircleDiffeo::identity(),
        ));
        assert!(conjugacy_residual(a.map().as_ref(), rf.as_ref(), &h, 2048) <= 1e-8);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let a = normalize_exceptional(fourier(1, &[0.3])).unwrap().1;
        let h = dif_shift(&a, &dcr(0.2, 0.7, 0.0)).unwrap();
        for i in 1..200 {
            let t = i as f64 / 200.0 + 1e-3;
            // h is only resolved to about √ε at a fold of f; keep the quotient away
            if a.critical_points()
                .iter()
                .any(|c| c.t.distance(Angle::wrap(t)) < 1e-4)
            {
                continue;
            }
            let fd = (h.lift(t + 1e-6) - h.lift(t - 1e-6)) / 2e-6;
            assert!(
                (fd - h.derivative(t)).abs() < 1e-4 * fd.max(1.0),
                "t = {t}: {fd} vs {}",
                h.derivative(t)
            );
        }
    }

    #[test]
    fn rejects_non_dcr() {
        let a = normalize_exceptional(fourier(1, &[0.3])).unwrap().1;
        let r = CircleDiffeo::rotation(Angle::wrap(0.1));
        assert!(matches!(dif_shift(&a, &r), Err(Error::NotInDcr(_))));
        assert!(matches!(
            shift_times(&a, &r, Angle::wrap(0.2)),
            Err(Error::NotInDcr(_))
        ));
    }

    #[test]
    fn shift_time_signs_and_level_error() {
        let a = normalize_exceptional(fourier(1, &[0.3])).unwrap().1;
        // contraction toward 0 on the values near 0: R(v) = v/2 near 0 in offset
        let r = dcr(0.05, 0.5 + 0.25, 0.0);
        let c = a.critical_points().iter().find(|c| c.level == 0).unwrap();
        let x = c.t.rotate(0.01);
        let t = shift_times(&a, &r, x).unwrap();
        let lambda = t.exceptional.unwrap();
        let v = a.map().eval(x);
        let rv = r.eval(v);
        assert_eq!(
            lambda < 0.0,
            rv.distance(a.values()[0]) < v.distance(a.values()[0])
        );
        assert!(matches!(
            shift_times(&a, &r, c.t),
            Err(Error::OnExceptionalLevel(_))
        ));
    }
}
