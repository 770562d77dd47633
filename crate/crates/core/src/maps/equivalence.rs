//! Right equivalence `g = f ∘ h` of Morse circle maps.

use serde_json::{json, Value};
use std::sync::Arc;

use crate::circle::Angle;
use crate::diffeo::{CircleDiffeo, LiftPrimitive};
use crate::error::{Error, Result};

use super::{cyclic_word, invert_covering, CircleMap, MapAnalysis, MERGE_TOL};

/// Grid on which conjugacy residuals are measured.
pub const RESIDUAL_GRID: usize = 2048;
/// Largest accepted residual `sup |f∘h − g|`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Width of the window around a critical point where the derivative of a
/// branch conjugacy is replaced by its limit.
const CRITICAL_WINDOW: f64 = 1e-6;

/// `sup_x d(f(h(x)), g(x))` on a uniform grid.
pub fn conjugacy_residual(
    f: &dyn CircleMap,
    g: &dyn CircleMap,
    h: &CircleDiffeo,
    grid: usize,
) -> f64 {
    (0..grid)
        .map(|i| {
            let x = Angle::wrap(i as f64 / grid as f64);
            f.eval(h.eval(x)).distance(g.eval(x))
        })
        .fold(0.0, f64::max)
}

/// `h` sending branch `i` of `g` onto branch `i + shift` of `f` with `f ∘ h = g`.
struct BranchConjugacy {
    f: MapAnalysis,
    g: MapAnalysis,
    shift: usize,
}

impl BranchConjugacy {
    /// `(x, i, j, τ, integer shift of x)` for the lifted point `t`.
    fn solve(&self, t: f64) -> (f64, usize, usize, f64, f64) {
        let m = self.g.branches().len();
        let (i, k) = self
            .g
            .locate_branch(t)
            .expect("maps with critical points have branches");
        let tau = t - k;
        let j = (i + self.shift) % m;
        let wrap = ((i + self.shift) / m) as f64;
        let gb = self.g.branches()[i];
        let fb = self.f.branches()[j];
        let y = self.g.map().lift(tau) - gb.lift_start + fb.lift_start;
        let x = self.f.branch_inverse(j, y).unwrap_or(f64::NAN);
        (x, i, j, tau, wrap + k)
    }
}

impl LiftPrimitive for BranchConjugacy {
    fn lift(&self, t: f64) -> f64 {
        let (x, _, _, _, shift) = self.solve(t);
        x + shift
    }

    fn derivative(&self, t: f64) -> f64 {
        let (x, i, j, tau, _) = self.solve(t);
        let gb = self.g.branches()[i];
        let fb = self.f.branches()[j];
        let (gmap, fmap) = (self.g.map(), self.f.map());
        // near a critical point L_g′/L_f′ is 0/0; use the limit √(L_g″/L_f″)
        if tau - gb.start <= CRITICAL_WINDOW {
            return (gmap.lift_second_derivative(gb.start) / fmap.lift_second_derivative(fb.start))
                .sqrt();
        }
        if gb.end - tau <= CRITICAL_WINDOW {
            return (gmap.lift_second_derivative(gb.end) / fmap.lift_second_derivative(fb.end))
                .sqrt();
        }
        gmap.lift_derivative(tau) / fmap.lift_derivative(x)
    }

    fn describe(&self) -> Value {
        json!({"branch_conjugacy": {"alignment": self.shift, "critical_points": self.g.critical_points().len()}})
    }
}

/// `L_f⁻¹ ∘ L_g` for coverings without critical points.
struct CoveringConjugacy {
    f: Arc<dyn CircleMap>,
    g: Arc<dyn CircleMap>,
}

impl LiftPrimitive for CoveringConjugacy {
    fn lift(&self, t: f64) -> f64 {
        invert_covering(self.f.as_ref(), self.g.lift(t)).unwrap_or(f64::NAN)
    }

    fn derivative(&self, t: f64) -> f64 {
        self.g.lift_derivative(t) / self.f.lift_derivative(self.lift(t))
    }

    fn describe(&self) -> Value {
        json!({"covering_conjugacy": {"degree": self.f.degree()}})
    }
}

fn accept(f: &MapAnalysis, g: &MapAnalysis, h: CircleDiffeo) -> Option<CircleDiffeo> {
    let r = conjugacy_residual(f.map().as_ref(), g.map().as_ref(), &h, RESIDUAL_GRID);
    (r <= RESIDUAL_TOL).then_some(h)
}

/// An orientation-preserving `h` with `g = f ∘ h`, if the cyclic words of
/// `f` and `g` match under some alignment.
pub fn right_equivalence(f: &MapAnalysis, g: &MapAnalysis) -> Result<Option<CircleDiffeo>> {
    if f.degree() != g.degree() {
        return Err(Error::DegreeMismatch {
            left: f.degree(),
            right: g.degree(),
        });
    }
    let m = f.critical_points().len();
    if m != g.critical_points().len() {
        return Ok(None);
    }
    if m == 0 {
        let h = CircleDiffeo::primitive(Arc::new(CoveringConjugacy {
            f: f.map().clone(),
            g: g.map().clone(),
        }));
        return Ok(accept(f, g, h));
    }
    let (wf, wg) = (cyclic_word(f)?, cyclic_word(g)?);
    for shift in 0..m {
        let aligned = (0..m).all(|i| {
            let (a, b) = (&wg.letters[i], &wf.letters[(i + shift) % m]);
            a.kind == b.kind
                && a.value.distance(b.value) <= MERGE_TOL
                && (a.increment - b.increment).abs() <= MERGE_TOL
        });
        if !aligned {
            continue;
        }
        let h = CircleDiffeo::primitive(Arc::new(BranchConjugacy {
            f: f.clone(),
            g: g.clone(),
            shift,
        }));
        if let Some(h) = accept(f, g, h) {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{analyze, CircleValuedMap, ComposedMap};

    fn fourier(degree: i64, cos: &[f64], sin: &[f64]) -> Arc<dyn CircleMap> {
        Arc::new(CircleValuedMap::new(degree, 0.0, cos.to_vec(), sin.to_vec()).unwrap())
    }

    fn precomposed(f: &Arc<dyn CircleMap>, phi: f64) -> Arc<dyn CircleMap> {
        Arc::new(ComposedMap::new(
            f.clone(),
            CircleDiffeo::identity(),
            CircleDiffeo::rotation(Angle::wrap(-phi)),
        ))
    }

    #[test]
    fn self_equivalence_is_identity() {
        let f = analyze(fourier(1, &[], &[0.3])).unwrap();
        let h = right_equivalence(&f, &f).unwrap().unwrap();
        assert!(h.grid_distance(&CircleDiffeo::identity(), 512) < 1e-12);
    }

    #[test]
    fn recovers_rotation() {
        let base = fourier(1, &[0.05], &[0.3]);
        let f = analyze(base.clone()).unwrap();
        let g = analyze(precomposed(&base, 0.37)).unwrap();
        let h = right_equivalence(&f, &g).unwrap().unwrap();
        let rot = CircleDiffeo::rotation(Angle::wrap(0.37));
        assert!(h.grid_distance(&rot, 512) < 1e-8);
        for i in 0..512 {
            assert!(h.derivative(i as f64 / 512.0) > 0.0);
        }
        // critical points of g go to critical points of f
        for c in g.critical_points() {
            let image = h.eval(c.t);
            assert!(f
                .critical_points()
                .iter()
                .any(|d| d.t.distance(image) < 1e-8));
        }
    }

    #[test]
    fn recovers_nonlinear_conjugacy() {
        let base = fourier(1, &[], &[0.3]);
        let f = analyze(base.clone()).unwrap();
        let w = fourier(1, &[], &[0.05]);
        let hw = CircleDiffeo::primitive(Arc::new(CoveringConjugacy {
            f: fourier(1, &[], &[]),
            g: w,
        }));
        let g_map: Arc<dyn CircleMap> = Arc::new(ComposedMap::new(
            base,
            CircleDiffeo::identity(),
            hw.inverse(),
        ));
        let g = analyze(g_map).unwrap();
        let h = right_equivalence(&f, &g).unwrap().unwrap();
        assert!(h.grid_distance(&hw, 512) < 1e-8);
    }

    #[test]
    fn different_values_not_equivalent() {
        let f = analyze(fourier(1, &[], &[0.3])).unwrap();
        let g = analyze(fourier(1, &[], &[0.25])).unwrap();
        assert!(right_equivalence(&f, &g).unwrap().is_none());
        let two = analyze(fourier(2, &[], &[])).unwrap();
        assert!(matches!(
            right_equivalence(&f, &two),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn coverings_are_equivalent() {
        let f = analyze(fourier(2, &[], &[])).unwrap();
        let g = analyze(fourier(2, &[0.02], &[0.03])).unwrap();
        let h = right_equivalence(&f, &g).unwrap().unwrap();
        assert!(conjugacy_residual(f.map().as_ref(), g.map().as_ref(), &h, 256) < 1e-12);
    }
}
