//! Elements `(h_M, R)` of the stabilizer of a map, the section
//! `R ↦ (difShift(R), R)`, and paths to periodic representatives.

use crate::circle::Angle;
use crate::diffeo::{contract_fixing, fixes_values, permutation_shift, CircleDiffeo};
use crate::error::{Error, Result};
use crate::maps::{CircleMap, MapAnalysis, RESIDUAL_GRID};

use super::dif_shift;

const PERMUTE_TOL: f64 = 1e-10;

/// A pair with `R ∘ f = f ∘ h_M`, up to the measured residual.
#[derive(Clone, Debug)]
pub struct StabilizerElement {
    pub h_m: CircleDiffeo,
    pub r: CircleDiffeo,
    pub residual: f64,
}

/// `sup_x d(R(f(x)), f(h(x)))` on a uniform grid.
pub fn stabilizer_residual(
    f: &dyn CircleMap,
    h: &CircleDiffeo,
    r: &CircleDiffeo,
    grid: usize,
) -> f64 {
    (0..grid)
        .map(|i| {
            let x = Angle::wrap(i as f64 / grid as f64);
            r.eval(f.eval(x)).distance(f.eval(h.eval(x)))
        })
        .fold(0.0, f64::max)
}

impl StabilizerElement {
    /// Pairs `h` and `r`, measuring the residual against `f`.
    pub fn new(f: &dyn CircleMap, h_m: CircleDiffeo, r: CircleDiffeo) -> StabilizerElement {
        let residual = stabilizer_residual(f, &h_m, &r, RESIDUAL_GRID);
        StabilizerElement { h_m, r, residual }
    }

    pub fn identity() -> StabilizerElement {
        StabilizerElement {
            h_m: CircleDiffeo::identity(),
            r: CircleDiffeo::identity(),
            residual: 0.0,
        }
    }

    /// `(h₁ ∘ h₂, R₁ ∘ R₂)`.
    pub fn compose(&self, other: &StabilizerElement, f: &dyn CircleMap) -> StabilizerElement {
        StabilizerElement::new(f, self.h_m.compose(&other.h_m), self.r.compose(&other.r))
    }
}

/// `σ(R) = (difShift(R), R)`.
pub fn stabilizer_section(analysis: &MapAnalysis, r: &CircleDiffeo) -> Result<StabilizerElement> {
    let h = dif_shift(analysis, r)?;
    Ok(StabilizerElement::new(
        analysis.map().as_ref(),
        h,
        r.clone(),
    ))
}

/// A path in the stabilizer from `(h̄_M, R̄)` with `R̄` a rotation (`t = 0`)
/// to the given element (`t = 1`).
#[derive(Clone, Debug)]
pub struct PeriodicPath {
    pub shift: usize,
    pub r_bar: CircleDiffeo,
    /// Order of `R̄`, `n / gcd(l, n)`.
    pub period: usize,
    pub samples: Vec<(f64, StabilizerElement)>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Deforms `element` through the stabilizer to a pair whose value part is
/// the rotation `R̄ = rotation(l/n)` permuting the values as `R` does.
pub fn path_to_periodic(
    analysis: &MapAnalysis,
    element: &StabilizerElement,
    steps: usize,
) -> Result<PeriodicPath> {
    let n = analysis.n();
    if n == 0 {
        return Err(Error::NoExceptionalValues);
    }
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "path needs at least one step".into(),
        ));
    }
    let values = analysis.values();
    let l = permutation_shift(&element.r, values, PERMUTE_TOL).ok_or(Error::DoesNotPermute)?;
    let r_bar = CircleDiffeo::rotation(Angle::wrap(l as f64 / n as f64));
    let q = r_bar.compose(&element.r.inverse());
    if !fixes_values(&q, values, PERMUTE_TOL) {
        return Err(Error::NotNormalized);
    }
    let f = analysis.map().as_ref();
    let mut samples = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let t = j as f64 / steps as f64;
        let sample = if j == steps {
            element.clone()
        } else {
            let r_t = contract_fixing(&q, values, t)?;
            let h = dif_shift(analysis, &r_t)?.compose(&element.h_m);
            let r = if j == 0 {
                r_bar.clone()
            } else {
                r_t.compose(&element.r)
            };
            StabilizerElement::new(f, h, r)
        };
        samples.push((t, sample));
    }
    Ok(PeriodicPath {
        shift: l,
        r_bar,
        period: n / gcd(l, n),
        samples,
    })
}
