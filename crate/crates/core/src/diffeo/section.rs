//! The section of the evaluation map `P: D₊(S¹) → F` and the contraction of
//! the subgroup fixing the marked points `a/n`.

use crate::circle::Angle;
use crate::config::{h_chart, Configuration, SimplexPoint};
use crate::error::{Error, Result};

use super::{mu_build, CircleDiffeo};

/// Tolerance for "fixes" and "permutes" tests on marked points.
pub const MARKED_TOL: f64 = 1e-10;

/// `g ∈ D₊(S¹)` with `g(a/n) = target_a`: a rotation after μ.
pub fn interpolating_diffeo(target: &Configuration) -> Result<CircleDiffeo> {
    let (x0, simplex) = h_chart(target)?;
    let rot = CircleDiffeo::rotation(x0);
    if simplex.max_distance(&SimplexPoint::base(target.len())) <= 1e-15 {
        return Ok(rot);
    }
    Ok(rot.compose(&CircleDiffeo::monotone(mu_build(&simplex)?)))
}

/// `P(g) = (g(0), g(1/n), …, g((n−1)/n))`.
pub fn evaluation_map(g: &CircleDiffeo, n: usize) -> Configuration {
    let pts = (0..n)
        .map(|a| g.eval(Angle::wrap(a as f64 / n as f64)))
        .collect();
    Configuration::new(pts).expect("a diffeomorphism is injective")
}

fn marked(n: usize) -> Vec<Angle> {
    (0..n).map(|a| Angle::wrap(a as f64 / n as f64)).collect()
}

/// True iff `g` fixes each of `values` to within `tol`.
pub fn fixes_values(g: &CircleDiffeo, values: &[Angle], tol: f64) -> bool {
    values.iter().all(|&v| g.eval(v).distance(v) <= tol)
}

/// The `l` with `g(v_a) = v_{a+l}` for all `a`, if any.
pub fn permutation_shift(g: &CircleDiffeo, values: &[Angle], tol: f64) -> Option<usize> {
    let n = values.len();
    if n == 0 {
        return Some(0);
    }
    let image = g.eval(values[0]);
    let l = (0..n).find(|&l| image.distance(values[l]) <= tol)?;
    (0..n)
        .all(|a| g.eval(values[a]).distance(values[(a + l) % n]) <= tol)
        .then_some(l)
}

/// True iff `g(a/n) = a/n` for all `a`.
pub fn fixes_exceptional(g: &CircleDiffeo, n: usize) -> bool {
    fixes_values(g, &marked(n), MARKED_TOL)
}

/// The `l ∈ ℤ_n` with `g(a/n) = (a + l)/n`, if any.
pub fn permutes_exceptional(g: &CircleDiffeo, n: usize) -> Option<usize> {
    permutation_shift(g, &marked(n), MARKED_TOL)
}

/// Straight-line homotopy of lifts from `g` (at `s = 0`) to the identity
/// (at `s = 1`) through maps fixing every `a/n`.
pub fn contract_toward_identity(g: &CircleDiffeo, s: f64, n: usize) -> Result<CircleDiffeo> {
    contract_fixing(g, &marked(n), s)
}

/// [`contract_toward_identity`] for an arbitrary fixed set `values`.
pub fn contract_fixing(g: &CircleDiffeo, values: &[Angle], s: f64) -> Result<CircleDiffeo> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "contraction parameter {s} outside [0, 1]"
        )));
    }
    if !fixes_values(g, values, MARKED_TOL) {
        return Err(Error::NotInDcr(format!("{g:?}")));
    }
    if s == 0.0 {
        return Ok(g.clone());
    }
    if s == 1.0 || g.is_identity() {
        return Ok(CircleDiffeo::identity());
    }
    let anchor = values.first().map_or(0.0, |v| v.value());
    Ok(CircleDiffeo::convex(
        g,
        &CircleDiffeo::identity(),
        s,
        anchor,
    ))
}
