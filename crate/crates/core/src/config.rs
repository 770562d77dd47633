//! The configuration space Fₙ(S¹) of n distinct ordered points, its base
//! component F, the chart `F ≅ S¹ × Δ`, and the cyclic ℤₙ action.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::circle::{angle_sub, Angle};
use crate::error::{Error, Result};

/// An ordered tuple of pairwise distinct points of S¹.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Angle>", into = "Vec<Angle>")]
pub struct Configuration {
    points: Vec<Angle>,
}

impl Configuration {
    pub fn new(points: Vec<Angle>) -> Result<Configuration> {
        if points.is_empty() {
            return Err(Error::InvalidConfiguration("empty configuration".into()));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::CoincidentPoints(
                        points[i].value(),
                        points[j].value(),
                    ));
                }
            }
        }
        Ok(Configuration { points })
    }

    pub fn from_turns(turns: &[f64]) -> Result<Configuration> {
        let pts = turns
            .iter()
            .map(|&t| Angle::new(t))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(pts)
    }

    /// The base point `(0, 1/n, …, (n−1)/n)`.
    pub fn base(n: usize) -> Configuration {
        assert!(n >= 1);
        Configuration {
            points: (0..n).map(|a| Angle::wrap(a as f64 / n as f64)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Angle] {
        &self.points
    }

    pub fn turns(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value()).collect()
    }

    /// Largest coordinate-wise circle distance between two configurations of equal size.
    pub fn max_distance(&self, other: &Configuration) -> f64 {
        assert_eq!(self.len(), other.len());
        self.points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| a.distance(*b))
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Angle>> for Configuration {
    type Error = Error;
    fn try_from(points: Vec<Angle>) -> Result<Configuration> {
        Configuration::new(points)
    }
}

impl From<Configuration> for Vec<Angle> {
    fn from(c: Configuration) -> Vec<Angle> {
        c.points
    }
}

/// A point `0 < t₁ < … < t_{n−1} < 1` of the open simplex Δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<SimplexPoint> {
        let mut prev = 0.0;
        for &t in &coords {
            if !t.is_finite() {
                return Err(Error::NonFinite(t));
            }
            if t <= prev {
                return Err(Error::InvalidSimplex(format!(
                    "{coords:?} is not strictly increasing in (0, 1)"
                )));
            }
            prev = t;
        }
        if prev >= 1.0 {
            return Err(Error::InvalidSimplex(format!("{coords:?} leaves (0, 1)")));
        }
        Ok(SimplexPoint { coords })
    }

    /// `(1/n, …, (n−1)/n)`.
    pub fn base(n: usize) -> SimplexPoint {
        SimplexPoint {
            coords: (1..n).map(|a| a as f64 / n as f64).collect(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of knots `n` this point parametrizes (dimension + 1).
    pub fn n(&self) -> usize {
        self.coords.len() + 1
    }

    pub fn max_distance(&self, other: &SimplexPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = Error;
    fn try_from(coords: Vec<f64>) -> Result<SimplexPoint> {
        SimplexPoint::new(coords)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(s: SimplexPoint) -> Vec<f64> {
        s.coords
    }
}

/// Topological type of the quotient `F/ℤ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistType {
    Trivial,
    Twisted,
}

/// True iff the points are positively cyclically ordered.
pub fn in_base_component(c: &Configuration) -> bool {
    let x0 = c.points[0];
    let mut prev = 0.0;
    for p in &c.points[1..] {
        let u = p.offset_from(x0);
        if u <= prev {
            return false;
        }
        prev = u;
    }
    true
}

/// The chart `h: F → S¹ × Δ`, `(x₀, …) ↦ (x₀, (x₁ − x₀) mod 1, …)`.
pub fn h_chart(c: &Configuration) -> Result<(Angle, SimplexPoint)> {
    if !in_base_component(c) {
        return Err(Error::NotInBaseComponent);
    }
    let x0 = c.points[0];
    let coords = c.points[1..].iter().map(|p| p.offset_from(x0)).collect();
    Ok((x0, SimplexPoint { coords }))
}

/// The section `s(φ, t) = (φ, φ + t₁, …, φ + t_{n−1})`.
pub fn s_section(phi: Angle, t: &SimplexPoint) -> Configuration {
    let mut points = Vec::with_capacity(t.n());
    points.push(phi);
    points.extend(t.coords.iter().map(|&u| phi.rotate(u)));
    Configuration { points }
}

/// Cyclic shift `σ^power`: `(x₀, …, x_{n−1}) ↦ (x_p, …, x_{p−1})`.
pub fn sigma_shift(c: &Configuration, power: i64) -> Configuration {
    let n = c.len();
    let p = power.rem_euclid(n as i64) as usize;
    let mut points = c.points.clone();
    points.rotate_left(p);
    Configuration { points }
}

fn check_divisor(n: usize, k: usize) -> Result<usize> {
    if n == 0 || k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotADivisor { n, k });
    }
    Ok(n / k)
}

/// Twisted iff `n` is even and `d = n/k` is odd.
pub fn twist_type(n: usize, k: usize) -> Result<TwistType> {
    let d = check_divisor(n, k)?;
    Ok(if n.is_multiple_of(2) && d % 2 == 1 {
        TwistType::Twisted
    } else {
        TwistType::Trivial
    })
}

/// Default central-difference step for [`orientation_sign_numeric`].
pub const JACOBIAN_STEP: f64 = 1e-5;

/// Sign of the Jacobian of `h ∘ σ^d ∘ s` on `S¹ × Δ`, by central differences.
pub fn orientation_sign_numeric(n: usize, d: usize) -> Result<i32> {
    orientation_sign_numeric_with_step(n, d, JACOBIAN_STEP)
}

pub fn orientation_sign_numeric_with_step(n: usize, d: usize, step: f64) -> Result<i32> {
    if n == 0 || d == 0 || d > n || !n.is_multiple_of(d) {
        return Err(Error::NotADivisor { n, k: d });
    }
    // interior evaluation point: base simplex point shifted by δ in every coordinate
    let delta = (0.25 / n as f64).min(0.01);
    let center: Vec<f64> = std::iter::once(0.0)
        .chain((1..n).map(|a| a as f64 / n as f64 + delta))
        .collect();
    let margin = if n == 1 {
        f64::INFINITY
    } else {
        // distance from the centre to ∂Δ
        let mut m = center[1].min(1.0 - center[n - 1]);
        for a in 1..n - 1 {
            m = m.min(center[a + 1] - center[a]);
        }
        m
    };
    if !(step > 0.0) || !step.is_finite() || step >= margin / 2.0 {
        return Err(Error::DegenerateStep(step));
    }

    let map = |coords: &[f64]| -> Result<Vec<f64>> {
        let phi = Angle::wrap(coords[0]);
        let t = SimplexPoint::new(coords[1..].to_vec())?;
        let shifted = sigma_shift(&s_section(phi, &t), d as i64);
        let (psi, u) = h_chart(&shifted)?;
        let mut out = vec![psi.value()];
        out.extend_from_slice(u.coords());
        Ok(out)
    };

    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut plus = center.clone();
        let mut minus = center.clone();
        plus[j] += step;
        minus[j] -= step;
        let fp = map(&plus)?;
        let fm = map(&minus)?;
        for i in 0..n {
            let diff = if i == 0 {
                // S¹ coordinate: difference taken through the local lift
                angle_sub(Angle::wrap(fp[0]), Angle::wrap(fm[0]))
            } else {
                fp[i] - fm[i]
            };
            jac[(i, j)] = diff / (2.0 * step);
        }
    }
    let det = jac.determinant();
    if !det.is_finite() || det.abs() < 1e-8 {
        return Err(Error::DegenerateStep(step));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

fn lex_cmp(a: &Configuration, b: &Configuration) -> Ordering {
    for (x, y) in a.points.iter().zip(&b.points) {
        match x.value().total_cmp(&y.value()) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Lexicographically least element of the ℤ_k-orbit `{σ^{j·n/k}(c)}`.
pub fn canonical_representative(c: &Configuration, k: usize) -> Result<Configuration> {
    let d = check_divisor(c.len(), k)?;
    let mut best = c.clone();
    for j in 1..k {
        let cand = sigma_shift(c, (j * d) as i64);
        if lex_cmp(&cand, &best) == Ordering::Less {
            best = cand;
        }
    }
    Ok(best)
}

/// Distance between the ℤ_k-orbits of two configurations: the minimum over the
/// orbit of `b` of the coordinate-wise circle distance to `a`.
///
/// Unlike comparing canonical representatives this is insensitive to which
/// orbit element wins the lexicographic tie-break when a point sits at 0 ± ε.
pub fn quotient_distance(a: &Configuration, b: &Configuration, k: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidConfiguration(format!(
            "sizes differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let d = check_divisor(a.len(), k)?;
    Ok((0..k)
        .map(|j| a.max_distance(&sigma_shift(b, (j * d) as i64)))
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(t: &[f64]) -> Configuration {
        Configuration::from_turns(t).unwrap()
    }

    #[test]
    fn rejects_coincident_points() {
        assert!(Configuration::from_turns(&[0.1, 0.1]).is_err());
        assert!(Configuration::from_turns(&[0.0, 1.0]).is_err());
        assert!(Configuration::from_turns(&[]).is_err());
    }

    #[test]
    fn base_component_examples() {
        assert!(in_base_component(&cfg(&[0.0, 1.0 / 3.0, 2.0 / 3.0])));
        assert!(!in_base_component(&cfg(&[0.0, 2.0 / 3.0, 1.0 / 3.0])));
        assert!(in_base_component(&cfg(&[0.9, 0.05, 0.4])));
        assert!(in_base_component(&cfg(&[0.7, 0.2])));
        assert!(in_base_component(&cfg(&[0.7])));
    }

    #[test]
    fn base_component_matches_brute_force() {
        // brute force: F is the orbit of positively ordered tuples, so a
        // 3-point configuration is in F iff its cyclic order is positive
        let pts = [0.05, 0.3, 0.55, 0.8];
        for &x in &pts {
            for &y in &pts {
                for &z in &pts {
                    if x == y || y == z || x == z {
                        continue;
                    }
                    let c = cfg(&[x, y, z]);
                    let expected =
                        crate::circle::cyclic_order(Angle::wrap(x), Angle::wrap(y), Angle::wrap(z))
                            .unwrap();
                    assert_eq!(in_base_component(&c), expected);
                }
            }
        }
    }

    #[test]
    fn chart_examples() {
        let (phi, t) = h_chart(&cfg(&[0.0, 0.5])).unwrap();
        assert_eq!((phi.value(), t.coords().to_vec()), (0.0, vec![0.5]));
        let (phi, t) = h_chart(&cfg(&[0.25, 0.5])).unwrap();
        assert_eq!((phi.value(), t.coords().to_vec()), (0.25, vec![0.25]));
        let (phi, t) = h_chart(&Configuration::base(3)).unwrap();
        assert_eq!(phi.value(), 0.0);
        assert!(t.max_distance(&SimplexPoint::base(3)) < 1e-16);
        assert_eq!(
            h_chart(&cfg(&[0.0, 0.6, 0.3])),
            Err(Error::NotInBaseComponent)
        );
    }

    #[test]
    fn section_examples() {
        let s = SimplexPoint::new(vec![0.5]).unwrap();
        assert_eq!(s_section(Angle::ZERO, &s).turns(), vec![0.0, 0.5]);
        let s = SimplexPoint::new(vec![0.25]).unwrap();
        assert_eq!(s_section(Angle::wrap(0.25), &s).turns(), vec![0.25, 0.5]);
        let s = SimplexPoint::new(vec![0.2, 0.5]).unwrap();
        let c = s_section(Angle::wrap(0.1), &s);
        assert!(c.max_distance(&cfg(&[0.1, 0.3, 0.6])) < 1e-16);
        assert!(SimplexPoint::new(vec![0.5, 0.2]).is_err());
        assert!(SimplexPoint::new(vec![0.0, 0.2]).is_err());
        assert!(SimplexPoint::new(vec![0.2, 1.0]).is_err());
    }

    #[test]
    fn sigma_examples() {
        let c = Configuration::base(3);
        let s1 = sigma_shift(&c, 1);
        assert_eq!(s1.points()[2].value(), 0.0);
        assert_eq!(s1.points()[0], c.points()[1]);
        assert_eq!(sigma_shift(&c, 3), c);
        assert_eq!(sigma_shift(&c, -1), sigma_shift(&c, 2));
        assert_eq!(sigma_shift(&cfg(&[0.0, 0.5]), 1).turns(), vec![0.5, 0.0]);
    }

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation_sign_numeric(3, 1).unwrap(), 1);
        assert_eq!(orientation_sign_numeric(2, 1).unwrap(), -1);
        assert_eq!(orientation_sign_numeric(4, 2).unwrap(), 1);
        assert_eq!(orientation_sign_numeric(1, 1).unwrap(), 1);
        assert!(matches!(
            orientation_sign_numeric(4, 3),
            Err(Error::NotADivisor { .. })
        ));
        assert!(matches!(
            orientation_sign_numeric_with_step(3, 1, 0.0),
            Err(Error::DegenerateStep(_))
        ));
        assert!(matches!(
            orientation_sign_numeric_with_step(3, 1, 0.2),
            Err(Error::DegenerateStep(_))
        ));
    }

    #[test]
    fn parity_table_matches_twist_type() {
        for n in 1..=6usize {
            for d in (1..=n).filter(|d| n % d == 0) {
                let sign = orientation_sign_numeric(n, d).unwrap();
                let twisted = twist_type(n, n / d).unwrap() == TwistType::Twisted;
                assert_eq!(sign == -1, twisted, "n = {n}, d = {d}");
                assert_eq!(twisted, n % 2 == 0 && d % 2 == 1);
            }
        }
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist_type(2, 2).unwrap(), TwistType::Twisted);
        assert_eq!(twist_type(4, 2).unwrap(), TwistType::Trivial);
        assert_eq!(twist_type(1, 1).unwrap(), TwistType::Trivial);
        assert_eq!(twist_type(6, 6).unwrap(), TwistType::Twisted);
        assert_eq!(twist_type(6, 2).unwrap(), TwistType::Twisted);
        assert_eq!(twist_type(6, 3).unwrap(), TwistType::Trivial);
        assert!(twist_type(6, 4).is_err());
    }

    #[test]
    fn canonical_examples() {
        let c = sigma_shift(&Configuration::base(3), 1);
        let r = canonical_representative(&c, 3).unwrap();
        assert_eq!(r, Configuration::base(3));
        let c = cfg(&[0.0, 0.5]);
        assert_eq!(canonical_representative(&c, 1).unwrap(), c);
        let c = cfg(&[0.1, 0.4, 0.6, 0.9]);
        // enumerate both orbit members by hand
        let other = cfg(&[0.6, 0.9, 0.1, 0.4]);
        assert_eq!(sigma_shift(&c, 2), other);
        assert_eq!(canonical_representative(&c, 2).unwrap(), c);
        assert_eq!(canonical_representative(&other, 2).unwrap(), c);
        assert!(canonical_representative(&c, 3).is_err());
    }

    #[test]
    fn quotient_distance_ignores_wrap() {
        let a = cfg(&[1e-13, 0.25, 0.5, 0.75]);
        let b = cfg(&[0.25, 0.5, 0.75, 1.0 - 1e-13]);
        assert!(quotient_distance(&a, &b, 4).unwrap() < 1e-12);
        assert!(quotient_distance(&a, &b, 1).unwrap() > 0.2);
    }

    fn config_strategy() -> impl Strategy<Value = Configuration> {
        (
            1usize..=6,
            0.0f64..1.0,
            prop::collection::vec(0.01f64..1.0, 6),
        )
            .prop_map(|(n, phi, w)| {
                let total: f64 = w[..n].iter().sum();
                let mut acc = phi;
                let mut pts = Vec::new();
                for wi in &w[..n] {
                    pts.push(Angle::wrap(acc));
                    acc += wi / total;
                }
                Configuration::new(pts).unwrap()
            })
    }

    proptest! {
        #[test]
        fn chart_round_trip(c in config_strategy()) {
            prop_assert!(in_base_component(&c));
            let (phi, t) = h_chart(&c).unwrap();
            let back = s_section(phi, &t);
            prop_assert!(back.max_distance(&c) < 1e-12);
            let (phi2, t2) = h_chart(&back).unwrap();
            prop_assert!(phi2.distance(phi) < 1e-12 && t2.max_distance(&t) < 1e-12);
        }

        #[test]
        fn sigma_preserves_f_and_acts_freely(c in config_strategy(), j in 0i64..12) {
            let s = sigma_shift(&c, j);
            prop_assert!(in_base_component(&s));
            prop_assert!(h_chart(&s).is_ok());
            if j.rem_euclid(c.len() as i64) != 0 {
                prop_assert_ne!(s, c.clone());
            }
        }

        #[test]
        fn canonical_is_orbit_invariant(c in config_strategy(), j in 0i64..6) {
            let n = c.len();
            for k in (1..=n).filter(|k| n % k == 0) {
                let d = (n / k) as i64;
                let r = canonical_representative(&c, k).unwrap();
                prop_assert_eq!(canonical_representative(&sigma_shift(&c, j * d), k).unwrap(), r.clone());
                prop_assert_eq!(canonical_representative(&r, k).unwrap(), r);
            }
        }
    }
}
