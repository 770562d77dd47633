//! Seeded random configurations, simplex points and diffeomorphisms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circle::Angle;
use crate::config::{s_section, Configuration, SimplexPoint};
use crate::diffeo::{contract_toward_identity, mu_build, CircleDiffeo};
use crate::error::Result;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` interval lengths summing to 1, each at least `min_gap`.
fn gaps(rng: &mut SampleRng, n: usize, min_gap: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    let free = 1.0 - n as f64 * min_gap;
    w.iter().map(|x| min_gap + free * x / total).collect()
}

fn knots_from_gaps(g: &[f64]) -> Result<SimplexPoint> {
    let mut acc = 0.0;
    let coords = g[..g.len() - 1]
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    SimplexPoint::new(coords)
}

/// A point of the open simplex for `n` knots with consecutive gaps at least `min_gap`.
pub fn random_simplex(rng: &mut SampleRng, n: usize, min_gap: f64) -> Result<SimplexPoint> {
    knots_from_gaps(&gaps(rng, n, min_gap))
}

/// A simplex point whose smallest gap is exactly `gap`, at a random interval.
pub fn clustered_simplex(rng: &mut SampleRng, n: usize, gap: f64) -> Result<SimplexPoint> {
    if n < 2 {
        return Ok(SimplexPoint::base(n));
    }
    let mut g = gaps(rng, n - 1, gap * 1.5 / (1.0 - gap));
    for x in &mut g {
        *x *= 1.0 - gap;
    }
    g.insert(rng.gen_range(0..n), gap);
    knots_from_gaps(&g)
}

/// A positively ordered configuration of `n` points.
pub fn random_configuration(rng: &mut SampleRng, n: usize, min_gap: f64) -> Result<Configuration> {
    let phi = Angle::wrap(rng.gen::<f64>());
    Ok(s_section(phi, &random_simplex(rng, n, min_gap)?))
}

/// `rotation(φ) ∘ μ` for a random `φ` and simplex point with `knots` knots.
pub fn random_diffeo(rng: &mut SampleRng, knots: usize, min_gap: f64) -> Result<CircleDiffeo> {
    let mu = CircleDiffeo::monotone(mu_build(&random_simplex(rng, knots, min_gap)?)?);
    Ok(CircleDiffeo::rotation(Angle::wrap(rng.gen::<f64>())).compose(&mu))
}

/// A diffeomorphism fixing every `a/n`: a μ with `2n` knots whose even knots
/// sit at `a/n`, contracted a random fraction toward the identity.
pub fn random_dcr(rng: &mut SampleRng, n: usize) -> Result<CircleDiffeo> {
    let coords: Vec<f64> = (1..2 * n)
        .map(|i| {
            let a = (i / 2) as f64;
            if i % 2 == 0 {
                a / n as f64
            } else {
                (a + 0.2 + 0.6 * rng.gen::<f64>()) / n as f64
            }
        })
        .collect();
    let g = CircleDiffeo::monotone(mu_build(&SimplexPoint::new(coords)?)?);
    contract_toward_identity(&g, 0.9 * rng.gen::<f64>(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::fixes_exceptional;

    #[test]
    fn simplex_gaps() {
        let mut r = rng(7);
        for n in 1..7 {
            let t = random_simplex(&mut r, n, 0.02).unwrap();
            assert_eq!(t.n(), n);
            let c = clustered_simplex(&mut r, n, 1e-3).unwrap();
            let mut knots = vec![0.0];
            knots.extend_from_slice(c.coords());
            knots.push(1.0);
            let min = knots.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min);
            if n >= 2 {
                assert!((min - 1e-3).abs() < 1e-12, "{min}");
            }
        }
    }

    #[test]
    fn dcr_fixes_values() {
        let mut r = rng(3);
        for n in 1..5 {
            assert!(fixes_exceptional(&random_dcr(&mut r, n).unwrap(), n));
        }
    }

    #[test]
    fn deterministic() {
        let a = random_configuration(&mut rng(11), 4, 0.01).unwrap();
        let b = random_configuration(&mut rng(11), 4, 0.01).unwrap();
        assert_eq!(a, b);
    }
}
