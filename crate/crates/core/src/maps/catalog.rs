//! Named example maps.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{CircleMap, CircleValuedMap};

fn fourier(degree: i64, cos: &[f64], sin: &[f64]) -> Arc<dyn CircleMap> {
    Arc::new(
        CircleValuedMap::new(degree, 0.0, cos.to_vec(), sin.to_vec()).expect("valid coefficients"),
    )
}

/// `t + 0.3 sin 2πt`: one maximum, one minimum, `n = 2`.
pub fn single_sine() -> Arc<dyn CircleMap> {
    fourier(1, &[], &[0.3])
}

/// `t + 0.1 sin 4πt`: four critical values, invariant under the half turn.
pub fn double_sine() -> Arc<dyn CircleMap> {
    fourier(1, &[], &[0.0, 0.1])
}

/// `t + 0.3 sin 2πt + 0.05 cos 4πt`: no rotation symmetry.
pub fn generic_perturbed() -> Arc<dyn CircleMap> {
    fourier(1, &[0.0, 0.05], &[0.3])
}

/// `0.2 cos 2πt + 0.15 cos 4πt`: degree 0 with three exceptional values.
pub fn odd_three() -> Arc<dyn CircleMap> {
    fourier(0, &[0.2, 0.15], &[])
}

/// `2t`: a covering with no critical points.
pub fn covering() -> Arc<dyn CircleMap> {
    fourier(2, &[], &[])
}

/// Amplitude `a` for which the two critical values of `t + a sin 4πt` on
/// one half turn differ by exactly ½.
pub fn twisted_amplitude() -> f64 {
    let drop = |a: f64| {
        let theta = (-1.0 / (4.0 * PI * a)).acos();
        2.0 * a * theta.sin() - (PI - theta) / (2.0 * PI)
    };
    let (mut lo, mut hi) = (0.1_f64, 1.0_f64);
    while hi - lo > 1e-16 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if drop(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `t + a sin 4πt` with two exceptional values swapped by the half turn.
pub fn twisted_pair() -> Arc<dyn CircleMap> {
    fourier(1, &[], &[0.0, twisted_amplitude()])
}
