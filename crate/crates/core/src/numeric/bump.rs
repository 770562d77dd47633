//! Smooth cut-offs vanishing to infinite order.

/// Smooth step: 0 for `s ≤ 0`, 1 for `s ≥ 1`, `C^∞` and flat to all orders at both ends.
///
/// `χ(s) = ψ(s) / (ψ(s) + ψ(1 − s))` with `ψ(s) = e^{−1/s}`.
#[inline]
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let e = 1.0 / s - 1.0 / (1.0 - s);
        // e → +∞ near 0 and −∞ near 1; exp saturates cleanly at both ends
        1.0 / (1.0 + e.exp())
    }
}

/// Plateau on `[0, 1]`: zero to infinite order at 0 and 1, equal to 1 on `[w, 1 − w]`.
#[inline]
pub fn plateau(u: f64, w: f64) -> f64 {
    debug_assert!(w > 0.0 && w <= 0.5);
    smooth_step(u / w) * smooth_step((1.0 - u) / w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_limits_and_symmetry() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(0.5), 0.5);
        for i in 1..100 {
            let s = i as f64 / 100.0;
            assert!((smooth_step(s) + smooth_step(1.0 - s) - 1.0).abs() < 1e-15);
            assert!(smooth_step(s) >= smooth_step(s - 0.01));
        }
        // flat at the ends: far below any polynomial
        assert!(smooth_step(0.01) < 1e-40);
    }

    #[test]
    fn plateau_shape() {
        assert_eq!(plateau(0.0, 0.25), 0.0);
        assert_eq!(plateau(1.0, 0.25), 0.0);
        assert_eq!(plateau(0.5, 0.25), 1.0);
        assert_eq!(plateau(0.3, 0.25), 1.0);
        assert!(plateau(0.1, 0.25) > 0.0 && plateau(0.1, 0.25) < 1.0);
    }
}
