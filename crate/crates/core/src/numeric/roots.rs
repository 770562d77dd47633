//! Bracketed root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Plain bisection of a sign change of `g` on `[lo, hi]`, stopping at width `xtol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut g: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::NoBracket(format!(
            "g({lo}) = {glo}, g({hi}) = {ghi}"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!("bisection on [{lo}, {hi}]")))
}

/// Newton's method safeguarded by bisection. `g` returns `(value, derivative)`.
///
/// The bracket `[lo, hi]` must carry a sign change. Iterates that leave the
/// bracket, or a bracket that fails to halve, fall back to bisection.
pub fn newton_bisect<F>(
    mut g: F,
    mut lo: f64,
    mut hi: f64,
    guess: Option<f64>,
    xtol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut glo, _) = g(lo);
    let (ghi, _) = g(hi);
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if glo.signum() == ghi.signum() || glo.is_nan() || ghi.is_nan() {
        return Err(Error::NoBracket(format!(
            "g({lo}) = {glo}, g({hi}) = {ghi}"
        )));
    }
    let mut x = match guess {
        Some(x) if x > lo && x < hi => x,
        _ => 0.5 * (lo + hi),
    };
    let mut width = hi - lo;
    for _ in 0..MAX_ITER {
        let (gx, dg) = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx.signum() == glo.signum() {
            lo = x;
            glo = gx;
        } else {
            hi = x;
        }
        let newton = x - gx / dg;
        let halved = hi - lo <= 0.5 * width;
        width = hi - lo;
        let inside = newton.is_finite() && newton > lo && newton < hi;
        let next = if inside && (halved || (newton - x).abs() < 0.25 * width) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= xtol || hi - lo <= xtol {
            return Ok(next);
        }
        if next <= lo || next >= hi {
            // bracket exhausted at floating-point resolution
            return Ok(next.clamp(lo, hi));
        }
        x = next;
    }
    Err(Error::NoConvergence(format!(
        "newton-bisection on [{lo}, {hi}]"
    )))
}

/// Root of an increasing `g` found by doubling a bracket around `guess`.
pub fn solve_increasing<F>(mut g: F, guess: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let mut step = 0.5;
    let (mut lo, mut hi) = (guess - step, guess + step);
    for _ in 0..64 {
        let below = g(lo).0 <= 0.0;
        let above = g(hi).0 >= 0.0;
        if below && above {
            return newton_bisect(g, lo, hi, Some(guess), xtol);
        }
        if !below {
            lo -= step;
        }
        if !above {
            hi += step;
        }
        step *= 2.0;
    }
    Err(Error::NoBracket(format!(
        "no bracket for increasing function near {guess}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn newton_sqrt2_and_cubic() {
        let r = newton_bisect(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, None, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        // flat root: Newton alone is slow, the bracket still converges
        let r = newton_bisect(|x| (x.powi(3), 3.0 * x * x), -1.0, 0.7, None, 1e-14).unwrap();
        assert!(r.abs() < 1e-4);
        let r = newton_bisect(
            |x| (x.tanh() - 0.3, 1.0 - x.tanh().powi(2)),
            -5.0,
            30.0,
            None,
            1e-15,
        )
        .unwrap();
        assert!((r - 0.3f64.atanh()).abs() < 1e-14);
    }

    #[test]
    fn expanding_bracket() {
        let r = solve_increasing(
            |x| (x + 0.2 * x.sin() - 37.0, 1.0 + 0.2 * x.cos()),
            0.0,
            1e-14,
        )
        .unwrap();
        assert!((r + 0.2 * r.sin() - 37.0).abs() < 1e-12);
        assert!(solve_increasing(|_| (1.0, 0.0), 0.0, 1e-12).is_err());
    }

    #[test]
    fn no_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoBracket(_))
        ));
        assert!(matches!(
            newton_bisect(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, None, 1e-12),
            Err(Error::NoBracket(_))
        ));
    }
}
