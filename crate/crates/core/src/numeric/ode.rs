//! Dormand–Prince 5(4) for autonomous scalar equations `x′ = v(x)`.

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `x′ = v(x)` from `x0` over time `t` (either sign) with local
/// error tolerance `tol` (mixed absolute/relative).
pub fn integrate<V>(v: V, x0: f64, t: f64, tol: f64) -> Result<f64>
where
    V: Fn(f64) -> Result<f64>,
{
    if t == 0.0 {
        return Ok(x0);
    }
    let dir = t.signum();
    let span = t.abs();
    let mut elapsed = 0.0;
    let mut x = x0;
    let mut h = span.min(0.05);
    let hmin = 1e-13 * span.max(1.0);
    let mut k = [0.0; 7];
    k[0] = v(x)?;
    // FSAL: k[6] of an accepted step is k[0] of the next
    while elapsed < span {
        if span - elapsed < h {
            h = span - elapsed;
        }
        let hs = dir * h;
        for s in 1..7 {
            let mut xi = x;
            for j in 0..s {
                xi += hs * A[s][j] * k[j];
            }
            k[s] = v(xi)?;
        }
        let mut x5 = x;
        for j in 0..6 {
            x5 += hs * A[6][j] * k[j];
        }
        let mut err = 0.0;
        for j in 0..7 {
            err += E[j] * k[j];
        }
        let err = (hs * err).abs() / (tol * (1.0 + x.abs().max(x5.abs())));
        if err <= 1.0 {
            elapsed += h;
            x = x5;
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < hmin && elapsed < span && span - elapsed > hmin {
            return Err(Error::StepUnderflow {
                t: dir * elapsed,
                h,
            });
        }
    }
    Ok(x)
}
