//! Adaptive Gauss–Legendre quadrature with cached cumulative panel sums.

use std::sync::OnceLock;

/// Points per panel.
pub const ORDER: usize = 10;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

/// Nodes and weights on `[−1, 1]`, by Newton iteration on `P_ORDER`.
fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

/// Fixed-order Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for i in 0..ORDER {
        s += r.weights[i] * f(mid + half * r.nodes[i]);
    }
    s * half
}

/// A partition of `[a, b]` on which the fixed rule is accurate, with running sums.
#[derive(Clone, Debug)]
pub struct Panels {
    edges: Vec<f64>,
    cumulative: Vec<f64>,
}

impl Panels {
    /// Bisects panels until the two-half estimate agrees with the whole-panel
    /// estimate to `tol` (absolute), starting from `initial` equal panels.
    pub fn build<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, initial: usize, tol: f64) -> Panels {
        let mut edges = vec![a];
        let mut cumulative = vec![0.0];
        let mut total = 0.0;
        let h = (b - a) / initial.max(1) as f64;
        for i in 0..initial.max(1) {
            let lo = a + h * i as f64;
            let hi = if i + 1 == initial.max(1) { b } else { lo + h };
            refine(
                f,
                lo,
                hi,
                gauss_legendre(f, lo, hi),
                tol,
                0,
                &mut edges,
                &mut cumulative,
                &mut total,
            );
        }
        Panels { edges, cumulative }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn panel_count(&self) -> usize {
        self.edges.len() - 1
    }

    /// `∫_a^x f` for `x` inside the partition.
    pub fn integral_to<F: Fn(f64) -> f64>(&self, f: &F, x: f64) -> f64 {
        let a = self.edges[0];
        let b = *self.edges.last().unwrap();
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return self.total();
        }
        // last edge ≤ x
        let j = self.edges.partition_point(|&e| e <= x) - 1;
        let lo = self.edges[j];
        if x == lo {
            return self.cumulative[j];
        }
        self.cumulative[j] + gauss_legendre(f, lo, x)
    }
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    edges: &mut Vec<f64>,
    cumulative: &mut Vec<f64>,
    total: &mut f64,
) {
    let mid = 0.5 * (lo + hi);
    let left = gauss_legendre(f, lo, mid);
    let right = gauss_legendre(f, mid, hi);
    if (left + right - whole).abs() <= tol || depth >= 40 {
        // accept the finer pair as two panels
        *total += left;
        edges.push(mid);
        cumulative.push(*total);
        *total += right;
        edges.push(hi);
        cumulative.push(*total);
        return;
    }
    refine(f, lo, mid, left, tol, depth + 1, edges, cumulative, total);
    refine(f, mid, hi, right, tol, depth + 1, edges, cumulative, total);
}
