//! Critical points, exceptional values and levels of a circle map.

use serde::Serialize;
use std::sync::Arc;

use crate::circle::Angle;
use crate::config::Configuration;
use crate::diffeo::{interpolating_diffeo, CircleDiffeo};
use crate::error::{Error, Result};
use crate::numeric::roots::{bisect, newton_bisect};

use super::{CircleMap, ComposedMap};

/// Grid size of the sign-change scan for `L′`.
pub const SCAN_POINTS: usize = 4096;
/// Critical values closer than this are one exceptional value.
pub const MERGE_TOL: f64 = 1e-9;
/// Critical points with `|L″|` at or below this are rejected.
pub const MORSE_TOL: f64 = 1e-8;

const ROOT_TOL: f64 = 1e-14;

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub t: Angle,
    pub second_derivative: f64,
    pub value: Angle,
    /// Index of `value` among the exceptional values.
    pub level: usize,
}

/// A point of some level `E_a = f⁻¹(p_a)`.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalPoint {
    pub t: Angle,
    pub level: usize,
    pub critical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Level {
    pub value: Angle,
    pub points: Vec<ExceptionalPoint>,
}

/// A maximal monotone piece of the lift between consecutive critical points,
/// `[start, end]` on ℝ with `start ∈ [0, 1)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Branch {
    pub start: f64,
    pub end: f64,
    pub lift_start: f64,
    pub lift_end: f64,
}

impl Branch {
    pub fn increasing(&self) -> bool {
        self.lift_end > self.lift_start
    }

    /// Increment `L(end) − L(start)`.
    pub fn increment(&self) -> f64 {
        self.lift_end - self.lift_start
    }

    pub fn contains_value(&self, y: f64) -> bool {
        let (lo, hi) = self.value_range();
        y > lo && y < hi
    }

    pub fn value_range(&self) -> (f64, f64) {
        if self.increasing() {
            (self.lift_start, self.lift_end)
        } else {
            (self.lift_end, self.lift_start)
        }
    }
}

/// The result of [`analyze`].
#[derive(Clone, Debug)]
pub struct MapAnalysis {
    map: Arc<dyn CircleMap>,
    critical_points: Vec<CriticalPoint>,
    values: Vec<Angle>,
    levels: Vec<Level>,
    branches: Vec<Branch>,
}

#[derive(Serialize)]
struct Report<'a> {
    degree: i64,
    morse: bool,
    n: usize,
    critical_points: &'a [CriticalPoint],
    exceptional_values: &'a [Angle],
    levels: &'a [Level],
}

impl MapAnalysis {
    pub fn map(&self) -> &Arc<dyn CircleMap> {
        &self.map
    }

    pub fn degree(&self) -> i64 {
        self.map.degree()
    }

    /// Number of exceptional values.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Always true: non-Morse maps are rejected by [`analyze`].
    pub fn morse(&self) -> bool {
        true
    }

    /// Critical points in increasing order of `t ∈ [0, 1)`.
    pub fn critical_points(&self) -> &[CriticalPoint] {
        &self.critical_points
    }

    /// Exceptional values in increasing order, starting at the one nearest 0
    /// from above (a value within [`MERGE_TOL`] below 1 counts as near 0).
    pub fn values(&self) -> &[Angle] {
        &self.values
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Branch `i` runs from critical point `i` to critical point `i + 1`.
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// All points of all levels in increasing order of `t`.
    pub fn exceptional_points(&self) -> Vec<ExceptionalPoint> {
        let mut pts: Vec<_> = self
            .levels
            .iter()
            .flat_map(|l| l.points.iter().cloned())
            .collect();
        pts.sort_by(|a, b| a.t.value().total_cmp(&b.t.value()));
        pts
    }

    /// True iff the values are `a/n` to within [`MERGE_TOL`].
    pub fn is_normalized(&self) -> bool {
        let n = self.n();
        n > 0
            && self
                .values
                .iter()
                .enumerate()
                .all(|(a, v)| v.distance(Angle::wrap(a as f64 / n as f64)) <= MERGE_TOL)
    }

    /// The values as a configuration in the base component.
    pub fn value_configuration(&self) -> Result<Configuration> {
        Configuration::new(self.values.clone())
    }

    /// `x` in branch `i` with `L(x) = y`; `y` is clamped to the branch range.
    pub fn branch_inverse(&self, i: usize, y: f64) -> Result<f64> {
        let b = self.branches[i];
        let (lo, hi) = b.value_range();
        let y = y.clamp(lo, hi);
        if y == b.lift_start {
            return Ok(b.start);
        }
        if y == b.lift_end {
            return Ok(b.end);
        }
        let sign = if b.increasing() { 1.0 } else { -1.0 };
        let guess = b.start + (b.end - b.start) * (y - b.lift_start) / b.increment();
        newton_bisect(
            |x| {
                (
                    sign * (self.map.lift(x) - y),
                    sign * self.map.lift_derivative(x),
                )
            },
            b.start,
            b.end,
            Some(guess),
            ROOT_TOL,
        )
    }

    /// Index of the branch whose domain contains the lifted point `t`, and
    /// the integer shift placing `t` in `[start, end)` of that branch.
    pub fn locate_branch(&self, t: f64) -> Option<(usize, f64)> {
        let first = self.branches.first()?.start;
        let k = (t - first).floor();
        let tau = t - k;
        let i = self
            .branches
            .partition_point(|b| b.start <= tau)
            .saturating_sub(1);
        Some((i, k))
    }

    pub fn report(&self) -> serde_json::Value {
        serde_json::to_value(Report {
            degree: self.degree(),
            morse: self.morse(),
            n: self.n(),
            critical_points: &self.critical_points,
            exceptional_values: &self.values,
            levels: &self.levels,
        })
        .expect("analysis report serializes")
    }
}

fn scan_critical_points(f: &dyn CircleMap) -> Result<Vec<f64>> {
    let dl = |t: f64| f.lift_derivative(t);
    let grid: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| dl(i as f64 / SCAN_POINTS as f64))
        .collect();
    let mut roots = Vec::new();
    for i in 0..SCAN_POINTS {
        let (a, b) = (grid[i], grid[i + 1]);
        let (lo, hi) = (
            i as f64 / SCAN_POINTS as f64,
            (i + 1) as f64 / SCAN_POINTS as f64,
        );
        if a == 0.0 {
            roots.push(lo);
        } else if a * b < 0.0 {
            roots.push(bisect(dl, lo, hi, ROOT_TOL)?);
        }
    }
    if roots.len() > 1 && roots[0] + 1.0 - roots[roots.len() - 1] <= ROOT_TOL {
        roots.pop();
    }
    Ok(roots)
}

/// Cyclic sort key: values within `MERGE_TOL` below 1 sort before 0.
fn sort_key(v: Angle) -> f64 {
    if v.value() > 1.0 - MERGE_TOL {
        v.value() - 1.0
    } else {
        v.value()
    }
}

fn merge_values(raw: &[Angle]) -> Vec<Angle> {
    let mut sorted = raw.to_vec();
    sorted.sort_by(|a, b| sort_key(*a).total_cmp(&sort_key(*b)));
    let mut merged: Vec<Angle> = Vec::new();
    for v in sorted {
        match merged.last() {
            Some(last) if last.distance(v) <= MERGE_TOL => {}
            _ => merged.push(v),
        }
    }
    if merged.len() > 1 && merged[0].distance(*merged.last().unwrap()) <= MERGE_TOL {
        merged.pop();
    }
    merged
}

/// Critical points, exceptional values and levels of `f`.
pub fn analyze(f: Arc<dyn CircleMap>) -> Result<MapAnalysis> {
    let roots = scan_critical_points(f.as_ref())?;
    let mut crit = Vec::with_capacity(roots.len());
    for &t in &roots {
        let second = f.lift_second_derivative(t);
        if second.abs() <= MORSE_TOL {
            return Err(Error::NonMorse {
                t,
                second_derivative: second,
            });
        }
        crit.push((t, second, f.eval(Angle::wrap(t))));
    }
    let values = merge_values(&crit.iter().map(|c| c.2).collect::<Vec<_>>());
    let level_of = |v: Angle| {
        values
            .iter()
            .position(|p| p.distance(v) <= MERGE_TOL)
            .expect("every critical value was merged into some value")
    };
    let critical_points: Vec<CriticalPoint> = crit
        .iter()
        .map(|&(t, second, value)| CriticalPoint {
            t: Angle::wrap(t),
            second_derivative: second,
            value,
            level: level_of(value),
        })
        .collect();

    let m = roots.len();
    let branches: Vec<Branch> = (0..m)
        .map(|i| {
            let start = roots[i];
            let end = if i + 1 < m {
                roots[i + 1]
            } else {
                roots[0] + 1.0
            };
            Branch {
                start,
                end,
                lift_start: f.lift(start),
                lift_end: f.lift(end),
            }
        })
        .collect();

    let mut levels: Vec<Level> = values
        .iter()
        .map(|&value| Level {
            value,
            points: Vec::new(),
        })
        .collect();
    for c in &critical_points {
        levels[c.level].points.push(ExceptionalPoint {
            t: c.t,
            level: c.level,
            critical: true,
        });
    }
    let mut analysis = MapAnalysis {
        map: f,
        critical_points,
        values,
        levels: Vec::new(),
        branches,
    };
    for (a, level) in levels.iter_mut().enumerate() {
        let p = level.value.value();
        for (i, b) in analysis.branches.iter().enumerate() {
            let (lo, hi) = b.value_range();
            let (lo, hi) = (lo + 2.0 * MERGE_TOL, hi - 2.0 * MERGE_TOL);
            let mut k = (lo - p).ceil();
            while p + k <= hi {
                let x = analysis.branch_inverse(i, p + k)?;
                level.points.push(ExceptionalPoint {
                    t: Angle::wrap(x),
                    level: a,
                    critical: false,
                });
                k += 1.0;
            }
        }
        level
            .points
            .sort_by(|x, y| x.t.value().total_cmp(&y.t.value()));
    }
    analysis.levels = levels;
    Ok(analysis)
}

/// `R` carrying the exceptional values of `f` to `a/n`, and the analysis of `R ∘ f`.
pub fn normalize_exceptional(f: Arc<dyn CircleMap>) -> Result<(CircleDiffeo, MapAnalysis)> {
    let analysis = analyze(f.clone())?;
    if analysis.n() == 0 {
        return Err(Error::NoExceptionalValues);
    }
    if analysis.is_normalized() {
        return Ok((CircleDiffeo::identity(), analysis));
    }
    let r = interpolating_diffeo(&analysis.value_configuration()?)?.inverse();
    let composed: Arc<dyn CircleMap> =
        Arc::new(ComposedMap::new(f, r.clone(), CircleDiffeo::identity()));
    Ok((r, analyze(composed)?))
}
