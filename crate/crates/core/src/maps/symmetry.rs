//! Rotations `rotation(l/n)` that a map absorbs by a change of variable.

use serde::Serialize;
use std::sync::Arc;

use crate::circle::Angle;
use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};

use super::{
    analyze, conjugacy_residual, right_equivalence, CircleMap, ComposedMap, MapAnalysis,
    RESIDUAL_GRID,
};

/// A shift `l` with `rotation(l/n) ∘ f = f ∘ h`.
#[derive(Clone, Debug)]
pub struct SymmetryWitness {
    pub shift: usize,
    pub h: CircleDiffeo,
    pub residual: f64,
}

/// The subgroup `d·ℤ_n ≅ ℤ_k` of absorbed shifts.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryInfo {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// Least positive absorbed shift, `d`; equals `n` when `k = 1`.
    pub generator_shift: usize,
    pub shifts: Vec<usize>,
    #[serde(skip)]
    pub witnesses: Vec<SymmetryWitness>,
}

/// `rotation(φ) ∘ f`.
pub fn post_rotate(f: &Arc<dyn CircleMap>, phi: f64) -> Arc<dyn CircleMap> {
    Arc::new(ComposedMap::new(
        f.clone(),
        CircleDiffeo::rotation(Angle::wrap(phi)),
        CircleDiffeo::identity(),
    ))
}

pub fn symmetry_group(analysis: &MapAnalysis) -> Result<SymmetryInfo> {
    let n = analysis.n();
    if n == 0 {
        return Err(Error::NoExceptionalValues);
    }
    if !analysis.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let f = analysis.map();
    let mut witnesses = vec![SymmetryWitness {
        shift: 0,
        h: CircleDiffeo::identity(),
        residual: 0.0,
    }];
    for l in 1..n {
        let g = analyze(post_rotate(f, l as f64 / n as f64))?;
        if let Some(h) = right_equivalence(analysis, &g)? {
            let residual = conjugacy_residual(f.as_ref(), g.map().as_ref(), &h, RESIDUAL_GRID);
            witnesses.push(SymmetryWitness {
                shift: l,
                h,
                residual,
            });
        }
    }
    let shifts: Vec<usize> = witnesses.iter().map(|w| w.shift).collect();
    let closed = shifts
        .iter()
        .all(|&a| shifts.iter().all(|&b| shifts.contains(&((a + b) % n))));
    if !closed {
        return Err(Error::NotASubgroup(shifts));
    }
    let k = shifts.len();
    let d = n / k;
    Ok(SymmetryInfo {
        n,
        k,
        d,
        generator_shift: d,
        shifts,
        witnesses,
    })
}
