//! Orbit points `R ∘ f ∘ h⁻¹`, their exceptional configurations, and the
//! structure of the orbit.

use serde::Serialize;
use std::sync::Arc;

use crate::circle::Angle;
use crate::config::{canonical_representative, sigma_shift, twist_type, Configuration, TwistType};
use crate::diffeo::{interpolating_diffeo, CircleDiffeo};
use crate::error::{Error, Result};
use crate::maps::{
    analyze, right_equivalence, CircleMap, ComposedMap, MapAnalysis, SymmetryInfo, MERGE_TOL,
};

/// `R ∘ f ∘ h⁻¹`, kept as an expression over the base map.
#[derive(Clone, Debug)]
pub struct OrbitPoint {
    base: Arc<dyn CircleMap>,
    h: CircleDiffeo,
    r: CircleDiffeo,
    map: Arc<dyn CircleMap>,
}

impl OrbitPoint {
    pub fn new(base: Arc<dyn CircleMap>, h: CircleDiffeo, r: CircleDiffeo) -> OrbitPoint {
        let map: Arc<dyn CircleMap> =
            Arc::new(ComposedMap::new(base.clone(), r.clone(), h.clone()));
        OrbitPoint { base, h, r, map }
    }

    pub fn of(base: Arc<dyn CircleMap>) -> OrbitPoint {
        OrbitPoint::new(base, CircleDiffeo::identity(), CircleDiffeo::identity())
    }

    pub fn map(&self) -> &Arc<dyn CircleMap> {
        &self.map
    }

    pub fn base(&self) -> &Arc<dyn CircleMap> {
        &self.base
    }

    pub fn h(&self) -> &CircleDiffeo {
        &self.h
    }

    pub fn r(&self) -> &CircleDiffeo {
        &self.r
    }

    /// `φ ∘ self`.
    pub fn post_compose(&self, phi: &CircleDiffeo) -> OrbitPoint {
        OrbitPoint::new(self.base.clone(), self.h.clone(), phi.compose(&self.r))
    }

    /// Largest circle distance between the two maps on a uniform grid.
    pub fn grid_distance(&self, other: &OrbitPoint, grid: usize) -> f64 {
        (0..grid)
            .map(|i| {
                let x = Angle::wrap(i as f64 / grid as f64);
                self.map.eval(x).distance(other.map.eval(x))
            })
            .fold(0.0, f64::max)
    }
}

/// Exceptional values of `g` as a configuration, reduced modulo the cyclic
/// relabelling `ℤ_n`.
pub fn exceptional_config(g: &OrbitPoint) -> Result<Configuration> {
    let analysis = analyze(g.map.clone())?;
    if analysis.n() == 0 {
        return Err(Error::NoExceptionalValues);
    }
    canonical_representative(&analysis.value_configuration()?, analysis.n())
}

/// `(R ∘ f ∘ h⁻¹; R(p₀), …, R(p_{n−1}))`.
pub fn pfact(
    h: &CircleDiffeo,
    r: &CircleDiffeo,
    f: &MapAnalysis,
) -> Result<(OrbitPoint, Configuration)> {
    if f.n() == 0 {
        return Err(Error::NoExceptionalValues);
    }
    let point = OrbitPoint::new(f.map().clone(), h.clone(), r.clone());
    let values = Configuration::new(f.values().iter().map(|&p| r.eval(p)).collect())?;
    Ok((point, values))
}

/// The configurations `σ^j(x)` over the orbit point `g = pfact(h, R).0`,
/// `x = pfact(h, R).1`, that are realized by some `(h′, R′)`.
///
/// `f` must have values `a/n`; the candidate `R′ = R ∘ rotation(j/n)` sends
/// `p_a` to `x_{a+j}`, and it is realized iff `R′⁻¹ ∘ g` is right-equivalent to `f`.
pub fn fiber(g: &OrbitPoint, x: &Configuration, f: &MapAnalysis) -> Result<Vec<Configuration>> {
    let n = f.n();
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let mut found = Vec::new();
    for j in 0..n {
        let r_j =
            g.r.compose(&CircleDiffeo::rotation(Angle::wrap(j as f64 / n as f64)));
        let pulled: Arc<dyn CircleMap> = Arc::new(ComposedMap::new(
            g.map.clone(),
            r_j.inverse(),
            CircleDiffeo::identity(),
        ));
        let candidate = analyze(pulled)?;
        if right_equivalence(f, &candidate)?.is_some() {
            found.push(sigma_shift(x, j as i64));
        }
    }
    Ok(found)
}

fn require_base_values(g: &OrbitPoint, n: usize) -> Result<()> {
    let analysis = analyze(g.map.clone())?;
    if analysis.n() != n || !analysis.is_normalized() {
        return Err(Error::NotNormalized);
    }
    Ok(())
}

/// `(σ(x) ∘ g, x)` for `g` with values `a/n` and `x ∈ F`.
pub fn homood(g: &OrbitPoint, x: &Configuration) -> Result<(OrbitPoint, Configuration)> {
    require_base_values(g, x.len())?;
    let sigma = interpolating_diffeo(x)?;
    Ok((g.post_compose(&sigma), x.clone()))
}

/// `(σ(x)⁻¹ ∘ g′, x)`.
pub fn homood_inverse(g: &OrbitPoint, x: &Configuration) -> Result<(OrbitPoint, Configuration)> {
    let sigma = interpolating_diffeo(x)?;
    Ok((g.post_compose(&sigma.inverse()), x.clone()))
}

/// Topological type of the orbit.
#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub twist: Option<TwistType>,
    pub product_form: String,
    /// The detected `k` counts rotations realized by right equivalence; the
    /// true symmetry order may be larger.
    pub k_is_lower_bound: bool,
    pub witnesses: Vec<f64>,
    pub note: String,
}

fn superscript(m: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    m.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

pub fn orbit_report(
    analysis: &MapAnalysis,
    symmetry: Option<&SymmetryInfo>,
) -> Result<StructureReport> {
    let n = analysis.n();
    if n == 0 {
        return Ok(StructureReport {
            n: 0,
            k: 1,
            d: 0,
            twist: None,
            product_form: "Orb_M = Orb_MS".into(),
            k_is_lower_bound: false,
            witnesses: Vec::new(),
            note: "no exceptional values: difShift is defined on all of D₊(S¹), a locally trivial fibering".into(),
        });
    }
    let symmetry = symmetry
        .ok_or_else(|| Error::InvalidParameter("symmetry data required for n ≥ 1".into()))?;
    let (k, d) = (symmetry.k, symmetry.d);
    let twist = twist_type(n, k)?;
    let sup = superscript(n - 1);
    let product_form = match twist {
        TwistType::Trivial => format!("Orb_M × S¹ × ℝ{sup}"),
        TwistType::Twisted => format!("Orb_M × S¹ ×̃ ℝ{sup}"),
    };
    Ok(StructureReport {
        n,
        k,
        d,
        twist: Some(twist),
        product_form,
        k_is_lower_bound: true,
        witnesses: symmetry.witnesses.iter().map(|w| w.residual).collect(),
        note: format!("values merged at {MERGE_TOL:e}; k counts detected rotation conjugacies"),
    })
}
