//! The acceptance suite: thirteen property checks over the explicit
//! constructions, each reporting a measured value against a threshold.

use rand::Rng;
use serde::Serialize;
use std::fmt;

use crate::circle::Angle;
use crate::config::{
    h_chart, orientation_sign_numeric, quotient_distance, s_section, twist_type, Configuration,
    SimplexPoint, TwistType,
};
use crate::diffeo::{
    contract_toward_identity, evaluation_map, interpolating_diffeo, mu_build, CircleDiffeo,
};
use crate::error::{Error, Result};
use crate::fields::{
    dif_shift, global_field, shift_times, stabilizer_section, LevelClass, LocalFields, FLOW_TOL,
};
use crate::maps::{analyze, catalog, normalize_exceptional, symmetry_group, MapAnalysis};
use crate::orbit::{
    exceptional_config, fiber, homood, homood_inverse, orbit_report, pfact, OrbitPoint,
};
use crate::sampling::{
    self, clustered_simplex, random_configuration, random_dcr, random_diffeo, random_simplex,
    SampleRng,
};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Clone, Copy, Debug)]
pub struct AcceptanceConfig {
    pub seed: u64,
    /// Replaces every criterion's threshold when set.
    pub tol_override: Option<f64>,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            seed: DEFAULT_SEED,
            tol_override: None,
        }
    }
}

impl AcceptanceConfig {
    fn tol(&self, default: f64) -> f64 {
        self.tol_override.unwrap_or(default)
    }

    fn rng(&self, id: u32) -> SampleRng {
        sampling::rng(self.seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: measured {:.3e} (threshold {:.1e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.threshold,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!("; {}", self.detail)
            }
        )
    }
}

/// Outcome of one criterion body: measured value, structural checks, notes.
struct Outcome {
    measured: f64,
    structural: bool,
    detail: String,
}

impl Outcome {
    fn value(measured: f64) -> Outcome {
        Outcome {
            measured,
            structural: true,
            detail: String::new(),
        }
    }

    fn check(mut self, ok: bool, what: &str) -> Outcome {
        if !ok {
            self.structural = false;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what);
        }
        self
    }
}

pub const CRITERIA: [(u32, &str); 13] = [
    (1, "configuration chart"),
    (2, "twist parity table"),
    (3, "monotone interpolant"),
    (4, "evaluation-map section"),
    (5, "difShift section"),
    (6, "section homomorphism"),
    (7, "flow cross-validation"),
    (8, "parity obstruction"),
    (9, "covering case"),
    (10, "symmetry detection"),
    (11, "contraction of D_cr"),
    (12, "orbit diagram"),
    (13, "homood round trip"),
];

fn default_threshold(id: u32) -> f64 {
    match id {
        1 => 1e-12,
        2 => 0.0,
        3 | 4 => 1e-10,
        5 | 6 => 1e-7,
        7 => 1e-6,
        8 => 1e-12,
        9 => 1e-12,
        10 => 1e-8,
        11 => 1e-12,
        12 | 13 => 1e-9,
        _ => f64::NAN,
    }
}

/// Runs criterion `id` (1–13).
pub fn run_criterion(id: u32, cfg: &AcceptanceConfig) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .ok_or_else(|| Error::InvalidParameter(format!("no criterion {id}")))?;
    let threshold = cfg.tol(default_threshold(id));
    let mut rng = cfg.rng(id);
    let outcome = match id {
        1 => chart(&mut rng),
        2 => parity_table(),
        3 => monotone(&mut rng),
        4 => section(&mut rng),
        5 => dif_shift_section(&mut rng),
        6 => homomorphism(&mut rng),
        7 => flow_cross_validation(&mut rng),
        8 => parity_obstruction(),
        9 => covering_case(&mut rng),
        10 => symmetry(),
        11 => contraction(&mut rng),
        12 => diagram(&mut rng),
        _ => homood_round_trip(&mut rng),
    };
    let (measured, structural, detail) = match outcome {
        Ok(o) => (o.measured, o.structural, o.detail),
        Err(e) => (f64::INFINITY, false, format!("error: {e}")),
    };
    Ok(CriterionResult {
        id,
        name,
        passed: structural && measured <= threshold,
        measured,
        threshold,
        detail,
    })
}

pub fn run_all(cfg: &AcceptanceConfig) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|(id, _)| run_criterion(*id, cfg).expect("listed criterion"))
        .collect()
}

fn chart(rng: &mut SampleRng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for _ in 0..100 {
            let c = random_configuration(rng, n, 1e-3)?;
            let (phi, t) = h_chart(&c)?;
            worst = worst.max(s_section(phi, &t).max_distance(&c));

            let phi = Angle::wrap(rng.gen::<f64>());
            let t = random_simplex(rng, n, 1e-3)?;
            let (phi2, t2) = h_chart(&s_section(phi, &t))?;
            worst = worst.max(phi2.distance(phi)).max(t2.max_distance(&t));
        }
    }
    Ok(Outcome::value(worst))
}

fn parity_table() -> Result<Outcome> {
    let mut mismatches = 0;
    for n in 1..=6usize {
        for d in (1..=n).filter(|d| n % d == 0) {
            let sign = orientation_sign_numeric(n, d)?;
            let expected = if n % 2 == 0 && d % 2 == 1 { -1 } else { 1 };
            let twisted = twist_type(n, n / d)? == TwistType::Twisted;
            if sign != expected || twisted != (sign == -1) {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::value(mismatches as f64))
}

fn monotone(rng: &mut SampleRng) -> Result<Outcome> {
    const GRID: usize = 1000;
    let mut worst: f64 = 0.0;
    let mut positive = true;
    for n in 1..=6 {
        // property 4 at the base point
        let base = mu_build(&SimplexPoint::base(n))?;
        for i in 0..=GRID {
            let t = -0.25 + 1.5 * i as f64 / GRID as f64;
            worst = worst.max((base.value(t) - t).abs());
        }
        for j in 0..100 {
            let knots = if j % 4 == 0 {
                clustered_simplex(rng, n, 1e-3)?
            } else {
                random_simplex(rng, n, 1e-3)?
            };
            let mu = mu_build(&knots)?;
            for i in 0..=GRID {
                let t = -0.25 + 1.5 * i as f64 / GRID as f64;
                positive &= mu.derivative(t) > 0.0;
                if t <= 0.0 || t >= 1.0 {
                    worst = worst.max((mu.value(t) - t).abs());
                }
            }
            for (k, &x) in knots.coords().iter().enumerate() {
                worst = worst.max((mu.value((k + 1) as f64 / n as f64) - x).abs());
            }
        }
    }
    Ok(Outcome::value(worst).check(positive, "μ′ not positive on the grid"))
}

fn section(rng: &mut SampleRng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 1..=6 {
        for j in 0..100 {
            let gap = if j % 4 == 0 { 1e-3 } else { 0.0 };
            let c = random_configuration(rng, n, gap)?;
            let g = interpolating_diffeo(&c)?;
            worst = worst.max(evaluation_map(&g, n).max_distance(&c));
        }
    }
    Ok(Outcome::value(worst))
}

fn grid_points(res: usize) -> impl Iterator<Item = f64> {
    (0..res).map(move |i| i as f64 / res as f64)
}

fn normalized(f: std::sync::Arc<dyn crate::maps::CircleMap>) -> Result<MapAnalysis> {
    Ok(normalize_exceptional(f)?.1)
}

fn dif_shift_section(rng: &mut SampleRng) -> Result<Outcome> {
    let a = normalized(catalog::single_sine())?;
    let f = a.map().as_ref();
    let identity_exact = dif_shift(&a, &CircleDiffeo::identity())?
        .sample_table(2048)
        .iter()
        .all(|[t, y, _]| t == y);
    let mut worst: f64 = 0.0;
    let mut positive = true;
    for _ in 0..20 {
        let r = random_dcr(rng, 2)?;
        let h = dif_shift(&a, &r)?;
        for x in grid_points(2048) {
            let x = Angle::wrap(x);
            worst = worst.max(r.eval(f.eval(x)).distance(f.eval(h.eval(x))));
            positive &= h.derivative(x.value()) > 0.0;
        }
    }
    Ok(Outcome::value(worst)
        .check(identity_exact, "difShift(id) differs from the identity")
        .check(positive, "difShift(R)′ not positive"))
}

fn homomorphism(rng: &mut SampleRng) -> Result<Outcome> {
    let a = normalized(catalog::single_sine())?;
    let f = a.map().as_ref();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let (r1, r2) = (random_dcr(rng, 2)?, random_dcr(rng, 2)?);
        let joint = stabilizer_section(&a, &r1.compose(&r2))?;
        let prod = stabilizer_section(&a, &r1)?.compose(&stabilizer_section(&a, &r2)?, f);
        worst = worst
            .max(joint.h_m.grid_distance(&prod.h_m, 2048))
            .max(joint.r.grid_distance(&prod.r, 2048));
    }
    Ok(Outcome::value(worst))
}

fn flow_cross_validation(rng: &mut SampleRng) -> Result<Outcome> {
    let a = normalized(catalog::single_sine())?;
    let fields = LocalFields::new(&a)?;
    let mut worst: f64 = 0.0;
    let (mut regular, mut exceptional) = (0, 0);
    for _ in 0..180 {
        let r = random_dcr(rng, 2)?;
        let h = dif_shift(&a, &r)?;
        let x = Angle::wrap(rng.gen::<f64>());
        let times = shift_times(&a, &r, x)?;
        let moved = match (times.level, times.exceptional) {
            (Some(b), Some(lam)) => {
                exceptional += 1;
                fields.flow_exceptional(b, x, lam, FLOW_TOL)?
            }
            _ => {
                regular += 1;
                fields.flow_regular(times.arc, x, times.regular.expect("always set"), FLOW_TOL)?
            }
        };
        worst = worst.max(moved.distance(h.eval(x)));
    }
    // the remaining 20 points are drawn inside the exceptional patches
    for b in 0..a.n() {
        for _ in 0..10 {
            let r = random_dcr(rng, 2)?;
            let h = dif_shift(&a, &r)?;
            let level = &a.levels()[b];
            let p = level.points[rng.gen_range(0..level.points.len())].t;
            let side = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let x = p.rotate(side * (1e-4 + 0.05 * rng.gen::<f64>()));
            let times = shift_times(&a, &r, x)?;
            let moved = match (times.level, times.exceptional) {
                (Some(lb), Some(lam)) => {
                    exceptional += 1;
                    fields.flow_exceptional(lb, x, lam, FLOW_TOL)?
                }
                _ => {
                    regular += 1;
                    fields.flow_regular(
                        times.arc,
                        x,
                        times.regular.expect("always set"),
                        FLOW_TOL,
                    )?
                }
            };
            worst = worst.max(moved.distance(h.eval(x)));
        }
    }
    let mut out = Outcome::value(worst).check(
        regular > 0 && exceptional > 0,
        "both flow kinds must be exercised",
    );
    out.detail = format!("{regular} regular, {exceptional} exceptional");
    Ok(out)
}

fn parity_obstruction() -> Result<Outcome> {
    let a = normalized(catalog::single_sine())?;
    let field = global_field(&a)?;
    let classes = field.level_classes();
    let alternating = classes.len() == 2 && (0..2).all(|i| classes[i] != classes[(i + 1) % 2]);
    let signs = field.signs();
    let radius = LocalFields::new(&a)?.radius();
    let mut worst: f64 = 0.0;
    let mut nonzero = true;
    for x in grid_points(4096) {
        let v = a.map().eval(Angle::wrap(x));
        let near = (0..a.n()).find(|&b| v.distance(a.values()[b]) < radius);
        let df = field.df(x);
        match near {
            Some(b) => worst = worst.max((df - signs[b] * v.sub(a.values()[b])).abs()),
            None => nonzero &= df != 0.0,
        }
    }
    let odd = analyze(catalog::odd_three())?;
    let obstructed = matches!(global_field(&odd), Err(Error::ParityObstruction { n: 3 }));
    let mut out = Outcome::value(worst)
        .check(alternating, "level classes do not alternate")
        .check(
            classes.first() == Some(&LevelClass::Reflective),
            "level 0 is not reflective",
        )
        .check(nonzero, "df(V) vanishes off the exceptional levels")
        .check(
            odd.n() == 3,
            "odd example does not have three exceptional values",
        )
        .check(
            obstructed,
            "odd example did not raise the parity obstruction",
        );
    if out.detail.is_empty() {
        out.detail = "n = 3 obstructed".into();
    }
    Ok(out)
}

fn covering_case(rng: &mut SampleRng) -> Result<Outcome> {
    let a = analyze(catalog::covering())?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let alpha = rng.gen::<f64>();
        let h = dif_shift(&a, &CircleDiffeo::rotation(Angle::wrap(alpha)))?;
        worst = worst.max(h.grid_distance(&CircleDiffeo::rotation(Angle::wrap(alpha / 2.0)), 2048));
    }
    let form = orbit_report(&a, None)?.product_form;
    Ok(Outcome::value(worst).check(form == "Orb_M = Orb_MS", "unexpected product form"))
}

fn symmetry() -> Result<Outcome> {
    let sym = symmetry_group(&normalized(catalog::double_sine())?)?;
    let half = sym.n / 2;
    let witness = sym.witnesses.iter().find(|w| w.shift == half);
    let residual = witness.map_or(f64::INFINITY, |w| w.residual);
    let generic = symmetry_group(&normalized(catalog::generic_perturbed())?)?;
    let subgroup = |shifts: &[usize], n: usize| {
        shifts.contains(&0)
            && shifts
                .iter()
                .all(|&a| shifts.iter().all(|&b| shifts.contains(&((a + b) % n))))
    };
    Ok(Outcome::value(residual)
        .check(witness.is_some(), "no conjugacy at shift n/2")
        .check(sym.k % 2 == 0, "k is odd for the symmetric example")
        .check(generic.k == 1, "generic map has nontrivial symmetry")
        .check(
            subgroup(&sym.shifts, sym.n) && subgroup(&generic.shifts, generic.n),
            "shift set is not a subgroup",
        ))
}

fn contraction(rng: &mut SampleRng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..20 {
        let n = rng.gen_range(1..=6);
        let g = random_dcr(rng, n)?;
        for j in 0..=10 {
            let s = j as f64 / 10.0;
            let c = contract_toward_identity(&g, s, n)?;
            for a in 0..n {
                let p = Angle::wrap(a as f64 / n as f64);
                worst = worst.max(c.eval(p).distance(p));
            }
            if j == 0 {
                exact &= c.grid_distance(&g, 512) == 0.0;
            }
            if j == 10 {
                exact &= c.is_identity();
            }
        }
    }
    Ok(Outcome::value(worst).check(exact, "path endpoints are not exact"))
}

fn diagram(rng: &mut SampleRng) -> Result<Outcome> {
    let single = normalized(catalog::single_sine())?;
    let double = normalized(catalog::double_sine())?;
    let mut worst: f64 = 0.0;
    for j in 0..50 {
        let f = if j % 2 == 0 { &single } else { &double };
        let h = random_diffeo(rng, 3, 0.1)?;
        let r = random_diffeo(rng, 3, 0.1)?;
        let (g, x) = pfact(&h, &r, f)?;
        worst = worst.max(quotient_distance(&exceptional_config(&g)?, &x, f.n())?);
    }
    let k = symmetry_group(&double)?.k;
    let (g, x) = pfact(
        &random_diffeo(rng, 3, 0.1)?,
        &random_diffeo(rng, 3, 0.1)?,
        &double,
    )?;
    let sheets = fiber(&g, &x, &double)?.len();
    let mut out = Outcome::value(worst).check(sheets == k, "fiber size differs from k");
    out.detail = format!("fiber {sheets} sheets, k = {k}");
    Ok(out)
}

fn homood_round_trip(rng: &mut SampleRng) -> Result<Outcome> {
    let f = normalized(catalog::single_sine())?;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let g = OrbitPoint::new(
            f.map().clone(),
            random_diffeo(rng, 3, 0.1)?,
            CircleDiffeo::identity(),
        );
        let x: Configuration = random_configuration(rng, 2, 0.02)?;
        let (moved, x1) = homood(&g, &x)?;
        let (back, x2) = homood_inverse(&moved, &x1)?;
        worst = worst
            .max(back.grid_distance(&g, 1024))
            .max(x2.max_distance(&x));
    }
    Ok(Outcome::value(worst))
}
