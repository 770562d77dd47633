//! Command-line front end.

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::acceptance::{run_all, AcceptanceConfig, DEFAULT_SEED};
use crate::circle::Angle;
use crate::config::{Configuration, SimplexPoint};
use crate::diffeo::{
    contract_fixing, evaluation_map, interpolating_diffeo, mu_build, CircleDiffeo,
};
use crate::error::Error;
use crate::export::{csv_floats, csv_table, fmt_f64, to_json};
use crate::fields::{dif_shift, global_field, stabilizer_residual, LocalFields};
use crate::maps::{
    analyze, normalize_exceptional, symmetry_group, CircleMap, CircleValuedMap, MapAnalysis,
    SymmetryInfo,
};
use crate::orbit::{exceptional_config, fiber, orbit_report, pfact};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Analyze,
    Section,
    Lift,
    Field,
    Orbit,
    Selfcheck,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "circle-stab",
    version,
    about = "Stabilizers and orbits of smooth circle maps"
)]
pub struct RunConfig {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Input JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file (analyze, orbit, selfcheck) or directory (section, lift, field).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Samples per table and residual grid.
    #[arg(long, default_value_t = 2048, value_parser = clap::value_parser!(u64).range(64..))]
    pub resolution: u64,
    /// Overrides the acceptance thresholds (selfcheck) or the residual bound (lift).
    #[arg(long, value_parser = positive_f64)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a positive tolerance")),
        Err(e) => Err(e.to_string()),
    }
}

/// A failed run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Acceptance(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Acceptance(m) => write!(f, "acceptance failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.exit_code() == 2 {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn read_input(cfg: &RunConfig) -> CliResult<Value> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Input("--input is required for this command".into()))?;
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("parse error: {e}")))
}

fn output_dir(cfg: &RunConfig) -> CliResult<&Path> {
    let dir = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::Input("--output directory is required for this command".into()))?;
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn emit_json(cfg: &RunConfig, value: &Value) -> CliResult<()> {
    let text = to_json(value);
    match &cfg.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// The map description, either bare or under a `"map"` key.
fn parse_map(v: &Value) -> CliResult<Arc<dyn CircleMap>> {
    let map = v.get("map").unwrap_or(v);
    Ok(Arc::new(CircleValuedMap::from_json(map)?))
}

/// `{"rotation": φ, "knots": [x₁, …]}`, read as `rotation(φ) ∘ μ`; both keys optional.
fn parse_diffeo(v: &Value) -> CliResult<CircleDiffeo> {
    let obj = v.as_object().ok_or_else(|| {
        CliError::Input(format!(
            "diffeomorphism must be given as an object, got {v}"
        ))
    })?;
    let rotation = match obj.get("rotation") {
        None => 0.0,
        Some(x) => x
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("rotation must be a number, got {x}")))?,
    };
    let mu = match obj.get("knots") {
        None => CircleDiffeo::identity(),
        Some(k) => {
            let knots: Vec<f64> = serde_json::from_value(k.clone())
                .map_err(|e| CliError::Input(format!("knots: {e}")))?;
            CircleDiffeo::monotone(mu_build(&SimplexPoint::new(knots)?)?)
        }
    };
    Ok(CircleDiffeo::rotation(Angle::new(rotation.rem_euclid(1.0))?).compose(&mu))
}

fn table_rows(table: &[[f64; 3]]) -> Vec<Vec<f64>> {
    table.iter().map(|r| r.to_vec()).collect()
}

/// Analysis of `f`, normalized to values `a/n` when `n ≥ 1`, with the normalizing diffeomorphism.
fn normalized(f: Arc<dyn CircleMap>) -> CliResult<(CircleDiffeo, MapAnalysis)> {
    let raw = analyze(f)?;
    if raw.n() == 0 {
        return Ok((CircleDiffeo::identity(), raw));
    }
    Ok(normalize_exceptional(raw.map().clone())?)
}

fn symmetry_of(a: &MapAnalysis) -> CliResult<Option<SymmetryInfo>> {
    if a.n() == 0 {
        return Ok(None);
    }
    Ok(Some(symmetry_group(a)?))
}

fn cmd_analyze(cfg: &RunConfig) -> CliResult<()> {
    let f = parse_map(&read_input(cfg)?)?;
    let raw = analyze(f.clone())?;
    let mut report = raw.report();
    let (_, norm) = normalized(f)?;
    let sym = symmetry_of(&norm)?;
    let structure = orbit_report(&norm, sym.as_ref())?;
    report["k"] = json!(structure.k);
    report["d"] = json!(structure.d);
    report["symmetry"] = json!(sym);
    report["structure"] = json!(structure);
    emit_json(cfg, &report)
}

fn cmd_section(cfg: &RunConfig) -> CliResult<()> {
    let input = read_input(cfg)?;
    let turns: Vec<f64> =
        serde_json::from_value(input.get("configuration").unwrap_or(&input).clone())
            .map_err(|e| CliError::Input(format!("configuration: {e}")))?;
    let c = Configuration::from_turns(&turns)?;
    let g = interpolating_diffeo(&c)?;
    let res = cfg.resolution as usize;
    let image = evaluation_map(&g, c.len());
    let dir = output_dir(cfg)?;
    write_file(
        &dir.join("section.csv"),
        &csv_floats(
            &["t", "lift", "derivative"],
            &table_rows(&g.sample_table(res)),
        ),
    )?;
    write_file(
        &dir.join("section.json"),
        &to_json(&json!({
            "configuration": c.turns(),
            "evaluation": image.turns(),
            "max_error": image.max_distance(&c),
            "resolution": res,
            "diffeomorphism": g.provenance(),
        })),
    )
}

fn cmd_lift(cfg: &RunConfig) -> CliResult<()> {
    let input = read_input(cfg)?;
    let f = parse_map(&input)?;
    let (normalizer, a) = normalized(f)?;
    let mut r = match input.get("target") {
        Some(t) => parse_diffeo(t)?,
        None => CircleDiffeo::identity(),
    };
    if let Some(s) = input.get("contract") {
        let s = s
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("contract must be a number, got {s}")))?;
        if a.n() == 0 {
            return Err(CliError::Input(
                "contract needs exceptional values to fix".into(),
            ));
        }
        r = contract_fixing(&r, a.values(), s)?;
    }
    let h = dif_shift(&a, &r)?;
    let res = cfg.resolution as usize;
    let residual = stabilizer_residual(a.map().as_ref(), &h, &r, res);
    let bound = cfg.tol.unwrap_or(1e-7);
    let dir = output_dir(cfg)?;
    let header = ["t", "lift", "derivative"];
    write_file(
        &dir.join("target.csv"),
        &csv_floats(&header, &table_rows(&r.sample_table(res))),
    )?;
    write_file(
        &dir.join("lift.csv"),
        &csv_floats(&header, &table_rows(&h.sample_table(res))),
    )?;
    write_file(
        &dir.join("lift.json"),
        &to_json(&json!({
            "n": a.n(),
            "values": a.values(),
            "normalization": normalizer.provenance(),
            "target": r.provenance(),
            "lift": h.provenance(),
            "residual": residual,
            "bound": bound,
            "within_bound": residual <= bound,
            "resolution": res,
        })),
    )
}

fn cmd_field(cfg: &RunConfig) -> CliResult<()> {
    let (normalizer, a) = normalized(parse_map(&read_input(cfg)?)?)?;
    let field = global_field(&a)?;
    let res = cfg.resolution as usize;
    let rows: Vec<Vec<String>> = (0..res)
        .map(|i| {
            let s = field.sample(i as f64 / res as f64);
            vec![
                fmt_f64(s.x),
                fmt_f64(s.v),
                fmt_f64(s.df),
                s.patch,
                fmt_f64(s.weight),
            ]
        })
        .collect();
    let radius = if a.n() > 0 {
        Some(LocalFields::new(&a)?.radius())
    } else {
        None
    };
    let dir = output_dir(cfg)?;
    write_file(
        &dir.join("field.csv"),
        &csv_table(&["x", "v", "df", "patch", "weight"], &rows),
    )?;
    write_file(
        &dir.join("field.json"),
        &to_json(&json!({
            "n": a.n(),
            "values": a.values(),
            "normalization": normalizer.provenance(),
            "level_classes": field.level_classes(),
            "signs": field.signs(),
            "patch_radius": radius,
            "resolution": res,
        })),
    )
}

fn cmd_orbit(cfg: &RunConfig) -> CliResult<()> {
    let input = read_input(cfg)?;
    let (_, a) = normalized(parse_map(&input)?)?;
    let sym = symmetry_of(&a)?;
    let structure = orbit_report(&a, sym.as_ref())?;
    let mut report = json!({"structure": structure});
    if a.n() > 0 {
        let h = input
            .get("h")
            .map(parse_diffeo)
            .transpose()?
            .unwrap_or_else(CircleDiffeo::identity);
        let r = input
            .get("target")
            .map(parse_diffeo)
            .transpose()?
            .unwrap_or_else(CircleDiffeo::identity);
        let (g, x) = pfact(&h, &r, &a)?;
        let c = exceptional_config(&g)?;
        let sheets = fiber(&g, &x, &a)?;
        report["pfact_configuration"] = json!(x.turns());
        report["exceptional_configuration"] = json!(c.turns());
        report["quotient_distance"] = json!(crate::config::quotient_distance(&c, &x, a.n())?);
        report["fiber"] = json!(sheets.iter().map(|s| s.turns()).collect::<Vec<_>>());
    }
    emit_json(cfg, &report)
}

fn cmd_selfcheck(cfg: &RunConfig) -> CliResult<()> {
    let results = run_all(&AcceptanceConfig {
        seed: cfg.seed,
        tol_override: cfg.tol,
    });
    for r in &results {
        eprintln!("{r}");
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("{} ({}: measured {:e})", r.id, r.name, r.measured))
        .collect();
    emit_json(
        cfg,
        &json!({
            "seed": cfg.seed,
            "passed": failed.is_empty(),
            "criteria": results,
        }),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Acceptance(format!(
            "failed criteria: {}",
            failed.join(", ")
        )))
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    match cfg.command {
        Command::Analyze => cmd_analyze(cfg),
        Command::Section => cmd_section(cfg),
        Command::Lift => cmd_lift(cfg),
        Command::Field => cmd_field(cfg),
        Command::Orbit => cmd_orbit(cfg),
        Command::Selfcheck => cmd_selfcheck(cfg),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_floor() {
        assert!(
            RunConfig::try_parse_from(["x", "--command", "analyze", "--resolution", "63"]).is_err()
        );
        let c = RunConfig::try_parse_from(["x", "--command", "lift"]).unwrap();
        assert_eq!(c.resolution, 2048);
        assert_eq!(c.command, Command::Lift);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(RunConfig::try_parse_from(["x", "--command", "selfcheck", "--tol", "0"]).is_err());
        assert!(
            RunConfig::try_parse_from(["x", "--command", "selfcheck", "--tol", "-1e-3"]).is_err()
        );
    }

    #[test]
    fn diffeo_descriptions() {
        let r = parse_diffeo(&json!({"rotation": 0.25})).unwrap();
        assert_eq!(r.lift(0.5), 0.75);
        let mu = parse_diffeo(&json!({"knots": [0.3]})).unwrap();
        assert!((mu.lift(0.5) - 0.3).abs() < 1e-12);
        assert!(parse_diffeo(&json!({"knots": [0.7, 0.2]})).is_err());
        assert!(parse_diffeo(&json!(3)).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::NoConvergence("x".into())).exit_code(),
            2
        );
        assert_eq!(CliError::from(Error::Parse("x".into())).exit_code(), 1);
        assert!(RunConfig::try_parse_from(["x", "--command", "bogus"]).is_err());
    }
}
