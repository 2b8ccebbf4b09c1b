//! Scenario-driven verification for `cav-core`.
//!
//! A scenario is a TOML file declaring grids, rational maps, sampled
//! functions, duality setups, representative functions, operator graphs and
//! a list of checks. [`run_file`] validates it, runs the checks and returns a
//! [`Report`] that renders to text and JSON.

pub mod build;
pub mod report;
pub mod run;
pub mod scenario;
pub mod suites;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

pub use build::{build, Model};
pub use report::{render_json, render_text, Report};
pub use run::{exit_code, run_checks, CheckResult, Options, Verdict};

/// Anything that makes a scenario unusable; maps to exit code 2.
#[derive(Clone, Debug, PartialEq)]
pub enum InputError {
    Io(String),
    Parse(scenario::ParseError),
    Invalid(build::Invalid),
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputError::Io(m) => write!(f, "{m}"),
            InputError::Parse(e) => write!(f, "parse error at {e}"),
            InputError::Invalid(e) => write!(f, "invalid scenario: {e}"),
        }
    }
}

impl std::error::Error for InputError {}

pub fn load_str(src: &str, max_cells: usize) -> Result<Model, InputError> {
    let s = scenario::parse(src).map_err(InputError::Parse)?;
    build(&s, max_cells).map_err(InputError::Invalid)
}

pub fn load(path: &Path, max_cells: usize) -> Result<Model, InputError> {
    let src = fs::read_to_string(path).map_err(|e| InputError::Io(format!("{}: {e}", path.display())))?;
    load_str(&src, max_cells)
}

pub fn run_model(m: &Model, o: &Options) -> Report {
    let results = run_checks(m, o);
    Report {
        scenario: m.name.clone(),
        description: m.description.clone(),
        seed: o.seed,
        tol_scale: o.tol_scale,
        exit_code: exit_code(&results),
        results,
    }
}

pub fn run_file(path: &Path, o: &Options) -> Result<Report, InputError> {
    if !(o.tol_scale.is_finite() && o.tol_scale > 0.0) {
        return Err(InputError::Invalid(build::Invalid(format!(
            "--tol-scale must be positive and finite, got {}",
            o.tol_scale
        ))));
    }
    Ok(run_model(&load(path, o.max_cells)?, o))
}

/// Writes `<name>.txt` and `<name>.json` into `dir`.
pub fn write_reports(rep: &Report, dir: &Path) -> Result<(PathBuf, PathBuf), InputError> {
    let io = |e: std::io::Error| InputError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    let txt = dir.join(format!("{}.txt", rep.scenario));
    let js = dir.join(format!("{}.json", rep.scenario));
    fs::write(&txt, render_text(rep)).map_err(io)?;
    fs::write(&js, render_json(rep)).map_err(io)?;
    Ok((txt, js))
}

/// Directory holding the scenarios shipped with the crate.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

/// Bundled scenario files in name order.
pub fn bundled_scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(bundled_dir())
        .map(|d| {
            d.filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}
