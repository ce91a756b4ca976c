//! Scenario files: TOML with `--set key=value` overrides applied before validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::{Table, Value};
use wavesig::waves::Potential;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    AnalyticDemo,
    KgVsSchrodinger,
    Moments,
    EigenSolve,
    Reconstruct,
    MomentumProb,
}

impl Experiment {
    fn needs_time_grid(self) -> bool {
        !matches!(self, Experiment::EigenSolve | Experiment::MomentumProb)
    }

    fn needs_initial_state(self) -> bool {
        self != Experiment::EigenSolve
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = Value::try_from(self).map_err(|_| fmt::Error)?;
        write!(f, "{}", v.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSpec {
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "default_light_speed")]
    pub light_speed: f64,
    #[serde(default = "one")]
    pub hbar: f64,
}

impl Default for ParticleSpec {
    fn default() -> Self {
        Self {
            mass: 1.0,
            light_speed: default_light_speed(),
            hbar: 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn default_light_speed() -> f64 {
    10.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub count: usize,
    /// Propagation length for `kg_vs_schrodinger`; window experiments use the window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub space: SpaceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    Gaussian { k0: f64, sigma: f64, x0: f64 },
    /// Level index, ground state `n = 0`.
    Eigen { n: usize },
    Superposition { coefficients: Vec<Coefficient> },
    /// `count` seeded random coefficients over the lowest levels.
    RandomSuperposition { count: usize },
    /// Spatial slice in the field text format, on the scenario grid.
    Tabulated { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentSpec {
    BeatCommensurate,
    Plain,
    Tapered,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub alignment: AlignmentSpec,
    /// Fixed half-width `T` (plain and tapered windows).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Lower bound on `T` when searching for a beat-commensurate width.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_half_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_max_order")]
    pub max_order: usize,
    #[serde(default = "default_states")]
    pub n_states: usize,
    /// Bound on the relative L2 Klein-Gordon/Schrodinger discrepancy.
    #[serde(default = "default_discrepancy")]
    pub max_discrepancy: f64,
    /// Bound on the relative eigenvalue error against closed forms.
    #[serde(default = "default_eigen_error")]
    pub max_eigen_error: f64,
    /// Number of on-grid temporal lines in the analytic-signal demo.
    #[serde(default = "default_lines")]
    pub lines: usize,
    /// Write SVG snapshots next to the tables.
    #[serde(default)]
    pub plots: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_order: default_max_order(),
            n_states: default_states(),
            max_discrepancy: default_discrepancy(),
            max_eigen_error: default_eigen_error(),
            lines: default_lines(),
            plots: false,
        }
    }
}

fn default_max_order() -> usize {
    4
}

fn default_states() -> usize {
    6
}

fn default_discrepancy() -> f64 {
    1e-3
}

fn default_eigen_error() -> f64 {
    1e-3
}

fn default_lines() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    LightSpeed,
    /// Number of spatial samples; the fit uses the resulting grid step.
    GridDensity,
    /// Time step of `kg_vs_schrodinger`; sets `grid.time.count` for the fixed duration.
    Dt,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = Value::try_from(self).map_err(|_| fmt::Error)?;
        write!(f, "{}", v.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Checked against the fitted log-log slope when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_exponent: Option<f64>,
    #[serde(default = "default_exponent_tolerance")]
    pub tolerance: f64,
}

fn default_exponent_tolerance() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub particle: ParticleSpec,
    pub potential: Potential,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowSpec>,
    #[serde(default)]
    pub options: Options,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// Command-line overrides, applied in order after the file is read.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub set: Vec<String>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// Set `a.b.c = value`, creating intermediate tables. The value is parsed as TOML and
/// taken as a bare string if that fails.
pub fn set_path(table: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got `{assignment}`")))?;
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.trim().to_string()));
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("bad key `{key}`")));
    }
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("`{part}` in `{key}` is not a table")))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn lookup<'a>(table: &'a Table, path: &str) -> Option<&'a Value> {
    let mut parts = path.split('.');
    let mut value = table.get(parts.next()?)?;
    for part in parts {
        value = value.as_table()?.get(part)?;
    }
    Some(value)
}

/// Required keys missing from `table`, as dotted paths.
pub fn missing_fields(table: &Table) -> Vec<String> {
    let mut required = vec![
        "experiment",
        "output_dir",
        "potential.kind",
        "grid.space.min",
        "grid.space.max",
        "grid.space.count",
    ];
    let experiment = lookup(table, "experiment")
        .and_then(|v| v.clone().try_into::<Experiment>().ok());
    if let Some(e) = experiment {
        if e.needs_time_grid() {
            required.push("grid.time.count");
        }
        if e == Experiment::KgVsSchrodinger {
            required.push("grid.time.duration");
        }
        if e.needs_initial_state() {
            required.push("initial_state.kind");
        }
    }
    required
        .into_iter()
        .filter(|p| lookup(table, p).is_none())
        .map(String::from)
        .collect()
}

pub fn apply_overrides(table: &mut Table, overrides: &Overrides) -> Result<(), CliError> {
    for s in &overrides.set {
        set_path(table, s)?;
    }
    if let Some(out) = &overrides.out {
        table.insert("output_dir".into(), Value::String(out.display().to_string()));
    }
    if let Some(seed) = overrides.seed {
        let seed = i64::try_from(seed).map_err(|_| CliError::Usage("seed must fit in i64".into()))?;
        table.insert("seed".into(), Value::Integer(seed));
    }
    Ok(())
}

/// Deserialize and validate. Relative `tabulated` paths resolve against `base`.
pub fn from_table(table: Table, base: &Path) -> Result<ScenarioConfig, CliError> {
    let missing = missing_fields(&table);
    if !missing.is_empty() {
        return Err(CliError::Usage(format!(
            "missing required fields: {}",
            missing.join(", ")
        )));
    }
    let mut config: ScenarioConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("invalid config: {e}")))?;
    if let Some(InitialState::Tabulated { file }) = &mut config.initial_state {
        if file.is_relative() {
            *file = base.join(&*file);
        }
    }
    validate(&config)?;
    Ok(config)
}

fn invalid(path: &str, msg: impl fmt::Display) -> CliError {
    CliError::Usage(format!("{path}: {msg}"))
}

pub fn validate(c: &ScenarioConfig) -> Result<(), CliError> {
    let p = &c.particle;
    for (name, v) in [("mass", p.mass), ("light_speed", p.light_speed), ("hbar", p.hbar)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(&format!("particle.{name}"), "must be positive and finite"));
        }
    }
    c.potential
        .validate()
        .map_err(|e| invalid("potential", e))?;
    let s = &c.grid.space;
    if !(s.min < s.max) {
        return Err(invalid("grid.space", "min must be below max"));
    }
    if s.count < 4 {
        return Err(invalid("grid.space.count", "need at least 4 samples"));
    }
    if let Some(t) = &c.grid.time {
        if t.count < 4 {
            return Err(invalid("grid.time.count", "need at least 4 samples"));
        }
        if let Some(d) = t.duration {
            if !(d > 0.0 && d.is_finite()) {
                return Err(invalid("grid.time.duration", "must be positive"));
            }
        }
    }
    if c.options.max_order > 8 {
        log::warn!("options.max_order = {} exceeds 8; high moments amplify leakage", c.options.max_order);
    }
    match c.experiment {
        Experiment::KgVsSchrodinger | Experiment::AnalyticDemo | Experiment::MomentumProb
            if c.potential.constant_value() != Some(0.0) =>
        {
            return Err(invalid(
                "potential.kind",
                format!("{} needs the zero potential on a periodic grid", c.experiment),
            ));
        }
        Experiment::EigenSolve | Experiment::Reconstruct if c.potential.constant_value().is_some() => {
            return Err(invalid(
                "potential.kind",
                format!("{} needs a confining potential with walls", c.experiment),
            ));
        }
        _ => {}
    }
    if c.experiment == Experiment::Reconstruct {
        match &c.initial_state {
            Some(InitialState::Eigen { .. })
            | Some(InitialState::Superposition { .. })
            | Some(InitialState::RandomSuperposition { .. }) => {}
            _ => {
                return Err(invalid(
                    "initial_state.kind",
                    "reconstruct needs eigen, superposition or random_superposition",
                ))
            }
        }
    }
    let in_eigenbasis = matches!(
        c.initial_state,
        Some(InitialState::Eigen { .. } | InitialState::Superposition { .. } | InitialState::RandomSuperposition { .. })
    );
    if in_eigenbasis && c.potential.constant_value().is_some() {
        return Err(invalid("initial_state.kind", "eigenstates need a confining potential with walls"));
    }
    match &c.initial_state {
        Some(InitialState::Gaussian { sigma, .. }) if !(*sigma > 0.0) => {
            return Err(invalid("initial_state.sigma", "must be positive"));
        }
        Some(InitialState::Superposition { coefficients }) => {
            if coefficients.is_empty() {
                return Err(invalid("initial_state.coefficients", "must not be empty"));
            }
        }
        Some(InitialState::RandomSuperposition { count }) if *count == 0 => {
            return Err(invalid("initial_state.count", "must be at least 1"));
        }
        Some(InitialState::Tabulated { file }) if !file.exists() => {
            return Err(invalid("initial_state.file", format!("{} does not exist", file.display())));
        }
        _ => {}
    }
    if let Some(w) = &c.window {
        match (w.alignment, w.half_width) {
            (AlignmentSpec::Plain | AlignmentSpec::Tapered, None) => {
                return Err(invalid("window.half_width", "required for plain and tapered windows"));
            }
            (_, Some(h)) if !(h > 0.0) => return Err(invalid("window.half_width", "must be positive")),
            _ => {}
        }
    }
    Ok(())
}
