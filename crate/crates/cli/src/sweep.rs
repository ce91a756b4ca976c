//! Parameter sweeps: one run per value in its own subdirectory, merged in value order,
//! with a log-log power-law fit of the experiment's headline metric.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use toml::{Table, Value};

use crate::config::{self, Experiment, ScenarioConfig, SweepParameter, SweepSpec};
use crate::experiments::{self, sweep_metric};
use crate::report::{self, RunReport};
use crate::scenario;
use crate::svg::{line_plot, Scale, Series};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLaw {
    pub exponent: f64,
    /// One standard error of the slope; zero with only two points.
    pub standard_error: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Option<PowerLaw> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = ly.iter().map(|b| (b - my).powi(2)).sum();
    let standard_error = if lx.len() > 2 { (ss_res / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Some(PowerLaw {
        exponent: slope,
        standard_error,
        prefactor: intercept.exp(),
        r_squared: if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    /// Independent variable of the fit: `c`, the grid step or the time step.
    pub x: f64,
    pub metric: f64,
    pub pass: bool,
    pub dir: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub experiment: String,
    pub parameter: SweepParameter,
    pub metric: String,
    pub pass: bool,
    pub points: Vec<SweepPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<PowerLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_exponent: Option<f64>,
    pub tolerance: f64,
    pub confidence: String,
}

fn set(table: &mut Table, path: &str, value: Value) {
    let mut node = table;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        node = node
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .expect("validated config tables");
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
}

/// The scenario for one sweep value, and the fit's independent variable.
fn point_config(
    base: &Table,
    config: &ScenarioConfig,
    spec: &SweepSpec,
    index: usize,
    value: f64,
    base_dir: &Path,
) -> Result<(ScenarioConfig, f64), CliError> {
    let mut table = base.clone();
    match spec.parameter {
        SweepParameter::LightSpeed => set(&mut table, "particle.light_speed", Value::Float(value)),
        SweepParameter::GridDensity => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(CliError::Usage(format!("sweep.values: grid density {value} is not a sample count")));
            }
            set(&mut table, "grid.space.count", Value::Integer(value as i64));
        }
        SweepParameter::Dt => {
            let duration = config.grid.time.and_then(|t| t.duration).ok_or_else(|| {
                CliError::Usage("grid.time.duration: required for a dt sweep".into())
            })?;
            let count = (duration / value).round() as i64 + 1;
            set(&mut table, "grid.time.count", Value::Integer(count));
        }
    }
    let dir = base_dir.join(format!("{index:02}-{}-{value}", spec.parameter));
    set(&mut table, "output_dir", Value::String(dir.display().to_string()));
    let run = config::from_table(table, Path::new("."))?;
    let x = match spec.parameter {
        SweepParameter::LightSpeed => value,
        SweepParameter::GridDensity => scenario::space_axis(&run)?.step(),
        SweepParameter::Dt => {
            let t = run.grid.time.expect("validated");
            t.duration.expect("validated") / (t.count - 1) as f64
        }
    };
    Ok((run, x))
}

pub fn run(base: Table, config: &ScenarioConfig, jobs: Option<usize>) -> Result<(SweepReport, Vec<RunReport>), CliError> {
    let spec = config
        .sweep
        .clone()
        .ok_or_else(|| CliError::Usage("sweep: give [sweep] in the config or --param and --values".into()))?;
    let metric = sweep_metric(config.experiment).ok_or_else(|| {
        CliError::Usage(format!("experiment {} has no sweep metric", config.experiment))
    })?;
    if spec.values.len() < 3 {
        return Err(CliError::Usage(format!(
            "sweep.values: need at least 3 values for a fit, got {}",
            spec.values.len()
        )));
    }
    if spec.parameter == SweepParameter::Dt && config.experiment != Experiment::KgVsSchrodinger {
        return Err(CliError::Usage("sweep.parameter: dt applies to kg_vs_schrodinger only".into()));
    }
    let base_dir = config.output_dir.clone();
    let configs: Vec<(ScenarioConfig, f64)> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| point_config(&base, config, &spec, i, *v, &base_dir))
        .collect::<Result<_, _>>()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let reports: Vec<RunReport> = pool.install(|| {
        configs
            .par_iter()
            .map(|(c, _)| experiments::run(c.clone()))
            .collect::<Result<_, _>>()
    })?;

    let points: Vec<SweepPoint> = reports
        .iter()
        .zip(&configs)
        .zip(&spec.values)
        .map(|((r, (c, x)), v)| SweepPoint {
            value: *v,
            x: *x,
            metric: r.metric_value(metric).unwrap_or(f64::NAN),
            pass: r.pass,
            dir: c.output_dir.display().to_string(),
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.metric).collect();
    let fit = fit_power_law(&xs, &ys);
    let exponent_ok = match (spec.expected_exponent, fit) {
        (Some(want), Some(f)) => (f.exponent - want).abs() <= spec.tolerance,
        (Some(_), None) => false,
        (None, _) => true,
    };
    let confidence = match fit {
        None => format!("no fit: {metric} must be positive at every point"),
        Some(f) => {
            let mut note = format!(
                "exponent {:.3} +/- {:.3} (one standard error, {} points, R^2 = {:.4})",
                f.exponent,
                f.standard_error,
                xs.len(),
                f.r_squared
            );
            if xs.len() < 5 {
                note.push_str("; few points, treat the standard error as rough");
            }
            if let Some(want) = spec.expected_exponent {
                note.push_str(&format!("; expected {want} +/- {}", spec.tolerance));
            }
            note
        }
    };
    let pass = exponent_ok && points.iter().all(|p| p.pass);
    let report = SweepReport {
        experiment: config.experiment.to_string(),
        parameter: spec.parameter,
        metric: metric.to_string(),
        pass,
        points,
        fit,
        expected_exponent: spec.expected_exponent,
        tolerance: spec.tolerance,
        confidence,
    };
    write(&report, &base_dir, config.options.plots)?;
    Ok((report, reports))
}

fn write(report: &SweepReport, dir: &Path, plots: bool) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("sweep.toml"), toml::to_string(report)?)?;
    let mut table = report::Table::new(&["value", "x", "metric"]);
    for p in &report.points {
        table.push(vec![p.value, p.x, p.metric]);
    }
    std::fs::write(dir.join("sweep.tsv"), table.to_tsv())?;
    if plots {
        let mut series = vec![Series {
            label: "measured",
            points: report.points.iter().map(|p| (p.x, p.metric)).collect(),
        }];
        if let Some(f) = report.fit {
            series.push(Series {
                label: "fit",
                points: report.points.iter().map(|p| (p.x, f.prefactor * p.x.powf(f.exponent))).collect(),
            });
        }
        let svg = line_plot(&report.confidence, &report.parameter.to_string(), &report.metric, &series, Scale::LogLog);
        std::fs::write(dir.join("sweep.svg"), svg)?;
    }
    Ok(())
}
