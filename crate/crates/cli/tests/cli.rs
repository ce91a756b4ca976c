use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn wavesig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavesig"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_scenario(name: &str, out: &Path, extra: &[&str]) -> Output {
    let config = scenario(name);
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    wavesig(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A scenario file in `dir` built from `base` with its initial state replaced.
fn with_state(base: &str, dir: &Path, state: &str) -> PathBuf {
    let text = std::fs::read_to_string(scenario(base)).unwrap();
    let kept: String = text.split("[initial_state]").next().unwrap().to_string()
        + "[initial_state]\n"
        + state
        + "\n"
        + text.split("[options]").nth(1).map(|o| format!("\n[options]{o}")).unwrap_or_default().as_str();
    let path = dir.join("scenario.toml");
    std::fs::write(&path, kept).unwrap();
    path
}

fn report(dir: &Path) -> toml::Table {
    std::fs::read_to_string(dir.join("report.toml")).unwrap().parse().unwrap()
}

fn sweep_exponent(dir: &Path) -> f64 {
    let t: toml::Table = std::fs::read_to_string(dir.join("sweep.toml")).unwrap().parse().unwrap();
    t["fit"]["exponent"].as_float().unwrap()
}

#[test]
fn empty_config_lists_required_fields() {
    let o = wavesig(&["run"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for field in ["experiment", "output_dir", "potential.kind", "grid.space.count"] {
        assert!(err.contains(field), "{field} missing from: {err}");
    }
}

#[test]
fn unknown_and_mistyped_fields_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let o = run_scenario("eigen_well.toml", dir.path(), &["--set", "options.n_state=3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n_state"));
    let o = run_scenario("eigen_well.toml", dir.path(), &["--set", "grid.space.count=\"many\""]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconstruct_recovers_the_pair_probabilities() {
    let dir = TempDir::new().unwrap();
    let o = run_scenario("reconstruct_pair.toml", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("P = (0.360000, 0.640000)"));
    let r = report(dir.path());
    assert_eq!(r["pass"].as_bool(), Some(true));
    let names: Vec<&str> = r["invariant"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    let mut unique = names.clone();
    unique.dedup();
    assert_eq!(names.len(), unique.len());
    assert!(names.contains(&"probability_error"));
    assert!(dir.path().join("distribution.tsv").exists());
    assert!(dir.path().join("reconstruction.toml").exists());
}

#[test]
fn eigen_solve_reports_energies_and_convergence() {
    let dir = TempDir::new().unwrap();
    let o = run_scenario("eigen_well.toml", dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("convergence ratio"));
    let table = std::fs::read_to_string(dir.path().join("energies.tsv")).unwrap();
    assert_eq!(table.lines().filter(|l| !l.starts_with('#')).count(), 6);
    assert!(dir.path().join("states.svg").exists());
    assert!(dir.path().join("basis").is_dir());
    let r = report(dir.path());
    let artifacts = r["artifacts"].as_array().unwrap();
    assert!(artifacts.iter().any(|a| a.as_str() == Some("energies.tsv")));
    assert!(r["timing"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn light_speed_sweep_fits_inverse_square() {
    let dir = TempDir::new().unwrap();
    let config = scenario("kg_light_speed_sweep.toml");
    let o = wavesig(&["sweep", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let slope = sweep_exponent(dir.path());
    assert!((slope + 2.0).abs() <= 0.2, "exponent {slope}");
    let merged = std::fs::read_to_string(dir.path().join("sweep.tsv")).unwrap();
    let values: Vec<f64> = merged
        .lines()
        .skip(1)
        .map(|l| l.split('\t').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, vec![5.0, 10.0, 20.0]);
    assert!(dir.path().join("00-light_speed-5").join("report.toml").exists());
}

#[test]
fn grid_sweep_fits_second_order() {
    let dir = TempDir::new().unwrap();
    let config = scenario("eigen_grid_sweep.toml");
    let o = wavesig(&["sweep", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let slope = sweep_exponent(dir.path());
    assert!((slope - 2.0).abs() <= 0.3, "exponent {slope}");
}

#[test]
fn sweeps_need_three_values() {
    let dir = TempDir::new().unwrap();
    let config = scenario("kg_light_speed_sweep.toml");
    let o = wavesig(&[
        "sweep", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
        "--param", "light_speed", "--values", "5,10",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 3"));
}

#[test]
fn identical_configs_give_identical_tables() {
    let scratch = TempDir::new().unwrap();
    let config = with_state("moments_oscillator.toml", scratch.path(), "kind = \"random_superposition\"\ncount = 3");
    let seeded = |seed: &str| {
        let dir = TempDir::new().unwrap();
        let o = wavesig(&[
            "run", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap(),
            "--seed", seed, "--set", "window.alignment=\"tapered\"", "--set", "window.half_width=20.0",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
        std::fs::read(dir.path().join("energy_moments.tsv")).unwrap()
    };
    let first = seeded("11");
    assert_eq!(first, seeded("11"));
    assert_ne!(first, seeded("12"));
}

#[test]
fn failed_invariants_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let o = run_scenario("kg_vs_schrodinger.toml", dir.path(), &["--set", "particle.light_speed=5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL kg_schrodinger_relative_l2"));
    assert_eq!(report(dir.path())["pass"].as_bool(), Some(false));
}

#[test]
fn numerical_failures_exit_with_three() {
    // Nine levels from nine windowed moments: the moment errors blow up into negative masses.
    let scratch = TempDir::new().unwrap();
    let config = with_state("reconstruct_pair.toml", scratch.path(), "kind = \"random_superposition\"\ncount = 9");
    let out = scratch.path().join("out");
    let o = wavesig(&[
        "run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--set", "window.alignment=\"tapered\"", "--set", "window.half_width=20.0",
        "--set", "grid.time.count=2048", "--set", "options.max_order=8",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).contains("reconstruction failed"));
}

#[test]
fn remaining_experiments_pass_their_invariants() {
    for name in ["analytic_demo.toml", "kg_vs_schrodinger.toml", "moments_oscillator.toml", "momentum_gaussian.toml"] {
        let dir = TempDir::new().unwrap();
        let o = run_scenario(name, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn validate_echoes_overrides() {
    let config = scenario("reconstruct_pair.toml");
    let o = wavesig(&["validate", "--config", config.to_str().unwrap(), "--set", "particle.light_speed=3", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let echoed: toml::Table = stdout(&o).parse().unwrap();
    assert_eq!(echoed["particle"]["light_speed"].as_integer().map(|v| v as f64).or(echoed["particle"]["light_speed"].as_float()), Some(3.0));
    assert_eq!(echoed["seed"].as_integer(), Some(5));
}
