use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::montecarlo::with_workers;
use crate::synthesis::write_curve_csv;

use super::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    CorrRadial,
    CorrPlane,
    CondMap,
    CondHist,
    SvdStats,
    AlphaSweep,
    ZfRate,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::CorrRadial,
        Experiment::CorrPlane,
        Experiment::CondMap,
        Experiment::CondHist,
        Experiment::SvdStats,
        Experiment::AlphaSweep,
        Experiment::ZfRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CorrRadial => "corr-radial",
            Experiment::CorrPlane => "corr-plane",
            Experiment::CondMap => "cond-map",
            Experiment::CondHist => "cond-hist",
            Experiment::SvdStats => "svd-stats",
            Experiment::AlphaSweep => "alpha-sweep",
            Experiment::ZfRate => "zf-rate",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            Error::invalid(
                "experiment",
                format!("unknown experiment `{s}`, expected one of {}", names.join(", ")),
            )
        })
    }
}

fn dispatch(experiment: Experiment, config: &RunConfig) -> Result<SweepResult> {
    let setup = MonteCarloSetup::from_config(config)?;
    let k = config.scenario.k_users;
    match experiment {
        Experiment::CorrRadial => {
            let geometry = config.geometry.build(config.n_antennas, config.wavelength())?;
            let radii = config.radial.radii();
            correlation_radial_map(&geometry, &radii, &radii, config.radial.azimuth, &setup.model)
        }
        Experiment::CorrPlane => {
            let geometry = config.geometry.build(config.n_antennas, config.wavelength())?;
            let p = &config.plane;
            correlation_plane_map(
                &geometry,
                p.fixed_terminal,
                &p.x_values(),
                &p.y_values(),
                &setup.model,
            )
        }
        Experiment::CondMap => {
            mean_condition_map(&config.geometry, &config.d_values, &config.k_values, &setup)
        }
        Experiment::CondHist => condition_histogram_sweep(
            &config.geometry,
            &config.d_values,
            k,
            &setup,
            config.bins,
            &config.quantile_levels,
        ),
        Experiment::SvdStats => singular_spectrum_sweep(&config.geometry, k, &setup, config.bins),
        Experiment::AlphaSweep => {
            let a = &config.alpha_search;
            alpha_sweep(
                (a.lo, a.hi),
                a.points,
                a.objective,
                a.refine_iterations,
                config.geometry.spacing,
                k,
                &setup,
            )
        }
        Experiment::ZfRate => {
            zf_rate_vs_users(&config.zf_geometries, &config.k_values, config.snr_db, &setup)
        }
    }
}

/// Validates `config`, runs `experiment` on `config.workers` threads and
/// attaches the reproducibility metadata.
pub fn run(experiment: Experiment, config: &RunConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut result = with_workers(config.workers, || dispatch(experiment, config))??;
    result.check_complete()?;
    result.metadata = Some(Metadata {
        experiment: experiment.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: config.master_seed,
        seed_hex: format!("{:016x}", config.master_seed),
        axes: result.axes.clone(),
        cell_count: result.cells.len(),
        config: config.clone(),
    });
    Ok(result)
}

/// Re-runs the experiment recorded in a JSON sidecar.
pub fn reproduce(sidecar: &Path, workers: usize) -> Result<SweepResult> {
    let text = std::fs::read_to_string(sidecar)?;
    let meta: Metadata = serde_json::from_str(&text)?;
    let experiment: Experiment = meta.experiment.parse()?;
    let mut config = meta.config;
    config.workers = workers;
    run(experiment, &config)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub curve: Option<PathBuf>,
}

fn create_new(path: &Path) -> std::io::Result<Option<File>> {
    match OpenOptions::new().write(true).create_new(true).open(path) {
        Ok(f) => Ok(Some(f)),
        Err(e) if e.kind() == ErrorKind::AlreadyExists => Ok(None),
        Err(e) => Err(e),
    }
}

/// Writes `<stem>.csv`, `<stem>.json` and, for the alpha sweep,
/// `<stem>_curve.csv` into `dir`, where `stem` is
/// `<experiment>_<timestamp>_<seed hex>`. A numeric suffix is appended when
/// the stem is already taken; existing files are never overwritten.
pub fn write_outputs(result: &SweepResult, dir: &Path, timestamp: &str) -> Result<OutputPaths> {
    let meta = result
        .metadata
        .as_ref()
        .ok_or_else(|| Error::invalid("metadata", "result has no run metadata"))?;
    std::fs::create_dir_all(dir)?;
    let base = format!("{}_{}_{}", meta.experiment, timestamp, meta.seed_hex);
    let is_alpha = meta.experiment == Experiment::AlphaSweep.name();

    for attempt in 0.. {
        let stem = if attempt == 0 { base.clone() } else { format!("{base}_{attempt}") };
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        let curve = is_alpha.then(|| dir.join(format!("{stem}_curve.csv")));
        if json.exists() || curve.as_ref().is_some_and(|c| c.exists()) {
            continue;
        }
        let Some(file) = create_new(&csv)? else { continue };

        let mut w = BufWriter::new(file);
        result.write_csv(&mut w)?;
        w.flush()?;

        let mut w = BufWriter::new(File::create(&json)?);
        serde_json::to_writer_pretty(&mut w, meta)?;
        writeln!(w)?;
        w.flush()?;

        if let Some(path) = &curve {
            let curve_points = alpha_curve(result)?;
            let mut w = BufWriter::new(File::create(path)?);
            write_curve_csv(&curve_points, &mut w)?;
            w.flush()?;
        }
        return Ok(OutputPaths { csv, json, curve });
    }
    unreachable!("suffix search is unbounded")
}

/// `(alpha, objective_db)` pairs of an alpha-sweep result.
pub fn alpha_curve(result: &SweepResult) -> Result<Vec<(f64, f64)>> {
    let alphas = result
        .axis("alpha")
        .and_then(Axis::numeric_values)
        .ok_or_else(|| Error::invalid("axes", "no numeric alpha axis"))?;
    Ok(alphas
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, result.stat(&[i], "objective_db").unwrap_or(f64::NAN)))
        .collect())
}
