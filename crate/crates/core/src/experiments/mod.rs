//! Parameter sweeps over geometries, spacings and user counts.
//!
//! Monte Carlo sweeps share one scenario ensemble across all of their cells:
//! scenario `m` is drawn from `(master_seed, m)` and layouts with fewer users
//! are prefixes of layouts with more. Scenarios whose channel is numerically
//! singular are counted in a `failures` statistic rather than dropped
//! silently; any other error aborts the sweep with the cell coordinates.

mod runner;
mod sweep;

pub use runner::{alpha_curve, reproduce, run, write_outputs, Experiment, OutputPaths};
pub use sweep::{Axis, AxisValues, Metadata, Stats, Summary, SweepResult};

use rayon::prelude::*;

use crate::analysis::{db_to_linear, histogram, mean_std, quantile};
use crate::config::{GeometrySpec, RunConfig, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Point};
use crate::montecarlo::{
    condition_db_samples, per_scenario, scenario_spectrum, split_singular, zf_rate_samples,
};
use crate::propagation::{build_channel_matrix, column_correlation, ChannelModel};
use crate::scenarios::{plane_grid, two_terminal_radial_grid, SeedSpec};
use crate::synthesis::{refine_alpha, search_alpha, Objective, ObjectiveSpec};

/// Shared Monte Carlo parameters of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloSetup {
    pub n_antennas: usize,
    pub model: ChannelModel,
    pub scenario: ScenarioConfig,
    pub m_scenarios: usize,
    pub master_seed: u64,
}

impl MonteCarloSetup {
    pub fn from_config(config: &RunConfig) -> Result<Self> {
        Ok(MonteCarloSetup {
            n_antennas: config.n_antennas,
            model: config.channel_model()?,
            scenario: config.scenario.clone(),
            m_scenarios: config.m_scenarios,
            master_seed: config.master_seed,
        })
    }

    fn geometry(&self, spec: &GeometrySpec) -> Result<ArrayGeometry> {
        spec.build(self.n_antennas, self.model.wavelength())
    }

    fn check_users(&self, k_values: &[usize]) -> Result<()> {
        if self.m_scenarios == 0 {
            return Err(Error::invalid("m_scenarios", "need at least one scenario"));
        }
        match k_values.iter().find(|&&k| k == 0 || k > self.n_antennas) {
            Some(k) => Err(Error::invalid(
                "k_values",
                format!("{k} outside [1, n_antennas = {}]", self.n_antennas),
            )),
            None if k_values.is_empty() => Err(Error::invalid("k_values", "empty list")),
            None => Ok(()),
        }
    }
}

fn moments(samples: &[f64]) -> (f64, f64) {
    mean_std(samples).unwrap_or((f64::NAN, f64::NAN))
}

fn summary_stats(samples: &[f64], failures: usize) -> Stats {
    let (mean, std) = moments(samples);
    vec![
        ("mean".into(), mean),
        ("std".into(), std),
        ("failures".into(), failures as f64),
    ]
}

fn finite_range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values.into_iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

fn histogram_cells(result: &mut SweepResult, samples: &[f64], bins: usize, range: (f64, f64)) -> Result<()> {
    let range = if range.0 <= range.1 { range } else { (0.0, 0.0) };
    let h = histogram(samples, bins, range)?;
    for b in 0..bins {
        result.push_cell(vec![
            ("count".into(), h.counts[b] as f64),
            ("bin_lo".into(), h.edges[b]),
            ("bin_hi".into(), h.edges[b + 1]),
        ]);
    }
    Ok(())
}

/// Mean condition number (dB) of the normalized channel for every
/// `(spacing, users)` pair.
pub fn mean_condition_map(
    family: &GeometrySpec,
    d_values: &[f64],
    k_values: &[usize],
    setup: &MonteCarloSetup,
) -> Result<SweepResult> {
    setup.check_users(k_values)?;
    let mut result = SweepResult::new(
        "cond-map",
        vec![
            Axis::numeric("d", d_values.to_vec()),
            Axis::numeric("k", k_values.iter().map(|&k| k as f64).collect()),
        ],
    );
    for &d in d_values {
        let geometry = setup.geometry(&family.with_spacing(d)).map_err(|e| e.at_cell(format!("d={d}")))?;
        for &k in k_values {
            let scenario = setup.scenario.spec_for(family.kind, k);
            let samples = condition_db_samples(
                &geometry,
                &scenario,
                &setup.model,
                setup.m_scenarios,
                setup.master_seed,
            );
            let (ok, failures) =
                split_singular(samples).map_err(|e| e.at_cell(format!("d={d}, k={k}")))?;
            result.push_cell(summary_stats(&ok, failures));
        }
    }
    Ok(result)
}

/// Per-spacing histograms of the condition number (dB) for `k` users. All
/// spacings share one set of bin edges spanning the pooled sample range.
pub fn condition_histogram_sweep(
    family: &GeometrySpec,
    d_values: &[f64],
    k: usize,
    setup: &MonteCarloSetup,
    bins: usize,
    quantile_levels: &[f64],
) -> Result<SweepResult> {
    setup.check_users(&[k])?;
    let mut per_d = Vec::with_capacity(d_values.len());
    for &d in d_values {
        let geometry = setup.geometry(&family.with_spacing(d)).map_err(|e| e.at_cell(format!("d={d}")))?;
        let scenario = setup.scenario.spec_for(family.kind, k);
        let samples = condition_db_samples(
            &geometry,
            &scenario,
            &setup.model,
            setup.m_scenarios,
            setup.master_seed,
        );
        per_d.push(split_singular(samples).map_err(|e| e.at_cell(format!("d={d}, k={k}")))?);
    }
    let range = finite_range(per_d.iter().flat_map(|(ok, _)| ok.iter().copied()));

    let mut result = SweepResult::new(
        "cond-hist",
        vec![Axis::numeric("d", d_values.to_vec()), Axis::indices("bin", bins)],
    );
    for (i, (ok, failures)) in per_d.iter().enumerate() {
        histogram_cells(&mut result, ok, bins, range)?;
        let mut stats = summary_stats(ok, *failures);
        for &level in quantile_levels {
            let q = quantile(ok, level).unwrap_or(f64::NAN);
            stats.push((format!("q{level}"), q));
        }
        result.push_summary(vec![i], stats);
    }
    Ok(result)
}

/// Distribution of each ordered singular value of the normalized channel.
/// Cells are `(index, bin)` histograms; per-index summaries carry the mean,
/// standard deviation and mean square.
pub fn singular_spectrum_sweep(
    geometry_spec: &GeometrySpec,
    k: usize,
    setup: &MonteCarloSetup,
    bins: usize,
) -> Result<SweepResult> {
    setup.check_users(&[k])?;
    let geometry = setup.geometry(geometry_spec)?;
    let scenario = setup.scenario.spec_for(geometry_spec.kind, k);
    let spectra = per_scenario(setup.m_scenarios, |i| {
        scenario_spectrum(&geometry, &scenario, SeedSpec::new(setup.master_seed, i), &setup.model)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let columns: Vec<Vec<f64>> = (0..k)
        .map(|j| spectra.iter().map(|s| s.values()[j]).collect())
        .collect();
    let range = finite_range(columns.iter().flatten().copied());

    let mut result = SweepResult::new(
        "svd-stats",
        vec![
            Axis::numeric("index", (1..=k).map(|i| i as f64).collect()),
            Axis::indices("bin", bins),
        ],
    );
    for (j, col) in columns.iter().enumerate() {
        histogram_cells(&mut result, col, bins, range)?;
        let (mean, std) = moments(col);
        let squares: Vec<f64> = col.iter().map(|s| s * s).collect();
        let (mean_sq, _) = moments(&squares);
        result.push_summary(
            vec![j],
            vec![("mean".into(), mean), ("std".into(), std), ("mean_sq".into(), mean_sq)],
        );
    }
    Ok(result)
}

/// Correlation between two terminals on the same ray, for every pair of
/// ranges.
pub fn correlation_radial_map(
    geometry: &ArrayGeometry,
    r1_values: &[f64],
    r2_values: &[f64],
    azimuth: f64,
    model: &ChannelModel,
) -> Result<SweepResult> {
    let layouts = two_terminal_radial_grid(r1_values, r2_values, azimuth)?;
    let chis = layouts
        .par_iter()
        .map(|layout| {
            let h = build_channel_matrix(geometry, layout, model)?;
            column_correlation(h.column(0).as_slice(), h.column(1).as_slice())
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut result = SweepResult::new(
        "corr-radial",
        vec![Axis::numeric("r1", r1_values.to_vec()), Axis::numeric("r2", r2_values.to_vec())],
    );
    for chi in chis {
        result.push_cell(vec![("chi".into(), chi)]);
    }
    Ok(result)
}

/// Correlation between a fixed terminal and a second terminal moved over an
/// `(x, y)` grid. Grid points on the array axis, or on an element, are `nan`.
pub fn correlation_plane_map(
    geometry: &ArrayGeometry,
    fixed: Point,
    x_values: &[f64],
    y_values: &[f64],
    model: &ChannelModel,
) -> Result<SweepResult> {
    let grid = plane_grid(fixed, x_values, y_values)?;
    let chis = grid
        .par_iter()
        .map(|g| match build_channel_matrix(geometry, &g.layout, model) {
            Ok(h) => column_correlation(h.column(0).as_slice(), h.column(1).as_slice())
                .map(|chi| (g.ix, g.iy, chi)),
            Err(Error::DegenerateGeometry { .. }) => Ok((g.ix, g.iy, f64::NAN)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;

    let ny = y_values.len();
    let mut map = vec![f64::NAN; x_values.len() * ny];
    for (ix, iy, chi) in chis {
        map[ix * ny + iy] = chi;
    }
    let missing = map.iter().filter(|v| v.is_nan()).count();
    let mut result = SweepResult::new(
        "corr-plane",
        vec![Axis::numeric("x", x_values.to_vec()), Axis::numeric("y", y_values.to_vec())],
    );
    for chi in map {
        result.push_cell(vec![("chi".into(), chi)]);
    }
    result.push_summary(vec![], vec![("missing".into(), missing as f64)]);
    Ok(result)
}

/// Mean and spread of the Zero-Forcing sum rate (bit/s/Hz) per geometry and
/// user count, at `snr_db`.
pub fn zf_rate_vs_users(
    geometries: &[GeometrySpec],
    k_values: &[usize],
    snr_db: f64,
    setup: &MonteCarloSetup,
) -> Result<SweepResult> {
    setup.check_users(k_values)?;
    if geometries.is_empty() {
        return Err(Error::invalid("zf_geometries", "empty list"));
    }
    let snr = db_to_linear(snr_db);
    let mut result = SweepResult::new(
        "zf-rate",
        vec![
            Axis::labels("geometry", geometries.iter().map(GeometrySpec::label).collect()),
            Axis::numeric("k", k_values.iter().map(|&k| k as f64).collect()),
        ],
    );
    for spec in geometries {
        let geometry = setup.geometry(spec).map_err(|e| e.at_cell(spec.label()))?;
        for &k in k_values {
            let scenario = setup.scenario.spec_for(spec.kind, k);
            let samples = zf_rate_samples(
                &geometry,
                &scenario,
                &setup.model,
                snr,
                setup.m_scenarios,
                setup.master_seed,
            );
            let (ok, failures) = split_singular(samples)
                .map_err(|e| e.at_cell(format!("geometry={}, k={k}", spec.label())))?;
            result.push_cell(summary_stats(&ok, failures));
        }
    }
    Ok(result)
}

/// Objective curve of the sparse-array coefficient search for `k` users at
/// mean spacing `d0`.
pub fn alpha_sweep(
    range: (f64, f64),
    points: usize,
    objective: Objective,
    refine_iterations: usize,
    d0: f64,
    k: usize,
    setup: &MonteCarloSetup,
) -> Result<SweepResult> {
    setup.check_users(&[k])?;
    let spec = ObjectiveSpec {
        objective,
        scenario: setup.scenario.spec_for(crate::config::FamilyKind::Sparse, k),
        n_scenarios: setup.m_scenarios,
        master_seed: setup.master_seed,
    };
    let search = search_alpha(range, points, &spec, d0, setup.n_antennas, &setup.model)?;
    let mut result = SweepResult::new(
        "alpha-sweep",
        vec![Axis::numeric("alpha", search.curve.iter().map(|c| c.0).collect())],
    );
    for &(_, v) in &search.curve {
        result.push_cell(vec![("objective_db".into(), v)]);
    }
    let mut best = vec![
        ("best_alpha".into(), search.best_alpha),
        ("best_objective_db".into(), search.best_value),
    ];
    if refine_iterations > 0 {
        let (a, v) =
            refine_alpha(&search, refine_iterations, &spec, d0, setup.n_antennas, &setup.model)?;
        best.push(("refined_alpha".into(), a));
        best.push(("refined_objective_db".into(), v));
    }
    result.push_summary(vec![], best);
    Ok(result)
}
