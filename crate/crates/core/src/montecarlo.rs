//! Seeded scenario ensembles.
//!
//! Scenario `m` of an ensemble always uses seed `(master_seed, m)`, whatever
//! the geometry, spacing or user count, so every variant inside a sweep sees
//! the same terminal drops. Work is spread over the current rayon pool and
//! collected in scenario order; reductions happen afterwards on the ordered
//! vector, which keeps results independent of the worker count.

use rayon::prelude::*;

use crate::analysis::{condition_number_db, singular_values, zf_sum_rate, SingularSpectrum};
use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::propagation::{build_channel_matrix, ChannelMatrix, ChannelModel};
use crate::scenarios::{sample_scenario, ScenarioSpec, SeedSpec};

/// Runs `f` on a dedicated pool of `workers` threads (0 = all cores).
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    Ok(pool.install(f))
}

/// Evaluates `f` for scenario indices `0..m`, in parallel, returning results
/// in index order.
pub fn per_scenario<T, F>(m: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..m as u64).into_par_iter().map(f).collect()
}

/// Column-normalized channel for one seeded scenario.
pub fn normalized_channel(
    geometry: &ArrayGeometry,
    scenario: &ScenarioSpec,
    seed: SeedSpec,
    model: &ChannelModel,
) -> Result<ChannelMatrix> {
    let terminals = sample_scenario(scenario, seed)?;
    build_channel_matrix(geometry, &terminals, model)?.normalize_columns()
}

pub fn scenario_spectrum(
    geometry: &ArrayGeometry,
    scenario: &ScenarioSpec,
    seed: SeedSpec,
    model: &ChannelModel,
) -> Result<SingularSpectrum> {
    singular_values(&normalized_channel(geometry, scenario, seed, model)?)
}

pub fn condition_db_samples(
    geometry: &ArrayGeometry,
    scenario: &ScenarioSpec,
    model: &ChannelModel,
    m: usize,
    master_seed: u64,
) -> Vec<Result<f64>> {
    per_scenario(m, |i| {
        let s = scenario_spectrum(geometry, scenario, SeedSpec::new(master_seed, i), model)?;
        condition_number_db(&s)
    })
}

pub fn zf_rate_samples(
    geometry: &ArrayGeometry,
    scenario: &ScenarioSpec,
    model: &ChannelModel,
    snr_linear: f64,
    m: usize,
    master_seed: u64,
) -> Vec<Result<f64>> {
    per_scenario(m, |i| {
        let h = normalized_channel(geometry, scenario, SeedSpec::new(master_seed, i), model)?;
        zf_sum_rate(&h, snr_linear)
    })
}

/// Successful samples, in order, and the number of scenarios whose channel
/// was numerically singular. Any other error is returned.
pub fn split_singular(samples: Vec<Result<f64>>) -> Result<(Vec<f64>, usize)> {
    let mut ok = Vec::with_capacity(samples.len());
    let mut singular = 0;
    for s in samples {
        match s {
            Ok(v) => ok.push(v),
            Err(Error::SingularMatrix { .. }) => singular += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((ok, singular))
}
