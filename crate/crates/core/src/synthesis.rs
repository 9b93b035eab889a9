//! One-parameter sparse-array search.
//!
//! The array shape is fixed by a single Chebyshev coefficient alpha1. Each
//! candidate is scored on the same seeded scenario ensemble (common random
//! numbers), so objective curves are smooth in alpha1 at a fixed seed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis::{mean_std, quantile};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::geometry::{alpha1_admissible, tchebyshev_sparse, ALPHA1_RANGE};
use crate::montecarlo::condition_db_samples;
use crate::propagation::ChannelModel;
use crate::scenarios::ScenarioSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// Mean condition number, dB.
    #[serde(rename = "mean")]
    MeanCondition,
    /// Condition-number quantile at `level`, dB.
    #[serde(rename = "quantile")]
    QuantileCondition { level: f64 },
}

impl Objective {
    pub fn name(&self) -> String {
        match self {
            Objective::MeanCondition => "mean".to_string(),
            Objective::QuantileCondition { level } => format!("q{level}"),
        }
    }

    fn reduce(&self, samples: &[f64]) -> Result<f64> {
        match *self {
            Objective::MeanCondition => mean_std(samples).map(|(m, _)| m),
            Objective::QuantileCondition { level } => quantile(samples, level),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub objective: Objective,
    pub scenario: ScenarioSpec,
    pub n_scenarios: usize,
    pub master_seed: u64,
}

impl ObjectiveSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_scenarios == 0 {
            return Err(Error::invalid("n_scenarios", "need at least one scenario"));
        }
        if let Objective::QuantileCondition { level } = self.objective {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::invalid("level", format!("{level} outside (0, 1)")));
            }
        }
        self.scenario.validate()
    }
}

/// Objective value (dB) of the `n`-element sparse array with mean spacing
/// `d0` wavelengths and shape coefficient `alpha1`.
pub fn evaluate_alpha(
    alpha1: f64,
    d0: f64,
    n: usize,
    spec: &ObjectiveSpec,
    model: &ChannelModel,
) -> Result<f64> {
    spec.validate()?;
    let geometry = tchebyshev_sparse(n, d0, &[alpha1], model.wavelength())?;
    let samples = condition_db_samples(
        &geometry,
        &spec.scenario,
        model,
        spec.n_scenarios,
        spec.master_seed,
    )
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    spec.objective.reduce(&samples)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearch {
    pub best_alpha: f64,
    pub best_value: f64,
    /// `(alpha1, objective_db)` on the evaluated grid.
    pub curve: Vec<(f64, f64)>,
}

/// Grid point with the lowest objective; ties go to the alpha nearest zero.
pub fn argmin_toward_zero(curve: &[(f64, f64)]) -> Option<(f64, f64)> {
    curve.iter().copied().reduce(|best, cand| {
        if cand.1 < best.1 || (cand.1 == best.1 && cand.0.abs() < best.0.abs()) {
            cand
        } else {
            best
        }
    })
}

fn check_range(range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo < hi) {
        return Err(Error::invalid("range", format!("lo < hi violated ({lo}, {hi})")));
    }
    if !(alpha1_admissible(lo) && alpha1_admissible(hi)) {
        return Err(Error::invalid(
            "range",
            format!(
                "[{lo}, {hi}] must lie inside ({}, {})",
                ALPHA1_RANGE.0, ALPHA1_RANGE.1
            ),
        ));
    }
    Ok(())
}

/// Evaluates the objective on `grid_points` evenly spaced alphas covering
/// `range` and returns the argmin together with the full curve.
pub fn search_alpha(
    range: (f64, f64),
    grid_points: usize,
    spec: &ObjectiveSpec,
    d0: f64,
    n: usize,
    model: &ChannelModel,
) -> Result<AlphaSearch> {
    check_range(range)?;
    if grid_points < 3 {
        return Err(Error::invalid("grid_points", "need at least 3 grid points"));
    }
    let alphas = crate::scenarios::linspace(range.0, range.1, grid_points);
    let curve = alphas
        .into_iter()
        .map(|a| evaluate_alpha(a, d0, n, spec, model).map(|v| (a, v)))
        .collect::<Result<Vec<_>>>()?;
    let (best_alpha, best_value) = argmin_toward_zero(&curve).expect("non-empty grid");
    Ok(AlphaSearch { best_alpha, best_value, curve })
}

/// Golden-section refinement of a grid search inside the bracket formed by
/// the best grid point's neighbours. Returns the best `(alpha, value)` seen,
/// which is never worse than the grid optimum.
pub fn refine_alpha(
    search: &AlphaSearch,
    iterations: usize,
    spec: &ObjectiveSpec,
    d0: f64,
    n: usize,
    model: &ChannelModel,
) -> Result<(f64, f64)> {
    let idx = search
        .curve
        .iter()
        .position(|&(a, _)| a == search.best_alpha)
        .ok_or_else(|| Error::invalid("search", "best alpha not on the curve"))?;
    let mut lo = search.curve[idx.saturating_sub(1)].0;
    let mut hi = search.curve[(idx + 1).min(search.curve.len() - 1)].0;
    let mut best = (search.best_alpha, search.best_value);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |a: f64| evaluate_alpha(a, d0, n, spec, model);

    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    for _ in 0..iterations {
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f < best.1 {
                best = (x, f);
            }
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = eval(x2)?;
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f < best.1 {
            best = (x, f);
        }
    }
    Ok(best)
}

/// CSV with header `alpha,objective_db`.
pub fn write_curve_csv<W: Write>(curve: &[(f64, f64)], mut w: W) -> Result<()> {
    writeln!(w, "alpha,objective_db")?;
    for (a, v) in curve {
        writeln!(w, "{},{}", sig12(*a), sig12(*v))?;
    }
    Ok(())
}
