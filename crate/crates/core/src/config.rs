//! JSON run configuration.
//!
//! Every field has a default, so `{}` is a valid configuration. Unknown keys
//! are rejected at every nesting level. `workers` and `output_dir` are
//! runtime knobs: they are accepted on input but never serialized, so they
//! cannot leak into result files.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    alpha1_admissible, circular, linear_equispaced, tchebyshev_sparse, wavelength, ArrayGeometry,
    Point, ALPHA1_RANGE, DEFAULT_FREQUENCY_HZ,
};
use crate::propagation::ChannelModel;
use crate::scenarios::{linspace, RadiusLaw, ScenarioSpec};
use crate::synthesis::Objective;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Linear,
    Sparse,
    Circular,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "equispaced" => Ok(FamilyKind::Linear),
            "sparse" => Ok(FamilyKind::Sparse),
            "circular" => Ok(FamilyKind::Circular),
            other => Err(Error::invalid("kind", format!("unknown geometry kind `{other}`"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Linear => "linear",
            FamilyKind::Sparse => "sparse",
            FamilyKind::Circular => "circular",
        })
    }
}

/// A geometry family plus its spacing. For sparse arrays `spacing` is the
/// mean spacing d0; `alphas` is ignored for the other kinds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: FamilyKind,
    /// Wavelengths.
    pub spacing: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec::linear(0.5)
    }
}

impl GeometrySpec {
    pub fn linear(spacing: f64) -> Self {
        GeometrySpec { kind: FamilyKind::Linear, spacing, alphas: Vec::new() }
    }

    pub fn sparse(d0: f64, alpha1: f64) -> Self {
        GeometrySpec { kind: FamilyKind::Sparse, spacing: d0, alphas: vec![alpha1] }
    }

    pub fn circular(spacing: f64) -> Self {
        GeometrySpec { kind: FamilyKind::Circular, spacing, alphas: Vec::new() }
    }

    pub fn with_spacing(&self, spacing: f64) -> Self {
        GeometrySpec { spacing, ..self.clone() }
    }

    pub fn build(&self, n: usize, wavelength: f64) -> Result<ArrayGeometry> {
        match self.kind {
            FamilyKind::Linear => linear_equispaced(n, self.spacing, wavelength),
            FamilyKind::Sparse => tchebyshev_sparse(n, self.spacing, &self.alphas, wavelength),
            FamilyKind::Circular => circular(n, self.spacing, wavelength),
        }
    }

    /// Short identifier such as `sparse_d2_a-0.03`.
    pub fn label(&self) -> String {
        let mut s = format!("{}_d{}", self.kind, self.spacing);
        if self.kind == FamilyKind::Sparse {
            for a in &self.alphas {
                s.push_str(&format!("_a{a}"));
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub k_users: usize,
    pub phi_s: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// `None` selects a full circle for circular arrays and the sector otherwise.
    pub full_circle: Option<bool>,
    pub radius_law: RadiusLaw,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            k_users: 50,
            phi_s: PI / 3.0,
            r_min: 5.0,
            r_max: 200.0,
            full_circle: None,
            radius_law: RadiusLaw::UniformRadius,
        }
    }
}

impl ScenarioConfig {
    pub fn spec_for(&self, kind: FamilyKind, k_users: usize) -> ScenarioSpec {
        ScenarioSpec {
            k_users,
            phi_s: self.phi_s,
            r_min: self.r_min,
            r_max: self.r_max,
            full_circle: self.full_circle.unwrap_or(kind == FamilyKind::Circular),
            radius_law: self.radius_law,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadialConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub azimuth: f64,
}

impl Default for RadialConfig {
    fn default() -> Self {
        RadialConfig { r_min: 1.0, r_max: 100.0, points: 200, azimuth: 0.0 }
    }
}

impl RadialConfig {
    pub fn radii(&self) -> Vec<f64> {
        linspace(self.r_min, self.r_max, self.points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlaneConfig {
    pub fixed_terminal: Point,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Default for PlaneConfig {
    fn default() -> Self {
        PlaneConfig {
            fixed_terminal: Point::new(0.0, 50.0),
            x_min: -200.0,
            x_max: 200.0,
            nx: 200,
            y_min: 1.0,
            y_max: 200.0,
            ny: 200,
        }
    }
}

impl PlaneConfig {
    pub fn x_values(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn y_values(&self) -> Vec<f64> {
        linspace(self.y_min, self.y_max, self.ny)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlphaSearchConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub objective: Objective,
    /// Golden-section iterations on the best grid bracket; 0 disables.
    pub refine_iterations: usize,
}

impl Default for AlphaSearchConfig {
    fn default() -> Self {
        AlphaSearchConfig {
            lo: -0.12,
            hi: 0.24,
            points: 37,
            objective: Objective::MeanCondition,
            refine_iterations: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub frequency_hz: f64,
    pub n_antennas: usize,
    pub geometry: GeometrySpec,
    pub scenario: ScenarioConfig,
    pub m_scenarios: usize,
    pub master_seed: u64,
    pub snr_db: f64,
    /// Spacing axis of the condition sweeps, wavelengths.
    pub d_values: Vec<f64>,
    pub k_values: Vec<usize>,
    pub bins: usize,
    pub quantile_levels: Vec<f64>,
    pub radial: RadialConfig,
    pub plane: PlaneConfig,
    pub alpha_search: AlphaSearchConfig,
    pub zf_geometries: Vec<GeometrySpec>,
    /// Worker threads; 0 uses every available core.
    #[serde(skip_serializing)]
    pub workers: usize,
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            frequency_hz: DEFAULT_FREQUENCY_HZ,
            n_antennas: 200,
            geometry: GeometrySpec::default(),
            scenario: ScenarioConfig::default(),
            m_scenarios: 1000,
            master_seed: 1,
            snr_db: 5.0,
            d_values: (5..=20).map(|i| i as f64 / 10.0).collect(),
            k_values: (1..=20).map(|i| 5 * i).collect(),
            bins: 60,
            quantile_levels: vec![0.5, 0.99],
            radial: RadialConfig::default(),
            plane: PlaneConfig::default(),
            alpha_search: AlphaSearchConfig::default(),
            zf_geometries: vec![
                GeometrySpec::linear(0.5),
                GeometrySpec::linear(1.0),
                GeometrySpec::linear(2.0),
                GeometrySpec::sparse(1.0, -0.03),
                GeometrySpec::sparse(2.0, -0.03),
            ],
            workers: 0,
            output_dir: None,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.frequency_hz)
    }

    pub fn channel_model(&self) -> Result<ChannelModel> {
        ChannelModel::from_frequency(self.frequency_hz)
    }

    /// Checks every field; the error names the first offending one.
    pub fn validate(&self) -> Result<()> {
        positive("frequency_hz", self.frequency_hz)?;
        if self.n_antennas < 2 {
            return Err(Error::invalid("n_antennas", "need at least 2 antennas"));
        }
        self.validate_geometry("geometry", &self.geometry)?;

        let sc = &self.scenario;
        if sc.k_users == 0 || sc.k_users > self.n_antennas {
            return Err(Error::invalid(
                "scenario.k_users",
                format!("must lie in [1, n_antennas = {}], got {}", self.n_antennas, sc.k_users),
            ));
        }
        sc.spec_for(self.geometry.kind, sc.k_users)
            .validate()
            .map_err(|e| prefix_field("scenario", e))?;

        if self.m_scenarios == 0 {
            return Err(Error::invalid("m_scenarios", "need at least one scenario"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::invalid("snr_db", "must be finite"));
        }
        if self.d_values.is_empty() {
            return Err(Error::invalid("d_values", "empty list"));
        }
        for d in &self.d_values {
            positive("d_values", *d)?;
        }
        if self.k_values.is_empty() {
            return Err(Error::invalid("k_values", "empty list"));
        }
        if let Some(k) = self.k_values.iter().find(|&&k| k == 0 || k > self.n_antennas) {
            return Err(Error::invalid(
                "k_values",
                format!("{k} outside [1, n_antennas = {}]", self.n_antennas),
            ));
        }
        if self.bins == 0 {
            return Err(Error::invalid("bins", "need at least one bin"));
        }
        if let Some(l) = self.quantile_levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::invalid("quantile_levels", format!("{l} outside [0, 1]")));
        }

        let r = &self.radial;
        positive("radial.r_min", r.r_min)?;
        if !(r.r_max >= r.r_min && r.r_max.is_finite()) {
            return Err(Error::invalid("radial.r_max", "r_min <= r_max violated"));
        }
        if r.points == 0 {
            return Err(Error::invalid("radial.points", "need at least one point"));
        }
        if !r.azimuth.is_finite() {
            return Err(Error::invalid("radial.azimuth", "must be finite"));
        }

        let p = &self.plane;
        if p.nx == 0 || p.ny == 0 {
            return Err(Error::invalid("plane.nx", "grid needs at least one point per axis"));
        }
        if !(p.x_min <= p.x_max) {
            return Err(Error::invalid("plane.x_max", "x_min <= x_max violated"));
        }
        if !(p.y_min <= p.y_max) {
            return Err(Error::invalid("plane.y_max", "y_min <= y_max violated"));
        }

        let a = &self.alpha_search;
        if !(a.lo < a.hi) {
            return Err(Error::invalid("alpha_search.hi", "lo < hi violated"));
        }
        if !(alpha1_admissible(a.lo) && alpha1_admissible(a.hi)) {
            return Err(Error::invalid(
                "alpha_search",
                format!(
                    "range [{}, {}] must lie inside ({}, {})",
                    a.lo, a.hi, ALPHA1_RANGE.0, ALPHA1_RANGE.1
                ),
            ));
        }
        if a.points < 3 {
            return Err(Error::invalid("alpha_search.points", "need at least 3 grid points"));
        }
        if let Objective::QuantileCondition { level } = a.objective {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::invalid("alpha_search.objective.level", "must lie in (0, 1)"));
            }
        }

        if self.zf_geometries.is_empty() {
            return Err(Error::invalid("zf_geometries", "empty list"));
        }
        for (i, g) in self.zf_geometries.iter().enumerate() {
            self.validate_geometry(&format!("zf_geometries[{i}]"), g)?;
        }
        Ok(())
    }

    fn validate_geometry(&self, field: &str, g: &GeometrySpec) -> Result<()> {
        positive(&format!("{field}.spacing"), g.spacing)?;
        g.build(self.n_antennas, self.wavelength())
            .map(|_| ())
            .map_err(|e| match e {
                Error::MonotonicityViolation { index } => Error::invalid(
                    format!("{field}.alphas"),
                    format!("positions are not strictly increasing at element {index}"),
                ),
                other => prefix_field(field, other),
            })
    }
}

fn prefix_field(prefix: &str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { field, reason } => {
            Error::InvalidParameter { field: format!("{prefix}.{field}"), reason }
        }
        other => other,
    }
}
