//! Terminal layouts: seeded random drops for Monte Carlo runs and
//! deterministic grids for correlation maps.
//!
//! Random layouts use ChaCha8 keyed by the master seed. The scenario index
//! selects the ChaCha stream and terminal `k` reads its two uniforms from
//! word offset `4 k`, so a terminal's position depends only on
//! `(master_seed, scenario_index, k)`. Layouts with different user counts
//! therefore share their leading terminals.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::geometry::Point;
use crate::propagation::MIN_DISTANCE;

#[derive(Clone, Debug, PartialEq)]
pub struct TerminalLayout {
    positions: Vec<Point>,
}

impl TerminalLayout {
    pub fn new(positions: Vec<Point>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::invalid("terminals", "need at least one terminal"));
        }
        if positions.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::invalid("terminals", "non-finite coordinate"));
        }
        Ok(TerminalLayout { positions })
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// CSV with header `k,x_m,y_m`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,x_m,y_m")?;
        for (k, p) in self.positions.iter().enumerate() {
            writeln!(w, "{k},{},{}", sig12(p.x), sig12(p.y))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusLaw {
    /// r ~ U(r_min, r_max).
    #[default]
    UniformRadius,
    /// r^2 ~ U(r_min^2, r_max^2): uniform density over the annular sector.
    UniformArea,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub k_users: usize,
    /// Half-width of the angular sector around broadside (+y), radians.
    pub phi_s: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Draw azimuths over the whole circle instead of the sector.
    pub full_circle: bool,
    pub radius_law: RadiusLaw,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            k_users: 50,
            phi_s: PI / 3.0,
            r_min: 5.0,
            r_max: 200.0,
            full_circle: false,
            radius_law: RadiusLaw::UniformRadius,
        }
    }
}

impl ScenarioSpec {
    pub fn sector(k_users: usize, phi_s: f64, r_min: f64, r_max: f64) -> Self {
        ScenarioSpec { k_users, phi_s, r_min, r_max, ..Default::default() }
    }

    pub fn circle(k_users: usize, r_min: f64, r_max: f64) -> Self {
        ScenarioSpec { k_users, r_min, r_max, full_circle: true, ..Default::default() }
    }

    pub fn with_users(&self, k_users: usize) -> Self {
        ScenarioSpec { k_users, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_users == 0 {
            return Err(Error::invalid("k_users", "need at least one user"));
        }
        if !(self.phi_s > 0.0 && self.phi_s <= PI) {
            return Err(Error::invalid("phi_s", format!("must lie in (0, pi], got {}", self.phi_s)));
        }
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return Err(Error::invalid("r_min", format!("must be positive, got {}", self.r_min)));
        }
        if !(self.r_max > self.r_min && self.r_max.is_finite()) {
            return Err(Error::invalid(
                "r_max",
                format!("r_min < r_max violated ({} >= {})", self.r_min, self.r_max),
            ));
        }
        Ok(())
    }

    fn azimuth_range(&self) -> (f64, f64) {
        if self.full_circle {
            (0.0, 2.0 * PI)
        } else {
            (-self.phi_s, self.phi_s)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub scenario_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, scenario_index: u64) -> Self {
        SeedSpec { master_seed, scenario_index }
    }
}

/// Point at range `r` and azimuth `phi` measured from +y toward +x.
pub fn polar_point(r: f64, phi: f64) -> Point {
    Point::new(r * phi.sin(), r * phi.cos())
}

/// Draws one random layout; fully determined by `spec` and `seed`.
pub fn sample_scenario(spec: &ScenarioSpec, seed: SeedSpec) -> Result<TerminalLayout> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
    rng.set_stream(seed.scenario_index);
    let (phi_lo, phi_hi) = spec.azimuth_range();
    let positions = (0..spec.k_users)
        .map(|k| {
            rng.set_word_pos(4 * k as u128);
            let u_phi: f64 = rng.random();
            let u_r: f64 = rng.random();
            let phi = phi_lo + (phi_hi - phi_lo) * u_phi;
            let r = match spec.radius_law {
                RadiusLaw::UniformRadius => spec.r_min + (spec.r_max - spec.r_min) * u_r,
                RadiusLaw::UniformArea => {
                    let (a, b) = (spec.r_min * spec.r_min, spec.r_max * spec.r_max);
                    (a + (b - a) * u_r).sqrt()
                }
            };
            polar_point(r.clamp(spec.r_min, spec.r_max), phi)
        })
        .collect();
    TerminalLayout::new(positions)
}

fn check_radii(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(field, "empty list"));
    }
    if let Some(r) = values.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::invalid(field, format!("radii must be positive, got {r}")));
    }
    Ok(())
}

/// One two-terminal layout per `(r1, r2)` pair, both on the ray at
/// `azimuth`. Ordered with `r1` as the outer index.
pub fn two_terminal_radial_grid(
    r1_values: &[f64],
    r2_values: &[f64],
    azimuth: f64,
) -> Result<Vec<TerminalLayout>> {
    check_radii("r1_values", r1_values)?;
    check_radii("r2_values", r2_values)?;
    if !azimuth.is_finite() {
        return Err(Error::invalid("azimuth", "must be finite"));
    }
    r1_values
        .iter()
        .flat_map(|&r1| r2_values.iter().map(move |&r2| (r1, r2)))
        .map(|(r1, r2)| {
            TerminalLayout::new(vec![polar_point(r1, azimuth), polar_point(r2, azimuth)])
        })
        .collect()
}

/// A plane-grid layout together with its `(x, y)` grid indices.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLayout {
    pub ix: usize,
    pub iy: usize,
    pub layout: TerminalLayout,
}

/// Pairs `fixed` with a second terminal at every `(x, y)` grid point,
/// skipping points within `MIN_DISTANCE` of the array axis (y = 0).
pub fn plane_grid(fixed: Point, x_values: &[f64], y_values: &[f64]) -> Result<Vec<GridLayout>> {
    if x_values.is_empty() || y_values.is_empty() {
        return Err(Error::invalid("grid", "x_values and y_values must be non-empty"));
    }
    let mut out = Vec::with_capacity(x_values.len() * y_values.len());
    for (ix, &x) in x_values.iter().enumerate() {
        for (iy, &y) in y_values.iter().enumerate() {
            if y.abs() < MIN_DISTANCE {
                continue;
            }
            out.push(GridLayout {
                ix,
                iy,
                layout: TerminalLayout::new(vec![fixed, Point::new(x, y)])?,
            });
        }
    }
    Ok(out)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}
