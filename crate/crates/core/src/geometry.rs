//! Base-station array layouts.
//!
//! Three families are supported: uniformly spaced linear arrays, symmetric
//! sparse linear arrays whose element abscissas are an odd Chebyshev
//! perturbation of uniform sampling, and uniform circular arrays. All
//! coordinates are in meters; spacings are given in wavelengths.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_FREQUENCY_HZ: f64 = 60e9;

/// Free-space wavelength in meters.
pub fn wavelength(frequency_hz: f64) -> f64 {
    SPEED_OF_LIGHT / frequency_hz
}

/// A point in the propagation plane, meters.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryKind {
    LinearEquispaced,
    LinearSparse,
    Circular,
}

/// Shape coefficients of a sparse linear array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseParams {
    /// Mean inter-element spacing, wavelengths.
    pub d0: f64,
    /// Coefficients of the odd Chebyshev terms T_3, T_5, ..., T_{2P+1}.
    pub alphas: Vec<f64>,
}

impl SparseParams {
    pub fn new(d0: f64, alphas: Vec<f64>) -> Self {
        SparseParams { d0, alphas }
    }

    pub fn p(&self) -> usize {
        self.alphas.len()
    }
}

/// Parameters a geometry was generated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Recipe {
    LinearEquispaced { n: usize, spacing: f64, wavelength: f64 },
    LinearSparse { n: usize, params: SparseParams, wavelength: f64 },
    Circular { n: usize, spacing: f64, wavelength: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Point>,
    recipe: Recipe,
}

impl ArrayGeometry {
    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn recipe(&self) -> &Recipe {
        &self.recipe
    }

    pub fn kind(&self) -> GeometryKind {
        match self.recipe {
            Recipe::LinearEquispaced { .. } => GeometryKind::LinearEquispaced,
            Recipe::LinearSparse { .. } => GeometryKind::LinearSparse,
            Recipe::Circular { .. } => GeometryKind::Circular,
        }
    }

    pub fn wavelength(&self) -> f64 {
        match self.recipe {
            Recipe::LinearEquispaced { wavelength, .. }
            | Recipe::LinearSparse { wavelength, .. }
            | Recipe::Circular { wavelength, .. } => wavelength,
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p.x).collect()
    }

    /// Largest distance between any two elements, meters.
    pub fn aperture(&self) -> f64 {
        match &self.recipe {
            Recipe::Circular { n, spacing, wavelength } => {
                2.0 * circle_radius(*n, *spacing, *wavelength)
            }
            _ => {
                let first = self.positions[0];
                let last = self.positions[self.positions.len() - 1];
                first.distance(last)
            }
        }
    }

    /// Distances between neighbouring elements, meters. Circular arrays
    /// include the closing pair (last, first).
    pub fn adjacent_spacings(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .positions
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .collect();
        if self.kind() == GeometryKind::Circular {
            out.push(self.positions[self.positions.len() - 1].distance(self.positions[0]));
        }
        out
    }

    /// Conventional far-field boundary 2 D^2 / lambda using the physical aperture.
    pub fn far_field(&self) -> f64 {
        let d = self.aperture();
        2.0 * d * d / self.wavelength()
    }

    pub fn summary(&self) -> GeometrySummary {
        let lambda = self.wavelength();
        let spacings = self.adjacent_spacings();
        let min = spacings.iter().copied().fold(f64::INFINITY, f64::min);
        let max = spacings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
        GeometrySummary {
            kind: self.kind(),
            n: self.len(),
            wavelength_m: lambda,
            aperture_m: self.aperture(),
            min_spacing_wl: min / lambda,
            max_spacing_wl: max / lambda,
            mean_spacing_wl: mean / lambda,
            far_field_m: self.far_field(),
        }
    }

    /// CSV with header `index,x_m,y_m`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,x_m,y_m")?;
        for (i, p) in self.positions.iter().enumerate() {
            writeln!(w, "{},{},{}", i, sig12(p.x), sig12(p.y))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometrySummary {
    pub kind: GeometryKind,
    pub n: usize,
    pub wavelength_m: f64,
    pub aperture_m: f64,
    pub min_spacing_wl: f64,
    pub max_spacing_wl: f64,
    pub mean_spacing_wl: f64,
    pub far_field_m: f64,
}

fn check_common(n: usize, spacing: f64, wavelength: f64, spacing_field: &str) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 elements, got {n}")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::invalid(spacing_field, format!("must be positive, got {spacing}")));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::invalid(
            "wavelength",
            format!("must be positive, got {wavelength}"),
        ));
    }
    Ok(())
}

/// Sample k of n equispaced points on [-1, 1], exactly antisymmetric in k.
fn unit_sample(k: usize, n: usize) -> f64 {
    (2.0 * k as f64 - (n - 1) as f64) / (n - 1) as f64
}

pub fn linear_equispaced(n: usize, spacing: f64, wavelength: f64) -> Result<ArrayGeometry> {
    check_common(n, spacing, wavelength, "spacing")?;
    let step = spacing * wavelength;
    let positions = (0..n)
        .map(|k| Point::new(0.5 * (2.0 * k as f64 - (n - 1) as f64) * step, 0.0))
        .collect();
    Ok(ArrayGeometry {
        positions,
        recipe: Recipe::LinearEquispaced { n, spacing, wavelength },
    })
}

/// Chebyshev polynomial of the first kind, T_order(u), by three-term recurrence.
pub fn chebyshev_eval(order: usize, u: f64) -> Result<f64> {
    if !(u.abs() <= 1.0) {
        return Err(Error::Domain { value: u, domain: "[-1, 1]" });
    }
    Ok(chebyshev_unchecked(order, u))
}

fn chebyshev_unchecked(order: usize, u: f64) -> f64 {
    match order {
        0 => 1.0,
        1 => u,
        _ => {
            let (mut prev, mut cur) = (1.0, u);
            for _ in 1..order {
                let next = 2.0 * u * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Admissible open interval for the single shape coefficient of a P = 1
/// sparse array. Outside it the continuous position law folds back on itself.
pub const ALPHA1_RANGE: (f64, f64) = (-0.125, 0.25);

pub fn alpha1_admissible(alpha1: f64) -> bool {
    alpha1 > ALPHA1_RANGE.0 && alpha1 < ALPHA1_RANGE.1
}

/// Symmetric sparse linear array
/// `x_n = L ((1 - sum a_p) u_n + sum a_p T_{2p+1}(u_n))` with
/// `L = (n - 1) d0 lambda / 2`, so the mean spacing is `d0` wavelengths.
pub fn tchebyshev_sparse(
    n: usize,
    d0: f64,
    alphas: &[f64],
    wavelength: f64,
) -> Result<ArrayGeometry> {
    check_common(n, d0, wavelength, "d0")?;
    if let Some(a) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(Error::invalid("alphas", format!("non-finite coefficient {a}")));
    }
    let half_aperture = (n - 1) as f64 * d0 * wavelength / 2.0;
    let linear_weight = 1.0 - alphas.iter().sum::<f64>();
    let top_order = 2 * alphas.len() + 1;

    let positions: Vec<Point> = (0..n)
        .map(|k| {
            let u = unit_sample(k, n);
            let mut shape = linear_weight * u;
            // Walk the recurrence once and pick up the odd orders 3, 5, ...
            let (mut prev, mut cur) = (1.0, u);
            for order in 2..=top_order {
                let next = 2.0 * u * cur - prev;
                prev = cur;
                cur = next;
                if order % 2 == 1 {
                    shape += alphas[(order - 3) / 2] * cur;
                }
            }
            Point::new(half_aperture * shape, 0.0)
        })
        .collect();

    let xs: Vec<f64> = positions.iter().map(|p| p.x).collect();
    if let Some(index) = first_non_increasing(&xs) {
        return Err(Error::MonotonicityViolation { index });
    }
    // With a single coefficient the closed-form range is exact; the sampled
    // check alone can miss a fold that falls between two samples.
    if let [alpha1] = alphas {
        if *alpha1 <= ALPHA1_RANGE.0 {
            return Err(Error::MonotonicityViolation { index: n - 1 });
        }
        if *alpha1 >= ALPHA1_RANGE.1 {
            return Err(Error::MonotonicityViolation { index: n / 2 });
        }
    }

    Ok(ArrayGeometry {
        positions,
        recipe: Recipe::LinearSparse {
            n,
            params: SparseParams::new(d0, alphas.to_vec()),
            wavelength,
        },
    })
}

fn first_non_increasing(xs: &[f64]) -> Option<usize> {
    xs.windows(2).position(|w| !(w[1] > w[0])).map(|k| k + 1)
}

/// True iff every position is strictly greater than its predecessor.
pub fn validate_monotonic(positions: &[f64]) -> bool {
    first_non_increasing(positions).is_none()
}

fn circle_radius(n: usize, spacing: f64, wavelength: f64) -> f64 {
    n as f64 * spacing * wavelength / (2.0 * PI)
}

/// Uniform circular array of circumference `n * spacing` wavelengths. Element
/// 0 sits on the +y axis; angles increase clockwise toward +x.
pub fn circular(n: usize, spacing: f64, wavelength: f64) -> Result<ArrayGeometry> {
    check_common(n, spacing, wavelength, "spacing")?;
    let radius = circle_radius(n, spacing, wavelength);
    let positions = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64;
            Point::new(radius * theta.sin(), radius * theta.cos())
        })
        .collect();
    Ok(ArrayGeometry {
        positions,
        recipe: Recipe::Circular { n, spacing, wavelength },
    })
}

/// `2 ((n - 1) d)^2 / lambda` for a linear array of `n` elements at spacing `d`.
pub fn far_field_distance(n: usize, spacing: f64, wavelength: f64) -> Result<f64> {
    check_common(n, spacing, wavelength, "spacing")?;
    let aperture = (n - 1) as f64 * spacing * wavelength;
    Ok(2.0 * aperture * aperture / wavelength)
}
