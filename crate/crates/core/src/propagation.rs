//! Free-space line-of-sight channel between array elements and terminals.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{Complex, DMatrix, DVectorView};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::geometry::{ArrayGeometry, Point};
use crate::scenarios::TerminalLayout;

pub type C64 = Complex<f64>;

/// Antenna-terminal separations below this are treated as coincident.
pub const MIN_DISTANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModel {
    wavelength: f64,
    gamma: C64,
    wavenumber: f64,
}

impl ChannelModel {
    pub fn new(wavelength: f64) -> Result<Self> {
        Self::with_gamma(wavelength, C64::new(1.0, 0.0))
    }

    pub fn with_gamma(wavelength: f64, gamma: C64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid("wavelength", format!("must be positive, got {wavelength}")));
        }
        if !(gamma.re.is_finite() && gamma.im.is_finite()) || gamma == C64::new(0.0, 0.0) {
            return Err(Error::invalid("gamma", "must be finite and nonzero"));
        }
        Ok(ChannelModel {
            wavelength,
            gamma,
            wavenumber: 2.0 * PI / wavelength,
        })
    }

    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(Error::invalid("frequency_hz", format!("must be positive, got {frequency_hz}")));
        }
        Self::new(crate::geometry::wavelength(frequency_hz))
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn gamma(&self) -> C64 {
        self.gamma
    }

    /// Free-space wavenumber 2 pi / lambda, rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// Euclidean antenna-terminal distance in the plane.
pub fn path_length(antenna: Point, terminal: Point) -> Result<f64> {
    let d = antenna.distance(terminal);
    if d < MIN_DISTANCE {
        return Err(Error::DegenerateGeometry { distance: d, min: MIN_DISTANCE });
    }
    Ok(d)
}

/// Spherical-wave gain `gamma * exp(-j beta R) / R`.
pub fn channel_coefficient(distance: f64, model: &ChannelModel) -> Result<C64> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::DegenerateGeometry { distance, min: MIN_DISTANCE });
    }
    Ok(model.gamma * C64::from_polar(1.0 / distance, -model.wavenumber * distance))
}

/// N x K matrix of antenna-to-user gains; column k is user k's channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    entries: DMatrix<C64>,
    normalized: bool,
}

impl ChannelMatrix {
    /// Wraps raw entries, e.g. for synthetic test channels.
    pub fn from_entries(entries: DMatrix<C64>) -> Self {
        ChannelMatrix { entries, normalized: false }
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn n_antennas(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_users(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn column(&self, k: usize) -> DVectorView<'_, C64> {
        self.entries.column(k)
    }

    /// Rescales every column to Euclidean norm sqrt(N), removing the
    /// per-user path-loss imbalance while keeping column directions.
    pub fn normalize_columns(mut self) -> Result<ChannelMatrix> {
        if self.normalized {
            return Err(Error::AlreadyNormalized);
        }
        let target = (self.n_antennas() as f64).sqrt();
        for (k, mut col) in self.entries.column_iter_mut().enumerate() {
            let norm = col.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::invalid(format!("column {k}"), "zero or non-finite norm"));
            }
            col *= C64::new(target / norm, 0.0);
        }
        self.normalized = true;
        Ok(self)
    }

    /// K x K matrix of pairwise column correlations.
    pub fn correlation_matrix(&self) -> Result<DMatrix<f64>> {
        let k = self.n_users();
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = column_correlation(
                    self.column(i).as_slice(),
                    self.column(j).as_slice(),
                )?;
            }
        }
        Ok(out)
    }

    /// CSV with header `n,k,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,k,re,im")?;
        for k in 0..self.n_users() {
            for n in 0..self.n_antennas() {
                let z = self.entries[(n, k)];
                writeln!(w, "{n},{k},{},{}", sig12(z.re), sig12(z.im))?;
            }
        }
        Ok(())
    }
}

/// Builds the unnormalized channel matrix for `terminals` seen by `geometry`.
pub fn build_channel_matrix(
    geometry: &ArrayGeometry,
    terminals: &TerminalLayout,
    model: &ChannelModel,
) -> Result<ChannelMatrix> {
    build_from_points(geometry.positions(), terminals.positions(), model)
}

pub(crate) fn build_from_points(
    antennas: &[Point],
    terminals: &[Point],
    model: &ChannelModel,
) -> Result<ChannelMatrix> {
    let n = antennas.len();
    let mut data = Vec::with_capacity(n * terminals.len());
    for &t in terminals {
        for &a in antennas {
            data.push(channel_coefficient(path_length(a, t)?, model)?);
        }
    }
    Ok(ChannelMatrix::from_entries(DMatrix::from_vec(n, terminals.len(), data)))
}

/// `|h1 . conj(h2)| / (||h1|| ||h2||)`, in [0, 1].
pub fn column_correlation(h1: &[C64], h2: &[C64]) -> Result<f64> {
    if h1.len() != h2.len() {
        return Err(Error::invalid(
            "h2",
            format!("length {} differs from h1 length {}", h2.len(), h1.len()),
        ));
    }
    let n1 = h1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n2 = h2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::invalid("h", "zero vector has no direction"));
    }
    let inner: C64 = h1.iter().zip(h2).map(|(a, b)| a * b.conj()).sum();
    Ok((inner.norm() / (n1 * n2)).min(1.0))
}
