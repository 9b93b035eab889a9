//! Spectral statistics of channel matrices and ensemble reductions.
//!
//! Singular values and the Zero-Forcing gains both go through a Householder
//! QR of H: the K x K triangular factor has the same singular values as H,
//! and `(H^H H)^{-1} = R^{-1} R^{-H}` avoids forming the Gram matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::{ChannelMatrix, C64};

/// Gram matrices above this condition number are rejected by the ZF rate.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum {
    values: Vec<f64>,
}

impl SingularSpectrum {
    /// Sorts `values` descending. Fails on negative or non-finite entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("spectrum", "empty"));
        }
        if values.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::invalid("spectrum", "singular values must be finite and >= 0"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SingularSpectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    pub fn smallest(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_tall(h: &DMatrix<C64>) -> Result<()> {
    let (rows, cols) = h.shape();
    if cols == 0 || rows < cols {
        return Err(Error::UnsupportedShape { rows, cols });
    }
    Ok(())
}

fn triangular_factor(h: &DMatrix<C64>) -> DMatrix<C64> {
    h.clone().qr().r()
}

fn spectrum_of_square(r: DMatrix<C64>) -> Result<SingularSpectrum> {
    SingularSpectrum::new(r.singular_values().iter().copied().collect())
}

/// Singular values of an N x K matrix with N >= K >= 1, descending.
pub fn singular_values_of(h: &DMatrix<C64>) -> Result<SingularSpectrum> {
    check_tall(h)?;
    spectrum_of_square(triangular_factor(h))
}

pub fn singular_values(h: &ChannelMatrix) -> Result<SingularSpectrum> {
    singular_values_of(h.entries())
}

/// `20 log10(sigma_max / sigma_min)`.
pub fn condition_number_db(spectrum: &SingularSpectrum) -> Result<f64> {
    let (hi, lo) = (spectrum.largest(), spectrum.smallest());
    if lo <= 0.0 {
        return Err(Error::SingularMatrix { condition: f64::INFINITY });
    }
    Ok(20.0 * (hi / lo).log10())
}

/// Diagonal of `(H^H H)^{-1}` from the triangular factor, plus the factor's
/// singular spectrum for the conditioning check.
fn zf_gains(h: &DMatrix<C64>) -> Result<(Vec<f64>, SingularSpectrum)> {
    check_tall(h)?;
    let r = triangular_factor(h);
    let spectrum = spectrum_of_square(r.clone())?;
    let ratio = spectrum.largest() / spectrum.smallest();
    let gram_condition = ratio * ratio;
    if !(gram_condition.is_finite() && gram_condition <= MAX_GRAM_CONDITION) {
        return Err(Error::SingularMatrix { condition: gram_condition });
    }
    let k = r.nrows();
    let identity = DMatrix::<C64>::identity(k, k);
    let r_inv = r
        .solve_upper_triangular(&identity)
        .ok_or(Error::SingularMatrix { condition: f64::INFINITY })?;
    let gains = (0..k)
        .map(|row| r_inv.row(row).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .collect();
    Ok((gains, spectrum))
}

/// Zero-Forcing sum rate in bit/s/Hz:
/// `sum_k log2(1 + snr / (N [(H^H H)^{-1}]_kk))` on a column-normalized H.
pub fn zf_sum_rate(h: &ChannelMatrix, snr_linear: f64) -> Result<f64> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if !(snr_linear > 0.0 && snr_linear.is_finite()) {
        return Err(Error::invalid("snr", format!("must be positive, got {snr_linear}")));
    }
    let n = h.n_antennas() as f64;
    let (gains, _) = zf_gains(h.entries())?;
    let rates: Vec<f64> = gains.iter().map(|g| (1.0 + snr_linear / (n * g)).log2()).collect();
    Ok(pairwise_sum(&rates))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Pairwise (cascade) summation with a fixed split, so the result depends
/// only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        values.iter().fold(0.0, |acc, v| acc + v)
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Fixed-width histogram over `[lo, hi]`; the last bin is closed. Samples
/// outside the range are not counted. A zero-width range is widened by 0.5
/// on each side.
pub fn histogram(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::invalid("bins", "need at least one bin"));
    }
    let (mut lo, mut hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid("range", format!("invalid histogram range [{lo}, {hi}]")));
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if !(x >= lo && x <= hi) {
            continue;
        }
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Quantile by linear interpolation between order statistics of `sorted`
/// (position `level * (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], level: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::invalid("samples", "empty"));
    }
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::invalid("quantile", format!("level {level} outside [0, 1]")));
    }
    let pos = level * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

pub fn quantile(samples: &[f64], level: f64) -> Result<f64> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, level)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub histogram: Histogram,
    /// `(level, value)` pairs in the requested order.
    pub quantiles: Vec<(f64, f64)>,
}

impl EnsembleStats {
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles.iter().find(|(l, _)| *l == level).map(|(_, v)| *v)
    }
}

pub fn mean_std(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    let n = samples.len() as f64;
    let mean = pairwise_sum(samples) / n;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    Ok((mean, (pairwise_sum(&sq) / n).sqrt()))
}

/// Mean, population std, a `bins`-bin histogram over the observed range and
/// the requested quantiles.
pub fn ensemble_stats(samples: &[f64], bins: usize, levels: &[f64]) -> Result<EnsembleStats> {
    let (mean, std) = mean_std(samples)?;
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples", "non-finite sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let quantiles = levels
        .iter()
        .map(|&l| quantile_sorted(&sorted, l).map(|q| (l, q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleStats {
        count: samples.len(),
        mean,
        std,
        min,
        max,
        histogram: histogram(samples, bins, (min, max))?,
        quantiles,
    })
}
