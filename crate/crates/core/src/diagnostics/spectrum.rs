//! Power spectra of time series and their participation ratio.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};

use super::autocorr::MIN_VARIANCE;

pub const MIN_SPECTRUM_LEN: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSpectrum {
    /// Angular frequencies `2πk/(L·dt)` for `k = 1..=L/2`.
    pub frequencies: Vec<f64>,
    /// Normalized to unit sum.
    pub power: Vec<f64>,
    /// `1/Σ p_k²`: the effective number of occupied frequency bins.
    pub participation_ratio: f64,
}

impl PowerSpectrum {
    /// Largest frequency carrying at least `fraction` of the peak power.
    pub fn support_edge(&self, fraction: f64) -> f64 {
        let peak = self.power.iter().cloned().fold(0.0, f64::max);
        self.frequencies
            .iter()
            .zip(&self.power)
            .filter(|(_, &p)| p >= fraction * peak)
            .map(|(&w, _)| w)
            .fold(0.0, f64::max)
    }
}

/// `|X_k|²` of the mean-subtracted series over all `L` bins.
pub fn periodogram(values: &[f64]) -> Vec<f64> {
    let len = values.len();
    if len == 0 {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / len as f64;
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(v - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf.iter().map(|z| z.norm_sqr()).collect()
}

/// Power spectrum without the DC bin, normalized to unit sum.
pub fn power_spectrum(s: &TimeSeries) -> Result<PowerSpectrum> {
    let len = s.len();
    if len < MIN_SPECTRUM_LEN {
        return Err(Error::Validation(format!(
            "power spectrum needs at least {MIN_SPECTRUM_LEN} samples, got {len}"
        )));
    }
    let mean = s.values.iter().sum::<f64>() / len as f64;
    let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / len as f64;
    if var <= MIN_VARIANCE {
        return Err(Error::DegenerateSeries(format!("series '{}' is constant", s.label)));
    }
    let full = periodogram(&s.values);
    let raw = &full[1..=len / 2];
    let total: f64 = raw.iter().sum();
    let power: Vec<f64> = raw.iter().map(|p| p / total).collect();
    let participation_ratio = 1.0 / power.iter().map(|p| p * p).sum::<f64>();
    let dt = if s.dt > 0.0 { s.dt } else { 1.0 };
    let frequencies = (1..=len / 2)
        .map(|k| std::f64::consts::TAU * k as f64 / (len as f64 * dt))
        .collect();
    Ok(PowerSpectrum {
        frequencies,
        power,
        participation_ratio,
    })
}
