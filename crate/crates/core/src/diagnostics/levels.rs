//! Level statistics: all-pairs energy intervals and nearest-neighbour
//! spacings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Spectrum;

/// Upper edge of the unfolded-spacing histogram, in mean spacings.
pub const NNLSD_MAX: f64 = 4.0;
/// Mean spacings below this fraction of `max|E|` count as degenerate.
pub const DEGENERATE_SPACING: f64 = 1e-14;
/// Default bin count for the all-pairs interval histogram.
pub const DEFAULT_INTERVAL_BINS: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalHistogram {
    /// `bins + 1` edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub total_pairs: usize,
}

impl IntervalHistogram {
    fn build(samples: impl Iterator<Item = f64>, upper: f64, bins: usize) -> Self {
        let width = upper / bins as f64;
        let mut counts = vec![0usize; bins];
        let mut total = 0;
        for x in samples {
            let idx = if width > 0.0 {
                ((x / width).floor() as usize).min(bins - 1)
            } else {
                0
            };
            counts[idx] += 1;
            total += 1;
        }
        Self {
            bin_edges: (0..=bins).map(|k| k as f64 * width).collect(),
            counts,
            total_pairs: total,
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    /// Counts divided by `total_pairs · bin_width`.
    pub fn density(&self) -> Vec<f64> {
        let norm = self.total_pairs as f64 * self.bin_width();
        self.counts
            .iter()
            .map(|&c| if norm > 0.0 { c as f64 / norm } else { 0.0 })
            .collect()
    }

    /// Upper edge of the highest occupied bin.
    pub fn support(&self) -> f64 {
        self.counts
            .iter()
            .rposition(|&c| c > 0)
            .map_or(0.0, |k| self.bin_edges[k + 1])
    }

    /// Fraction of samples in the first bin.
    pub fn first_bin_fraction(&self) -> f64 {
        if self.total_pairs == 0 {
            0.0
        } else {
            self.counts[0] as f64 / self.total_pairs as f64
        }
    }
}

fn check_bins(bins: usize) -> Result<()> {
    if bins == 0 {
        return Err(Error::Validation("histogram needs at least one bin".into()));
    }
    Ok(())
}

/// Histogram of `ω_ab = (E_a − E_b)/ħ` over all pairs `a > b`, binned on
/// `[0, spread/ħ]`.
pub fn energy_interval_distribution(spec: &Spectrum, hbar: f64, bins: usize) -> Result<IntervalHistogram> {
    check_bins(bins)?;
    if !(hbar > 0.0) {
        return Err(Error::Validation(format!("hbar must be positive, got {hbar}")));
    }
    let e = spec.eigenvalues();
    let samples = (0..e.len()).flat_map(move |a| (0..a).map(move |b| (e[a] - e[b]) / hbar));
    Ok(IntervalHistogram::build(samples, spec.spread() / hbar, bins))
}

/// Mean spacing `spread/(N − 1)` of a sorted spectrum.
pub fn mean_level_spacing(spec: &Spectrum) -> f64 {
    if spec.dim() < 2 {
        0.0
    } else {
        spec.spread() / (spec.dim() - 1) as f64
    }
}

/// Nearest-neighbour spacings unfolded by the mean spacing and binned on
/// `[0, NNLSD_MAX]`; larger spacings land in the last bin.
pub fn nnlsd(spec: &Spectrum, bins: usize) -> Result<IntervalHistogram> {
    check_bins(bins)?;
    if spec.dim() < 3 {
        return Err(Error::Validation(format!(
            "spacing statistics need at least 3 levels, got {}",
            spec.dim()
        )));
    }
    let e = spec.eigenvalues();
    let mean = mean_level_spacing(spec);
    let scale = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(mean >= DEGENERATE_SPACING * scale) || mean == 0.0 {
        return Err(Error::Validation(format!("degenerate spectrum: mean spacing {mean:.3e}")));
    }
    Ok(IntervalHistogram::build(
        e.windows(2).map(|w| (w[1] - w[0]) / mean),
        NNLSD_MAX,
        bins,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::UnitaryOperator;

    fn diag(e: Vec<f64>) -> Spectrum {
        let n = e.len();
        Spectrum::new(e, UnitaryOperator::identity(n)).unwrap()
    }

    #[test]
    fn three_levels() {
        // intervals 1, 1, 2
        let h = energy_interval_distribution(&diag(vec![1.0, 2.0, 3.0]), 1.0, 6).unwrap();
        assert_eq!(h.total_pairs, 3);
        assert!((h.bin_width() - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(h.counts, vec![0, 0, 0, 2, 0, 1]);
        assert!((h.support() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hbar_rescales_frequencies() {
        let h = energy_interval_distribution(&diag(vec![0.0, 0.5]), 0.25, 4).unwrap();
        assert!((h.bin_edges[4] - 2.0).abs() < 1e-15);
        assert_eq!(h.counts, vec![0, 0, 0, 1]);
    }

    #[test]
    fn pair_count() {
        let h = energy_interval_distribution(&diag((0..17).map(|k| (k * k) as f64).collect()), 1.0, 128).unwrap();
        assert_eq!(h.total_pairs, 17 * 16 / 2);
        assert_eq!(h.counts.iter().sum::<usize>(), h.total_pairs);
    }

    #[test]
    fn equally_spaced_spacings_are_unity() {
        let s = nnlsd(&diag((0..10).map(|k| k as f64 * 0.25).collect()), 40).unwrap();
        assert_eq!(s.total_pairs, 9);
        assert_eq!(s.counts[10], 9);
        assert_eq!(s.first_bin_fraction(), 0.0);
        let d = s.density();
        assert!((d.iter().sum::<f64>() * s.bin_width() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(nnlsd(&diag(vec![1.0, 1.0, 1.0]), 10).is_err());
        assert!(nnlsd(&diag(vec![0.0, 1.0]), 10).is_err());
        assert!(nnlsd(&diag(vec![0.0, 1.0, 2.0]), 0).is_err());
        assert!(energy_interval_distribution(&diag(vec![0.0, 1.0]), 0.0, 4).is_err());
    }
}
