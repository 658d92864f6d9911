//! Autocorrelations of matrices (along the diagonal direction) and of time
//! series, with exponential fits of their initial decay.

use serde::{Deserialize, Serialize};

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Lowest autocorrelation value the fit window may include.
pub const FIT_FLOOR: f64 = 0.05;
pub const MIN_FIT_POINTS: usize = 3;
/// Local minima above this value do not end the fit window.
pub const SHOULDER_LEVEL: f64 = 0.5;
pub const MIN_VARIANCE: f64 = 1e-24;

/// Least-squares line through `ln C(k)` over the initial decay window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    /// Correlation length in lag units, `−1/slope`.
    pub l_c: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Half-open lag range `[start, stop)` used by the fit.
    pub window: (usize, usize),
    /// Root-mean-square residual of `ln C`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrResult {
    pub lags: Vec<usize>,
    /// Normalized so that `values[0] == 1`.
    pub values: Vec<f64>,
    pub fit: Option<ExpFit>,
}

impl AutocorrResult {
    fn from_values(values: Vec<f64>) -> Self {
        let mut ac = Self {
            lags: (0..values.len()).collect(),
            values,
            fit: None,
        };
        ac.fit = fit_exponential(&ac).ok();
        ac
    }

    pub fn fit_l_c(&self) -> Option<f64> {
        self.fit.map(|f| f.l_c)
    }
}

/// `A(m) = Σ x_ij x*_{i+m,j+m}` over the overlapping block, divided by the
/// number of terms `(N−m)²` and normalized by `A(0)`. With `use_modulus`
/// the entries are replaced by their moduli. The real part is kept.
pub fn matrix_autocorrelation(m: &ComplexMatrix, max_lag: usize, use_modulus: bool) -> Result<AutocorrResult> {
    if !m.is_square() {
        return Err(Error::Validation(format!(
            "autocorrelation needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if max_lag >= n {
        return Err(Error::Validation(format!(
            "max lag {max_lag} must be below the dimension {n}"
        )));
    }
    let x = m.as_nalgebra();
    let raw: Vec<f64> = (0..=max_lag)
        .map(|lag| {
            let span = n - lag;
            let mut acc = 0.0;
            // column-major walk: x[(i, j)] with i fastest
            for j in 0..span {
                for i in 0..span {
                    let (a, b) = (x[(i, j)], x[(i + lag, j + lag)]);
                    acc += if use_modulus {
                        a.norm() * b.norm()
                    } else {
                        (a * b.conj()).re
                    };
                }
            }
            acc / (span * span) as f64
        })
        .collect();
    if !(raw[0] > 0.0) {
        return Err(Error::DegenerateSeries("matrix has no weight at lag 0".into()));
    }
    let mut values: Vec<f64> = raw.iter().map(|v| v / raw[0]).collect();
    values[0] = 1.0;
    Ok(AutocorrResult::from_values(values))
}

fn mean_and_deviations(values: &[f64]) -> (f64, Vec<f64>, f64) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let ss = dev.iter().map(|d| d * d).sum::<f64>();
    (mean, dev, ss)
}

/// Non-circular `C(k) = Σ_t (s_t − s̄)(s_{t+k} − s̄) / Σ_t (s_t − s̄)²`.
pub fn series_autocorrelation(s: &TimeSeries, max_lag: usize) -> Result<AutocorrResult> {
    autocorrelation_of(&s.values, max_lag)
}

pub(crate) fn autocorrelation_of(values: &[f64], max_lag: usize) -> Result<AutocorrResult> {
    if values.len() < 2 * max_lag || values.len() < 2 {
        return Err(Error::Validation(format!(
            "series of length {} is too short for max lag {max_lag}",
            values.len()
        )));
    }
    let (_, dev, ss) = mean_and_deviations(values);
    if ss / values.len() as f64 <= MIN_VARIANCE {
        return Err(Error::DegenerateSeries("series has zero variance".into()));
    }
    let mut out: Vec<f64> = (0..=max_lag)
        .map(|k| dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / ss)
        .collect();
    out[0] = 1.0;
    Ok(AutocorrResult::from_values(out))
}

/// End of the fit window: the first lag whose value is non-positive or at
/// most `max(FIT_FLOOR, first local minimum)`. Minima above
/// `SHOULDER_LEVEL` are plateau wiggles and do not count.
pub fn fit_window_end(values: &[f64]) -> usize {
    let first_min = (1..values.len().saturating_sub(1))
        .find(|&k| values[k - 1] > values[k] && values[k] <= values[k + 1] && values[k] < SHOULDER_LEVEL)
        .map(|k| values[k]);
    let threshold = first_min.map_or(FIT_FLOOR, |v| v.max(FIT_FLOOR));
    (1..values.len())
        .find(|&k| values[k] <= 0.0 || values[k] <= threshold)
        .unwrap_or(values.len())
}

/// Exponential fit of the initial falling portion of `ac`.
pub fn fit_exponential(ac: &AutocorrResult) -> Result<ExpFit> {
    let values = &ac.values;
    if values.first() != Some(&1.0) {
        return Err(Error::Validation("autocorrelation must start at 1".into()));
    }
    let k_stop = fit_window_end(values);
    if k_stop < MIN_FIT_POINTS {
        return Err(Error::FitFailure {
            reason: format!("decay window holds {k_stop} point(s), need {MIN_FIT_POINTS}"),
            k_stop,
        });
    }
    let xs: Vec<f64> = (0..k_stop).map(|k| ac.lags[k] as f64).collect();
    let ys: Vec<f64> = values[..k_stop].iter().map(|v| v.ln()).collect();
    let n = k_stop as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    if !(slope < 0.0) {
        return Err(Error::FitFailure {
            reason: format!("no decay over lags [0, {k_stop}): slope {slope:.3e}"),
            k_stop,
        });
    }
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(ExpFit {
        l_c: -1.0 / slope,
        slope,
        intercept,
        window: (0, k_stop),
        residual,
    })
}

/// Correlation length `l_c` of the initial decay, in lag units.
pub fn fit_correlation_length(ac: &AutocorrResult) -> Result<f64> {
    fit_exponential(ac).map(|f| f.l_c)
}

/// Outcome of estimating a correlation length, including decays too fast
/// for the fit window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CorrelationLength {
    Fitted { l_c: f64 },
    /// The correlation fell to the floor within `k_stop < MIN_FIT_POINTS`
    /// lags; an exponential through `C(0) = 1` would need `l_c ≤ bound`.
    DecayedWithin { k_stop: usize, bound: f64 },
    NoDecay,
}

impl CorrelationLength {
    pub fn of(ac: &AutocorrResult) -> Self {
        match fit_exponential(ac) {
            Ok(fit) => CorrelationLength::Fitted { l_c: fit.l_c },
            Err(Error::FitFailure { k_stop, .. }) if (1..MIN_FIT_POINTS).contains(&k_stop) => {
                CorrelationLength::DecayedWithin {
                    k_stop,
                    bound: k_stop as f64 / (1.0 / FIT_FLOOR).ln(),
                }
            }
            Err(_) => CorrelationLength::NoDecay,
        }
    }

    /// Fitted length, or the upper bound for unresolved fast decays.
    pub fn value(&self) -> Option<f64> {
        match *self {
            CorrelationLength::Fitted { l_c } => Some(l_c),
            CorrelationLength::DecayedWithin { bound, .. } => Some(bound),
            CorrelationLength::NoDecay => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn naive(m: &ComplexMatrix, lag: usize) -> f64 {
        let n = m.rows();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n - lag {
            for j in 0..n - lag {
                acc += m[(i, j)] * m[(i + lag, j + lag)].conj();
            }
        }
        acc.re / ((n - lag) * (n - lag)) as f64
    }

    #[test]
    fn identity_matches_double_loop() {
        let n = 6;
        let id = ComplexMatrix::identity(n);
        let ac = matrix_autocorrelation(&id, 5, false).unwrap();
        for m in 0..=5 {
            let expect = naive(&id, m) / naive(&id, 0);
            assert!((ac.values[m] - expect).abs() < 1e-15);
            // (N−m)/(N−m)² relative to N/N²
            assert!((ac.values[m] - n as f64 / (n - m) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_matrix_is_perfectly_correlated() {
        let ones = ComplexMatrix::from_fn(10, 10, |_, _| C64::new(1.0, 0.0));
        let ac = matrix_autocorrelation(&ones, 9, true).unwrap();
        assert!(ac.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        assert!(matches!(
            fit_correlation_length(&ac),
            Err(Error::FitFailure { .. })
        ));
        assert_eq!(CorrelationLength::of(&ac), CorrelationLength::NoDecay);
    }

    #[test]
    fn random_matrix_decorrelates() {
        let n = 256;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let ac = matrix_autocorrelation(&m, 8, false).unwrap();
            for lag in 1..=8 {
                let bound = 5.0 / (n - lag) as f64 * 3.0;
                assert!(ac.values[lag].abs() < bound, "seed {seed} lag {lag}: {}", ac.values[lag]);
            }
        }
    }

    #[test]
    fn lag_must_be_below_dimension() {
        assert!(matrix_autocorrelation(&ComplexMatrix::identity(4), 4, false).is_err());
    }

    #[test]
    fn cosine_series() {
        let dt = 0.01;
        let omega = 1.3;
        let values: Vec<f64> = (0..100_000).map(|t| (omega * t as f64 * dt).cos()).collect();
        let s = TimeSeries::new(dt, values, "cos").unwrap();
        let ac = series_autocorrelation(&s, 1000).unwrap();
        for k in (0..=1000).step_by(50) {
            assert!((ac.values[k] - (omega * k as f64 * dt).cos()).abs() < 0.02, "k={k}");
        }
    }

    #[test]
    fn white_noise_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let values: Vec<f64> = (0..4096).map(|_| rng.sample(StandardNormal)).collect();
        let s = TimeSeries::new(1.0, values, "noise").unwrap();
        let ac = series_autocorrelation(&s, 200).unwrap();
        assert!(ac.values[1..].iter().all(|v| v.abs() < 0.1));
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = TimeSeries::new(1.0, vec![0.3; 100], "flat").unwrap();
        assert!(matches!(series_autocorrelation(&s, 10), Err(Error::DegenerateSeries(_))));
        let short = TimeSeries::new(1.0, vec![0.0, 1.0, 0.0], "short").unwrap();
        assert!(series_autocorrelation(&short, 2).is_err());
    }

    fn from_values(values: Vec<f64>) -> AutocorrResult {
        AutocorrResult::from_values(values)
    }

    #[test]
    fn exact_exponential_fit() {
        let ac = from_values((0..60).map(|k| (-(k as f64) / 5.0).exp()).collect());
        let l_c = fit_correlation_length(&ac).unwrap();
        assert!((l_c - 5.0).abs() < 1e-9);
        assert_eq!(ac.fit_l_c(), Some(l_c));
    }

    #[test]
    fn perturbed_exponential_fit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut values: Vec<f64> = (0..60)
            .map(|k| (-(k as f64) / 5.0).exp() * (1.0 + 0.01 * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        values[0] = 1.0;
        let l_c = fit_correlation_length(&from_values(values)).unwrap();
        assert!((l_c - 5.0).abs() < 0.5, "{l_c}");
    }

    #[test]
    fn window_stops_at_first_minimum() {
        // dips to 0.4 then recovers; the threshold becomes 0.4
        let values = vec![1.0, 0.8, 0.6, 0.4, 0.5, 0.7, 0.2];
        assert_eq!(fit_window_end(&values), 3);
        // monotone decay crosses the floor
        let values: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        assert_eq!(fit_window_end(&values), 5);
        // a dip on the shoulder is ignored
        let values = vec![1.0, 0.999, 1.001, 0.9, 0.5, 0.2, 0.04, 0.1];
        assert_eq!(fit_window_end(&values), 6);
    }

    #[test]
    fn instant_decay_is_bounded() {
        let ac = from_values(vec![1.0, 0.01, -0.02, 0.005]);
        assert!(matches!(fit_exponential(&ac), Err(Error::FitFailure { k_stop: 1, .. })));
        match CorrelationLength::of(&ac) {
            CorrelationLength::DecayedWithin { k_stop, bound } => {
                assert_eq!(k_stop, 1);
                assert!((bound - 1.0 / 20f64.ln()).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }
}
