//! Fluctuation diagnostics: autocorrelations, power spectra, level
//! statistics and the spectral purity reconstruction.

pub mod autocorr;
pub mod levels;
pub mod spectrum;
pub mod trace_rho;

pub use autocorr::{
    fit_correlation_length, fit_exponential, fit_window_end, matrix_autocorrelation, series_autocorrelation,
    AutocorrResult, CorrelationLength, ExpFit,
};
pub use levels::{energy_interval_distribution, mean_level_spacing, nnlsd, IntervalHistogram};
pub use spectrum::{periodogram, power_spectrum, PowerSpectrum};
pub use trace_rho::{trace_rho_squared_spectral, PhiTensor};
