//! Reduction of phase recordings: binning, tilt removal, correlation with the
//! aggregated tide and period detection.

mod correlate;
mod decimate;
mod report;
mod spectral;
mod trend;

pub use correlate::{pearson_correlation, resample_onto};
pub use decimate::{block_average, boxcar_attenuation, BlockAverager, DecimatedSeries, SampledSeries, TemperatureSeries};
pub use report::{analyze, analyze_decimated, AnalysisOptions, AnalysisProducts, AnalysisReport};
pub use spectral::{
    amplitude_envelope, dominant_periods, envelope_extrema, fit_sinusoid, periodogram, PeriodogramPoint, SinusoidFit,
    DEFAULT_PERIOD_GRID,
};
pub use trend::{linear_detrend, TrendFit};

use thiserror::Error;

use crate::elastic::ProbeSpec;
use crate::tide::RouteTide;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("series is empty")]
    EmptySeries,
    #[error("window {window_s} s must exceed twice the sample interval {sample_interval_s} s")]
    WindowTooSmall { window_s: f64, sample_interval_s: f64 },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all sample times are equal")]
    DegenerateTime,
    #[error("series share only {overlap} bins")]
    GridMismatch { overlap: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("span {span_s} s is shorter than the {needed_s} s needed for the requested periods")]
    SpanTooShort { span_s: f64, needed_s: f64 },
    #[error("invalid period range [{min_period_s}, {max_period_s}] s")]
    InvalidPeriodRange { min_period_s: f64, max_period_s: f64 },
}

/// One-way cable length change behind a phase change; inverse of
/// [`crate::elastic::phase_from_path_change`].
pub fn phase_to_length(phase_deg: f64, probe: &ProbeSpec) -> f64 {
    phase_deg * probe.rf_wavelength_m() / (720.0 * probe.strain_optic_factor)
}

/// Aggregated tide averaged over exactly the spans of `grid`.
///
/// Spans are seconds after `start_utc_s`.
pub fn at_on_grid(route_tide: &RouteTide, start_utc_s: f64, grid: &DecimatedSeries) -> DecimatedSeries {
    grid.with_values(
        grid.span_s
            .iter()
            .map(|[a, b]| route_tide.mean_over(start_utc_s + a, start_utc_s + b))
            .collect(),
    )
}

/// Aggregated tide on consecutive bins `[k W, (k+1) W)` covering `duration_s`.
pub fn at_series(route_tide: &RouteTide, start_utc_s: f64, duration_s: f64, window_s: f64) -> DecimatedSeries {
    let n = (duration_s / window_s).floor() as usize;
    let span_s: Vec<[f64; 2]> = (0..n).map(|k| [k as f64 * window_s, (k + 1) as f64 * window_s]).collect();
    let grid = DecimatedSeries {
        t_s: span_s.iter().map(|[a, b]| 0.5 * (a + b)).collect(),
        value: vec![0.0; n],
        bin_width_s: window_s,
        source_count_per_bin: vec![1; n],
        span_s,
        sample_interval_s: window_s,
    };
    at_on_grid(route_tide, start_utc_s, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::phase_from_path_change;
    use crate::georoute::{sample_route, GeoPoint};
    use crate::tide::{EquilibriumParams, LandPolicy, TideModel};

    #[test]
    fn phase_length_examples() {
        let p = ProbeSpec::default();
        assert_eq!(phase_to_length(0.0, &p), 0.0);
        assert!((phase_to_length(360.0, &p) - 5.0).abs() < 1e-12);
        assert!((phase_to_length(3.24, &p) - 0.045).abs() < 1e-12);
        for dl in [1e-6, 0.045, -3.3, 120.0] {
            let back = phase_to_length(phase_from_path_change(dl, &p), &p);
            assert!((back - dl).abs() <= 1e-12 * dl.abs());
        }
    }

    #[test]
    fn at_bins_are_exact_means() {
        let a = GeoPoint::new(10.0, 150.0).unwrap();
        let b = GeoPoint::new(20.0, 170.0).unwrap();
        let route = sample_route(&[a, b], 50_000.0, None).unwrap();
        let model = TideModel::Equilibrium(EquilibriumParams::default());
        let rt = RouteTide::project(&route, &model, LandPolicy::Error).unwrap();
        let start = 1.6e9;
        let s = at_series(&rt, start, 86_400.0, 3_600.0);
        assert_eq!(s.len(), 24);
        // Midpoint-rule oracle over 3600 one-second slices.
        let k = 5;
        let oracle = (0..3_600).map(|i| rt.at(start + 3_600.0 * k as f64 + i as f64 + 0.5)).sum::<f64>() / 3_600.0;
        assert!((s.value[k] - oracle).abs() < 1e-9 * rt.max_abs_m());
    }
}
