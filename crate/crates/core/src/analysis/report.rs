//! End-to-end reduction of one recording.
//!
//! The recovered tilt is a single straight line over the whole record; any
//! curvature of the drift towards the ends of a record ends up in the
//! residuals and is not modelled.

use serde::Serialize;

use super::correlate::{pearson_pairs, resample_onto};
use super::spectral::{amplitude_envelope, envelope_extrema, fit_sinusoid, peaks, periodogram};
use super::{
    block_average, linear_detrend, pearson_correlation, AnalysisError, DecimatedSeries, PeriodogramPoint,
    TemperatureSeries, TrendFit, DEFAULT_PERIOD_GRID,
};
use crate::elastic::ProbeSpec;
use crate::georoute::CableRoute;
use crate::instrument::RecordingSeries;

/// M2 period; used to locate the semidiurnal envelope minimum.
const SEMIDIURNAL_PERIOD_S: f64 = 44_714.16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub window_s: f64,
    pub min_period_s: f64,
    pub max_period_s: f64,
    /// Half-width of the window around the neap that is left out of the
    /// period search; 0 disables masking.
    pub neap_exclusion_s: f64,
    pub reference_period_s: f64,
    pub period_grid: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            window_s: 600.0,
            min_period_s: 6.0 * 3_600.0,
            max_period_s: 30.0 * 3_600.0,
            neap_exclusion_s: 1.5 * 86_400.0,
            reference_period_s: SEMIDIURNAL_PERIOD_S,
            period_grid: DEFAULT_PERIOD_GRID,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    /// Detrended phase against aggregated tide; `None` when undefined.
    pub pearson_r: Option<f64>,
    pub trend: TrendFit,
    /// Periodogram maxima of the detrended phase, strongest first.
    pub dominant_periods_s: Vec<PeriodogramPoint>,
    /// Fitted amplitude at the reference period, outside the neap window.
    pub semidiurnal_amplitude_deg: f64,
    /// Regression slope of detrended phase on aggregated tide.
    pub at_gain_deg_per_m: Option<f64>,
    /// Time of the weakest semidiurnal tide, seconds after start.
    pub neap_t_s: Option<f64>,
    pub temperature_r: Option<f64>,
    /// Typical |r| of two unrelated white series of this length.
    pub temperature_r_null_scale: Option<f64>,
    pub bins: usize,
    pub notes: Vec<String>,
}

/// Report plus the intermediate series, for plotting.
#[derive(Debug, Clone)]
pub struct AnalysisProducts {
    pub report: AnalysisReport,
    pub binned: DecimatedSeries,
    pub detrended: DecimatedSeries,
    /// Aggregated tide resampled onto the binned grid.
    pub at: Vec<Option<f64>>,
    pub periodogram: Vec<PeriodogramPoint>,
}

/// Bins the recording, then runs [`analyze_decimated`].
pub fn analyze(
    recording: &RecordingSeries,
    predicted_at: &DecimatedSeries,
    probe: &ProbeSpec,
    route: &CableRoute,
    opts: &AnalysisOptions,
) -> Result<AnalysisProducts, AnalysisError> {
    let binned = block_average(recording, opts.window_s)?;
    let temperature = recording
        .temperature
        .as_deref()
        .filter(|t| t.len() >= 2)
        .map(|t| {
            let interval_s = t[1].t_s - t[0].t_s;
            block_average(&TemperatureSeries { samples: t, interval_s }, opts.window_s)
        })
        .transpose()?;
    analyze_decimated(binned, predicted_at, temperature.as_ref(), probe, route, opts)
}

/// Runs detrend, correlation and period search on an already binned series.
pub fn analyze_decimated(
    binned: DecimatedSeries,
    predicted_at: &DecimatedSeries,
    temperature: Option<&DecimatedSeries>,
    probe: &ProbeSpec,
    route: &CableRoute,
    opts: &AnalysisOptions,
) -> Result<AnalysisProducts, AnalysisError> {
    let binned = if binned.bin_width_s == opts.window_s {
        binned
    } else {
        block_average(&binned, opts.window_s)?
    };
    let mut notes = Vec::new();
    let (trend, detrended) = linear_detrend(&binned)?;
    let trend = trend.with_implied_strain(probe, route.total_length_m());

    let at = resample_onto(&detrended, predicted_at);
    let pairs: Vec<(f64, f64)> = detrended
        .value
        .iter()
        .zip(&at)
        .filter_map(|(x, y)| y.map(|y| (*x, y)))
        .collect();
    let at_rms = rms_about_mean(pairs.iter().map(|p| p.1));
    let pearson_r = if pairs.len() < 3 {
        notes.push(format!("pearson_r undefined: only {} bins overlap the tide prediction", pairs.len()));
        None
    } else if at_rms < 1e-12 {
        // Cancelling or null tide: round-off is not a signal.
        notes.push("pearson_r undefined: aggregated tide has zero variance".to_string());
        None
    } else {
        match pearson_pairs(&pairs) {
            Ok(r) => Some(r),
            Err(e) => {
                notes.push(format!("pearson_r undefined: {e}"));
                None
            }
        }
    };
    let at_gain_deg_per_m = pearson_r.map(|_| regression_slope(&pairs));

    let neap_t_s = find_neap(predicted_at, opts);
    let masked = match neap_t_s {
        Some(neap) if opts.neap_exclusion_s > 0.0 => {
            notes.push(format!(
                "period search excludes {:.2} d around the neap at {:.2} d",
                opts.neap_exclusion_s / 86_400.0,
                neap / 86_400.0
            ));
            detrended.filter_time(|t| (t - neap).abs() > opts.neap_exclusion_s)
        }
        _ => detrended.clone(),
    };
    let pg = periodogram(&masked, opts.min_period_s, opts.max_period_s, opts.period_grid)?;
    let dominant_periods_s = peaks(&masked, &pg);
    let semidiurnal_amplitude_deg = fit_sinusoid(&masked.t_s, &masked.value, opts.reference_period_s)
        .map(|f| f.amplitude)
        .unwrap_or(0.0);

    let (temperature_r, temperature_r_null_scale) = match temperature {
        Some(temp) => match pearson_correlation(&detrended, temp) {
            Ok(r) => (Some(r), Some(1.0 / (temp.len().min(detrended.len()) as f64).sqrt())),
            Err(e) => {
                notes.push(format!("temperature correlation undefined: {e}"));
                (None, None)
            }
        },
        None => (None, None),
    };

    let report = AnalysisReport {
        pearson_r,
        trend,
        dominant_periods_s,
        semidiurnal_amplitude_deg,
        at_gain_deg_per_m,
        neap_t_s,
        temperature_r,
        temperature_r_null_scale,
        bins: binned.len(),
        notes,
    };
    Ok(AnalysisProducts {
        report,
        binned,
        detrended,
        at,
        periodogram: pg,
    })
}

fn rms_about_mean(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let m = v.clone().sum::<f64>() / n;
    (v.map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt()
}

/// Slope of `x` regressed on `y` for pairs `(x, y)`.
fn regression_slope(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut syy, mut sxy) = (0.0, 0.0);
    for (x, y) in pairs {
        syy += (y - my).powi(2);
        sxy += (x - mx) * (y - my);
    }
    sxy / syy
}

/// Weakest point of the sliding semidiurnal envelope of the predicted tide.
///
/// Only minima at least a day inside the envelope count; `None` when there
/// is none or the envelope varies by less than 5 % (no spring-neap cycle).
fn find_neap(predicted_at: &DecimatedSeries, opts: &AnalysisOptions) -> Option<f64> {
    let env = amplitude_envelope(predicted_at, opts.reference_period_s, 2.0 * opts.reference_period_s, 3_600.0);
    let amp_near = |t: f64| {
        env.iter()
            .min_by(|a, b| (a.period_s - t).abs().total_cmp(&(b.period_s - t).abs()))
            .map_or(f64::INFINITY, |p| p.amplitude)
    };
    let hi = env.iter().map(|p| p.amplitude).fold(0.0, f64::max);
    envelope_extrema(&env, false, 86_400.0)
        .into_iter()
        .map(|t| (t, amp_near(t)))
        .filter(|(_, a)| hi > 1e-12 && hi - a > 0.05 * hi)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(t, _)| t)
}
