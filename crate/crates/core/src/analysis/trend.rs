use serde::Serialize;

use super::{AnalysisError, DecimatedSeries};
use crate::elastic::ProbeSpec;

/// Least-squares line through a decimated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrendFit {
    pub slope_deg_per_s: f64,
    /// Value of the line at `t = 0` (recording start).
    pub intercept_deg: f64,
    pub residual_rms_deg: f64,
    /// Slope expressed as cable strain rate; needs the probe and cable length.
    pub implied_strain_rate_per_s: Option<f64>,
}

impl TrendFit {
    pub fn eval(&self, t_s: f64) -> f64 {
        self.intercept_deg + self.slope_deg_per_s * t_s
    }

    /// Converts the phase slope into a strain rate of a cable of one-way length `length_m`.
    pub fn with_implied_strain(mut self, probe: &ProbeSpec, length_m: f64) -> Self {
        let dl_per_s = super::phase_to_length(self.slope_deg_per_s, probe);
        self.implied_strain_rate_per_s = Some(dl_per_s / length_m);
        self
    }

    /// Adds the line back onto a residual series.
    pub fn retrend(&self, residual: &DecimatedSeries) -> DecimatedSeries {
        let v = residual
            .t_s
            .iter()
            .zip(&residual.value)
            .map(|(t, r)| r + self.eval(*t))
            .collect();
        residual.with_values(v)
    }
}

/// Ordinary least squares on `(t, value)`; returns the fit and the residuals.
pub fn linear_detrend(series: &DecimatedSeries) -> Result<(TrendFit, DecimatedSeries), AnalysisError> {
    let n = series.len();
    if n < 3 {
        return Err(AnalysisError::TooFewPoints { needed: 3, got: n });
    }
    let nf = n as f64;
    let t_mean = series.t_s.iter().sum::<f64>() / nf;
    let y_mean = series.value.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (t, y) in series.t_s.iter().zip(&series.value) {
        let dt = t - t_mean;
        sxx += dt * dt;
        sxy += dt * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateTime);
    }
    let slope = sxy / sxx;
    let residual: Vec<f64> = series
        .t_s
        .iter()
        .zip(&series.value)
        .map(|(t, y)| (y - y_mean) - slope * (t - t_mean))
        .collect();
    let rms = (residual.iter().map(|r| r * r).sum::<f64>() / nf).sqrt();
    let fit = TrendFit {
        slope_deg_per_s: slope,
        intercept_deg: y_mean - slope * t_mean,
        residual_rms_deg: rms,
        implied_strain_rate_per_s: None,
    };
    Ok((fit, series.with_values(residual)))
}
