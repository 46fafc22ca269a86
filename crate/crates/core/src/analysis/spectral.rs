//! Least-squares periodogram and sliding amplitude envelopes.
//!
//! At each trial period the series is regressed on `{1, cos wt, sin wt}`;
//! the fitted amplitude is the periodogram value. Gaps and uneven bins need
//! no special handling.

use rayon::prelude::*;
use serde::Serialize;

use super::{AnalysisError, DecimatedSeries};

/// Default number of trial periods on the log-spaced grid.
pub const DEFAULT_PERIOD_GRID: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodogramPoint {
    pub period_s: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinusoidFit {
    pub amplitude: f64,
    /// Phase of `cos(w (t - t_ref) - phase)`.
    pub phase_rad: f64,
    pub offset: f64,
    pub t_ref_s: f64,
}

/// Fits `offset + a cos(w t) + b sin(w t)` over the points of `t` and `y`.
pub fn fit_sinusoid(t: &[f64], y: &[f64], period_s: f64) -> Option<SinusoidFit> {
    let n = t.len();
    if n < 3 {
        return None;
    }
    let t_ref = 0.5 * (t[0] + t[n - 1]);
    let w = 2.0 * std::f64::consts::PI / period_s;
    // Normal equations for [1, c, s].
    let (mut sc, mut ss, mut scc, mut sss, mut scs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut syc, mut sys) = (0.0, 0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        let (s, c) = (w * (ti - t_ref)).sin_cos();
        sc += c;
        ss += s;
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sy += yi;
        syc += yi * c;
        sys += yi * s;
    }
    let nf = n as f64;
    let m = [[nf, sc, ss], [sc, scc, scs], [ss, scs, sss]];
    let rhs = [sy, syc, sys];
    let x = solve3(m, rhs)?;
    Some(SinusoidFit {
        amplitude: x[1].hypot(x[2]),
        phase_rad: x[2].atan2(x[1]),
        offset: x[0],
        t_ref_s: t_ref,
    })
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(&m);
    let scale = m[0][0] * m[1][1] * m[2][2];
    if !(d.abs() > 1e-12 * scale.abs()) {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *o = det3(&mc) / d;
    }
    Some(out)
}

fn check_range(series: &DecimatedSeries, min_period_s: f64, max_period_s: f64) -> Result<(), AnalysisError> {
    if !(min_period_s > 0.0) || !(max_period_s > min_period_s) {
        return Err(AnalysisError::InvalidPeriodRange {
            min_period_s,
            max_period_s,
        });
    }
    let span = series.span();
    if span < 2.0 * max_period_s {
        return Err(AnalysisError::SpanTooShort {
            span_s: span,
            needed_s: 2.0 * max_period_s,
        });
    }
    if series.len() < 3 {
        return Err(AnalysisError::TooFewPoints {
            needed: 3,
            got: series.len(),
        });
    }
    Ok(())
}

/// Amplitude spectrum on `n_periods` log-spaced periods in `[min, max]`.
pub fn periodogram(
    series: &DecimatedSeries,
    min_period_s: f64,
    max_period_s: f64,
    n_periods: usize,
) -> Result<Vec<PeriodogramPoint>, AnalysisError> {
    check_range(series, min_period_s, max_period_s)?;
    let n_periods = n_periods.max(3);
    let (lo, hi) = (min_period_s.ln(), max_period_s.ln());
    Ok((0..n_periods)
        .into_par_iter()
        .map(|k| {
            let period_s = (lo + (hi - lo) * k as f64 / (n_periods - 1) as f64).exp();
            let amplitude = fit_sinusoid(&series.t_s, &series.value, period_s)
                .map(|f| f.amplitude)
                .unwrap_or(0.0);
            PeriodogramPoint { period_s, amplitude }
        })
        .collect())
}

/// Local maxima of the periodogram, strongest first.
///
/// Period resolution is limited by the grid spacing (`ln(max/min) / n`).
pub fn dominant_periods(
    series: &DecimatedSeries,
    min_period_s: f64,
    max_period_s: f64,
) -> Result<Vec<PeriodogramPoint>, AnalysisError> {
    let pg = periodogram(series, min_period_s, max_period_s, DEFAULT_PERIOD_GRID)?;
    Ok(peaks(series, &pg))
}

pub(crate) fn peaks(series: &DecimatedSeries, pg: &[PeriodogramPoint]) -> Vec<PeriodogramPoint> {
    let n = series.len() as f64;
    let mean = series.value.iter().sum::<f64>() / n;
    let var = series.value.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    // Nothing varies: no spectral content at all.
    if var.sqrt() <= 1e-12 * mean.abs().max(1.0) {
        return Vec::new();
    }
    let mut out: Vec<PeriodogramPoint> = pg
        .windows(3)
        .filter(|w| w[1].amplitude > w[0].amplitude && w[1].amplitude >= w[2].amplitude)
        .map(|w| w[1])
        .collect();
    out.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    out
}

/// Sliding-window amplitude at a fixed period, one estimate every `step_s`.
///
/// Windows that hold fewer than half of their possible bins are skipped.
pub fn amplitude_envelope(
    series: &DecimatedSeries,
    period_s: f64,
    window_s: f64,
    step_s: f64,
) -> Vec<PeriodogramPoint> {
    let mut out = Vec::new();
    if series.len() < 3 || !(step_s > 0.0) {
        return out;
    }
    let (t0, t1) = (series.span_s[0][0], series.span_s[series.len() - 1][1]);
    let min_points = ((window_s / series.bin_width_s) * 0.5).max(3.0) as usize;
    let mut centre = t0 + 0.5 * window_s;
    let mut lo = 0;
    while centre + 0.5 * window_s <= t1 + 1e-9 {
        let (a, b) = (centre - 0.5 * window_s, centre + 0.5 * window_s);
        while lo < series.len() && series.t_s[lo] < a {
            lo += 1;
        }
        let hi = lo + series.t_s[lo..].iter().take_while(|t| **t < b).count();
        if hi - lo >= min_points {
            if let Some(fit) = fit_sinusoid(&series.t_s[lo..hi], &series.value[lo..hi], period_s) {
                out.push(PeriodogramPoint {
                    period_s: centre,
                    amplitude: fit.amplitude,
                });
            }
        }
        centre += step_s;
    }
    out
}

/// Extrema of an envelope (`period_s` holds the time) that dominate every
/// point within `min_separation_s` on both sides; candidates closer than that
/// to either end are dropped. Each is refined by a parabola through its
/// neighbours.
pub fn envelope_extrema(env: &[PeriodogramPoint], maxima: bool, min_separation_s: f64) -> Vec<f64> {
    let sign = if maxima { 1.0 } else { -1.0 };
    let (Some(first), Some(last)) = (env.first(), env.last()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for i in 1..env.len().saturating_sub(1) {
        let t = env[i].period_s;
        if t - first.period_s < min_separation_s || last.period_s - t < min_separation_s {
            continue;
        }
        let v = sign * env[i].amplitude;
        let dominates = env
            .iter()
            .enumerate()
            .filter(|(j, p)| *j != i && (p.period_s - t).abs() <= min_separation_s)
            .all(|(j, p)| if j < i { v > sign * p.amplitude } else { v >= sign * p.amplitude });
        if !dominates {
            continue;
        }
        let (y0, y1, y2) = (env[i - 1].amplitude, env[i].amplitude, env[i + 1].amplitude);
        let h = t - env[i - 1].period_s;
        let denom = y0 - 2.0 * y1 + y2;
        out.push(if denom == 0.0 { t } else { t + 0.5 * h * (y0 - y2) / denom });
    }
    out
}
