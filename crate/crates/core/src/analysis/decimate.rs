use serde::Serialize;

use super::AnalysisError;
use crate::instrument::{RecordingSeries, TemperatureSample};

/// Non-overlapping bin means of a sampled series.
///
/// Each bin remembers the time span its inputs covered, so a bin can be
/// compared against a model averaged over exactly the same interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecimatedSeries {
    /// Bin centres (midpoint of `span_s`), seconds since recording start.
    pub t_s: Vec<f64>,
    pub value: Vec<f64>,
    pub bin_width_s: f64,
    pub source_count_per_bin: Vec<usize>,
    /// Covered interval of each bin.
    pub span_s: Vec<[f64; 2]>,
    /// Interval of the raw samples behind the bins.
    pub sample_interval_s: f64,
}

impl DecimatedSeries {
    pub fn len(&self) -> usize {
        self.t_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_s.is_empty()
    }

    /// Same grid, different values.
    pub fn with_values(&self, value: Vec<f64>) -> Self {
        assert_eq!(value.len(), self.len());
        Self {
            value,
            ..self.clone()
        }
    }

    /// Keeps the bins for which `keep(t)` is true.
    pub fn filter_time(&self, keep: impl Fn(f64) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(self.t_s[i])).collect();
        Self {
            t_s: idx.iter().map(|&i| self.t_s[i]).collect(),
            value: idx.iter().map(|&i| self.value[i]).collect(),
            bin_width_s: self.bin_width_s,
            source_count_per_bin: idx.iter().map(|&i| self.source_count_per_bin[i]).collect(),
            span_s: idx.iter().map(|&i| self.span_s[i]).collect(),
            sample_interval_s: self.sample_interval_s,
        }
    }

    pub fn span(&self) -> f64 {
        match (self.span_s.first(), self.span_s.last()) {
            (Some(a), Some(b)) => b[1] - a[0],
            _ => 0.0,
        }
    }
}

/// Anything [`block_average`] can consume.
pub trait SampledSeries {
    /// Interval of the underlying raw samples.
    fn sample_interval_s(&self) -> f64;
    /// Visits `(covered span, value, raw sample count)` in time order.
    fn for_each_point(&self, f: &mut dyn FnMut([f64; 2], f64, usize));
    fn is_empty(&self) -> bool;
}

impl SampledSeries for RecordingSeries {
    fn sample_interval_s(&self) -> f64 {
        self.config.sample_interval_s()
    }

    fn for_each_point(&self, f: &mut dyn FnMut([f64; 2], f64, usize)) {
        let dt = self.sample_interval_s();
        for r in &self.records {
            f([r.t_s, r.t_s + dt], r.mpd_deg, 1);
        }
    }

    fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl SampledSeries for DecimatedSeries {
    fn sample_interval_s(&self) -> f64 {
        self.sample_interval_s
    }

    fn for_each_point(&self, f: &mut dyn FnMut([f64; 2], f64, usize)) {
        for i in 0..self.len() {
            f(self.span_s[i], self.value[i], self.source_count_per_bin[i]);
        }
    }

    fn is_empty(&self) -> bool {
        self.t_s.is_empty()
    }
}

/// Temperature channel sampled on its own cadence.
pub struct TemperatureSeries<'a> {
    pub samples: &'a [TemperatureSample],
    pub interval_s: f64,
}

impl SampledSeries for TemperatureSeries<'_> {
    fn sample_interval_s(&self) -> f64 {
        self.interval_s
    }

    fn for_each_point(&self, f: &mut dyn FnMut([f64; 2], f64, usize)) {
        for s in self.samples {
            f([s.t_s, s.t_s + self.interval_s], s.temp_c, 1);
        }
    }

    fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Incremental block averager; feed points in time order.
///
/// Bins are `[origin + k W, origin + (k+1) W)` with the origin at the start
/// of the first point. A trailing bin is kept only if it holds at least half
/// of the nominal raw sample count `W / dt`.
#[derive(Debug, Clone)]
pub struct BlockAverager {
    window_s: f64,
    sample_interval_s: f64,
    origin: Option<f64>,
    current: Option<i64>,
    sum: f64,
    count: usize,
    span: [f64; 2],
    out: DecimatedSeries,
}

impl BlockAverager {
    pub fn new(window_s: f64, sample_interval_s: f64) -> Result<Self, AnalysisError> {
        if !(sample_interval_s > 0.0) || !(window_s > 2.0 * sample_interval_s) || !window_s.is_finite() {
            return Err(AnalysisError::WindowTooSmall {
                window_s,
                sample_interval_s,
            });
        }
        Ok(Self {
            window_s,
            sample_interval_s,
            origin: None,
            current: None,
            sum: 0.0,
            count: 0,
            span: [0.0; 2],
            out: DecimatedSeries {
                t_s: Vec::new(),
                value: Vec::new(),
                bin_width_s: window_s,
                source_count_per_bin: Vec::new(),
                span_s: Vec::new(),
                sample_interval_s,
            },
        })
    }

    fn flush(&mut self) {
        if self.count > 0 {
            self.out.t_s.push(0.5 * (self.span[0] + self.span[1]));
            self.out.value.push(self.sum / self.count as f64);
            self.out.source_count_per_bin.push(self.count);
            self.out.span_s.push(self.span);
        }
        self.sum = 0.0;
        self.count = 0;
    }

    /// Adds a point covering `span` that is itself the mean of `count` raw samples.
    pub fn push_span(&mut self, span: [f64; 2], value: f64, count: usize) {
        let origin = *self.origin.get_or_insert(span[0]);
        let bin = ((span[0] - origin) / self.window_s + 1e-9).floor() as i64;
        if self.current != Some(bin) {
            self.flush();
            self.current = Some(bin);
            self.span = span;
        }
        self.sum += value * count as f64;
        self.count += count;
        self.span[1] = span[1];
    }

    /// Adds one raw sample taken at `t_s`.
    pub fn push(&mut self, t_s: f64, value: f64) {
        self.push_span([t_s, t_s + self.sample_interval_s], value, 1);
    }

    pub fn finish(mut self) -> Result<DecimatedSeries, AnalysisError> {
        let nominal = (self.window_s / self.sample_interval_s).round() as usize;
        if self.count > 0 && 2 * self.count < nominal {
            self.sum = 0.0;
            self.count = 0;
        }
        self.flush();
        if self.out.is_empty() {
            return Err(AnalysisError::EmptySeries);
        }
        Ok(self.out)
    }
}

/// Averages a series over non-overlapping windows of `window_s`.
pub fn block_average<S: SampledSeries + ?Sized>(series: &S, window_s: f64) -> Result<DecimatedSeries, AnalysisError> {
    if series.is_empty() {
        return Err(AnalysisError::EmptySeries);
    }
    let mut avg = BlockAverager::new(window_s, series.sample_interval_s())?;
    series.for_each_point(&mut |span, v, n| avg.push_span(span, v, n));
    avg.finish()
}

/// `1 - |sinc|` loss of a sinusoid of `period_s` under a boxcar of `window_s`.
pub fn boxcar_attenuation(window_s: f64, period_s: f64) -> f64 {
    let x = std::f64::consts::PI * window_s / period_s;
    if x == 0.0 {
        0.0
    } else {
        1.0 - (x.sin() / x).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::{PhaseRecord, RecordingConfig};

    fn recording(rate: f64, duration: f64, f: impl Fn(f64) -> f64) -> RecordingSeries {
        let config = RecordingConfig {
            duration_s: duration,
            sample_rate_hz: rate,
            ..Default::default()
        };
        let n = config.sample_count().unwrap();
        RecordingSeries {
            config,
            rf_freq_hz: 20e6,
            records: (0..n)
                .map(|i| {
                    let t_s = config.sample_time_s(i);
                    PhaseRecord { t_s, mpd_deg: f(t_s) }
                })
                .collect(),
            ground_truth: None,
            temperature: None,
        }
    }

    #[test]
    fn constant_series() {
        let d = block_average(&recording(2.0, 3_600.0, |_| 1.25), 600.0).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.value.iter().all(|v| *v == 1.25));
        assert_eq!(d.t_s[0], 300.0);
        assert_eq!(d.span_s[1], [600.0, 1200.0]);
    }

    #[test]
    fn counting_at_30_hz() {
        let d = block_average(&recording(30.0, 1_200.0, |t| t), 600.0).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.source_count_per_bin, vec![18_000, 18_000]);
    }

    #[test]
    fn trailing_partial_bin_policy() {
        // 1500 s: third bin holds 300 of 600 nominal samples -> kept.
        let d = block_average(&recording(1.0, 1_500.0, |_| 0.0), 600.0).unwrap();
        assert_eq!(d.source_count_per_bin, vec![600, 600, 300]);
        assert_eq!(d.t_s[2], 1_350.0);
        // 1499 s: 299 < 300 -> dropped.
        let d = block_average(&recording(1.0, 1_499.0, |_| 0.0), 600.0).unwrap();
        assert_eq!(d.source_count_per_bin, vec![600, 600]);
    }

    #[test]
    fn errors() {
        let r = recording(1.0, 100.0, |_| 0.0);
        assert!(matches!(block_average(&r, 2.0), Err(AnalysisError::WindowTooSmall { .. })));
        let mut empty = r.clone();
        empty.records.clear();
        assert!(matches!(block_average(&empty, 60.0), Err(AnalysisError::EmptySeries)));
        // All samples land in a trailing partial bin that gets dropped.
        assert!(matches!(block_average(&r, 600.0), Err(AnalysisError::EmptySeries)));
    }

    #[test]
    fn idempotent_on_decimated() {
        let d = block_average(&recording(1.0, 1_500.0, |t| (t / 500.0).sin()), 600.0).unwrap();
        let again = block_average(&d, 600.0).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn re_averaging_weights_by_count() {
        let d = block_average(&recording(1.0, 3_600.0, |t| t), 600.0).unwrap();
        let coarse = block_average(&d, 1_800.0).unwrap();
        let direct = block_average(&recording(1.0, 3_600.0, |t| t), 1_800.0).unwrap();
        assert_eq!(coarse.source_count_per_bin, direct.source_count_per_bin);
        for (a, b) in coarse.value.iter().zip(&direct.value) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn attenuation_of_tidal_periods() {
        let a = boxcar_attenuation(600.0, 44_714.16);
        assert!(a > 0.0 && a < 1e-3, "{a}");
        assert_eq!(boxcar_attenuation(0.0, 1.0), 0.0);
    }
}
