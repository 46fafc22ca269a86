//! Simulated phase-meter recordings.
//!
//! The measured phase difference (MPD) of the looped-back RF probe is built
//! from the modeled cable length change (tide plus a linear tilt) and the
//! artifact inventory of the measurement chain: chromatic-dispersion delay
//! from carrier wavelength drift, synthesizer phase error and white phase
//! noise. A temperature channel is generated independently and never enters
//! the MPD.

mod recording_file;
mod synth;

pub use recording_file::{
    read_recording, visit_recording, write_recording, RecordingFileError, RecordingHeader,
    RecordingWriter, SCHEMA_VERSION,
};
pub use synth::{synthesize_mpd_series, SampleIter, SynthSample, Synthesizer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elastic::{ElasticError, ProbeSpec, SPEED_OF_LIGHT_M_PER_S};
use crate::tide::{TideError, DEFAULT_EPOCH_UTC_S};

/// Maximum number of samples in one recording.
pub const MAX_SAMPLES: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstrumentError {
    #[error("recording would have {0} samples, more than 2^31")]
    OverflowSamples(u64),
    #[error("invalid recording config: {0}")]
    InvalidConfig(String),
    #[error("invalid artifact model: {0}")]
    InvalidArtifacts(String),
    #[error(transparent)]
    Tide(#[from] TideError),
    #[error(transparent)]
    Elastic(#[from] ElasticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecordingConfig {
    pub start_utc_s: f64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub rng_seed: u64,
}

impl Default for RecordingConfig {
    fn default() -> Self {
        Self {
            start_utc_s: DEFAULT_EPOCH_UTC_S,
            duration_s: 12.0 * 86_400.0,
            sample_rate_hz: 30.0,
            rng_seed: 20_200_228,
        }
    }
}

impl RecordingConfig {
    pub fn validate(&self) -> Result<(), InstrumentError> {
        let bad = |m: &str| Err(InstrumentError::InvalidConfig(m.to_string()));
        if !self.start_utc_s.is_finite() {
            return bad("start time must be finite");
        }
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return bad("duration must be positive");
        }
        if !(self.sample_rate_hz > 0.0) || !self.sample_rate_hz.is_finite() {
            return bad("sample rate must be positive");
        }
        self.sample_count().map(|_| ())
    }

    /// `floor(duration * rate)`.
    pub fn sample_count(&self) -> Result<usize, InstrumentError> {
        let n = (self.duration_s * self.sample_rate_hz).floor();
        if n > MAX_SAMPLES as f64 {
            return Err(InstrumentError::OverflowSamples(n as u64));
        }
        Ok(n as usize)
    }

    pub fn sample_interval_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    /// Time of sample `i` in seconds since the start.
    pub fn sample_time_s(&self, i: usize) -> f64 {
        i as f64 / self.sample_rate_hz
    }
}

/// Slow room-temperature channel: A/C cycling plus a mean-reverting wander.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemperatureModel {
    pub mean_c: f64,
    pub ac_amplitude_c: f64,
    pub ac_period_s: f64,
    pub wander_sigma_c: f64,
    pub wander_tau_s: f64,
    pub interval_s: f64,
}

impl Default for TemperatureModel {
    fn default() -> Self {
        Self {
            mean_c: 22.0,
            ac_amplitude_c: 0.3,
            ac_period_s: 1_800.0,
            wander_sigma_c: 0.2,
            wander_tau_s: 7_200.0,
            interval_s: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArtifactModel {
    /// Linear strain rate of the cable (negative = shrinking).
    pub tilt_strain_per_s: f64,
    /// Standard deviation of the carrier frequency drift.
    pub ecl_sigma_hz: f64,
    /// The drift is redrawn every `ecl_hold_s` and held in between.
    pub ecl_hold_s: f64,
    pub synth_phase_sigma_deg: f64,
    /// Per-sample white phase noise; a free parameter.
    pub white_phase_sigma_deg: f64,
    pub temperature: Option<TemperatureModel>,
}

impl Default for ArtifactModel {
    fn default() -> Self {
        Self {
            tilt_strain_per_s: -8e-14,
            ecl_sigma_hz: 26e6,
            ecl_hold_s: 60.0,
            synth_phase_sigma_deg: 0.01,
            white_phase_sigma_deg: 0.05,
            temperature: None,
        }
    }
}

impl ArtifactModel {
    /// Every noise source and the tilt switched off.
    pub fn quiet() -> Self {
        Self {
            tilt_strain_per_s: 0.0,
            ecl_sigma_hz: 0.0,
            synth_phase_sigma_deg: 0.0,
            white_phase_sigma_deg: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), InstrumentError> {
        let bad = |m: &str| Err(InstrumentError::InvalidArtifacts(m.to_string()));
        let sigmas = [self.ecl_sigma_hz, self.synth_phase_sigma_deg, self.white_phase_sigma_deg];
        if sigmas.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return bad("all sigmas must be finite and >= 0");
        }
        if !self.tilt_strain_per_s.is_finite() {
            return bad("tilt must be finite");
        }
        if !(self.ecl_hold_s > 0.0) {
            return bad("drift hold interval must be positive");
        }
        if let Some(t) = &self.temperature {
            if !(t.interval_s > 0.0) || !(t.wander_tau_s > 0.0) || !(t.ac_period_s > 0.0) {
                return bad("temperature intervals must be positive");
            }
            if !(t.wander_sigma_c >= 0.0) {
                return bad("temperature sigma must be >= 0");
            }
        }
        Ok(())
    }
}

/// One MPD sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub t_s: f64,
    pub mpd_deg: f64,
}

/// Model values behind one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// One-way length change, tide plus tilt.
    pub dl_m: f64,
    pub at_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSample {
    pub t_s: f64,
    pub temp_c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordingSeries {
    pub config: RecordingConfig,
    pub rf_freq_hz: f64,
    pub records: Vec<PhaseRecord>,
    pub ground_truth: Option<Vec<GroundTruth>>,
    pub temperature: Option<Vec<TemperatureSample>>,
}

impl RecordingSeries {
    pub fn header(&self) -> RecordingHeader {
        RecordingHeader {
            start_utc_s: self.config.start_utc_s,
            sample_rate_hz: self.config.sample_rate_hz,
            duration_s: self.config.duration_s,
            rf_freq_hz: self.rf_freq_hz,
            seed: self.config.rng_seed,
        }
    }
}

/// Group delay from a carrier frequency drift through dispersion.
///
/// `dlambda = lambda^2 dnu / c`, `tau = D * L[km] * dlambda[nm]`, with
/// `path_length_m` the round-trip optical length.
pub fn cd_delay_from_wavelength_drift(d_nu_hz: f64, probe: &ProbeSpec, path_length_m: f64) -> f64 {
    let lambda_m = probe.carrier_wavelength_nm * 1e-9;
    let d_lambda_nm = lambda_m * lambda_m * d_nu_hz / SPEED_OF_LIGHT_M_PER_S * 1e9;
    probe.cd_ps_per_nm_km * (path_length_m / 1e3) * d_lambda_nm * 1e-12
}

/// Probe phase (deg) accumulated by a delay `tau_s`.
pub fn delay_to_phase_deg(tau_s: f64, probe: &ProbeSpec) -> f64 {
    360.0 * probe.rf_freq_hz * tau_s
}
