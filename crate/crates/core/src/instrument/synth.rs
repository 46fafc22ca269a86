use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{
    cd_delay_from_wavelength_drift, delay_to_phase_deg, ArtifactModel, GroundTruth, InstrumentError,
    PhaseRecord, RecordingConfig, RecordingSeries, TemperatureSample,
};
use crate::elastic::{phase_from_path_change, PressureModel, ProbeSpec, TubeSpec};
use crate::georoute::CableRoute;
use crate::tide::{LandPolicy, RouteTide, TideModel};

// One ChaCha stream per noise channel, so switching a channel off never
// shifts the draws of another.
const STREAM_ECL: u64 = 1;
const STREAM_SYNTH: u64 = 2;
const STREAM_WHITE: u64 = 3;
const STREAM_TEMPERATURE: u64 = 4;

fn channel_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Prepared generator for one recording.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    config: RecordingConfig,
    artifacts: ArtifactModel,
    probe: ProbeSpec,
    route_tide: RouteTide,
    /// One-way length change per meter of aggregated tide.
    dl_per_at: f64,
    length_m: f64,
}

impl Synthesizer {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        route: &CableRoute,
        tide_model: &TideModel,
        tube: &TubeSpec,
        pm: &PressureModel,
        probe: &ProbeSpec,
        config: &RecordingConfig,
        artifacts: &ArtifactModel,
        policy: LandPolicy,
    ) -> Result<Self, InstrumentError> {
        config.validate()?;
        artifacts.validate()?;
        tube.validate()?;
        pm.validate()?;
        probe.validate()?;
        let route_tide = RouteTide::project(route, tide_model, policy)?;
        let length_m = route.total_length_m();
        Ok(Self {
            config: *config,
            artifacts: *artifacts,
            probe: *probe,
            route_tide,
            dl_per_at: tube.strain_per_pa() * pm.rho_g_pa_per_m * length_m,
            length_m,
        })
    }

    pub fn config(&self) -> &RecordingConfig {
        &self.config
    }

    pub fn probe(&self) -> &ProbeSpec {
        &self.probe
    }

    pub fn route_tide(&self) -> &RouteTide {
        &self.route_tide
    }

    pub fn route_length_m(&self) -> f64 {
        self.length_m
    }

    /// Noise-free model at `t_s` seconds after the start: (AT, one-way dl, phase).
    pub fn physics_at(&self, t_s: f64) -> (f64, f64, f64) {
        let at = self.route_tide.at(self.config.start_utc_s + t_s);
        let dl = self.dl_per_at * at + self.artifacts.tilt_strain_per_s * t_s * self.length_m;
        (at, dl, phase_from_path_change(dl, &self.probe))
    }

    pub fn samples(&self) -> SampleIter<'_> {
        let seed = self.config.rng_seed;
        SampleIter {
            synth: self,
            next: 0,
            len: self.config.sample_count().unwrap_or(0),
            ecl_rng: channel_rng(seed, STREAM_ECL),
            synth_rng: channel_rng(seed, STREAM_SYNTH),
            white_rng: channel_rng(seed, STREAM_WHITE),
            hold_index: None,
            ecl_phase_deg: 0.0,
            rt_path_m: 2.0 * self.length_m,
        }
    }

    /// Room temperature channel on its own cadence; `None` when not configured.
    pub fn temperature(&self) -> Option<Vec<TemperatureSample>> {
        let tm = self.artifacts.temperature?;
        let mut rng = channel_rng(self.config.rng_seed, STREAM_TEMPERATURE);
        let decay = (-tm.interval_s / tm.wander_tau_s).exp();
        let kick = tm.wander_sigma_c * (1.0 - decay * decay).sqrt();
        let mut wander = tm.wander_sigma_c * rng.sample::<f64, _>(StandardNormal);
        let n = (self.config.duration_s / tm.interval_s).floor() as usize;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let t_s = k as f64 * tm.interval_s;
            let ac = tm.ac_amplitude_c * (2.0 * std::f64::consts::PI * t_s / tm.ac_period_s).sin();
            out.push(TemperatureSample {
                t_s,
                temp_c: tm.mean_c + ac + wander,
            });
            wander = wander * decay + kick * rng.sample::<f64, _>(StandardNormal);
        }
        Some(out)
    }
}

/// One synthesized sample with its ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSample {
    pub t_s: f64,
    pub mpd_deg: f64,
    pub truth_dl_m: f64,
    pub truth_at_m: f64,
    /// Sum of all noise terms contained in `mpd_deg`.
    pub noise_deg: f64,
}

/// Streams samples in time order without materializing the recording.
pub struct SampleIter<'a> {
    synth: &'a Synthesizer,
    next: usize,
    len: usize,
    ecl_rng: ChaCha8Rng,
    synth_rng: ChaCha8Rng,
    white_rng: ChaCha8Rng,
    hold_index: Option<u64>,
    ecl_phase_deg: f64,
    rt_path_m: f64,
}

impl Iterator for SampleIter<'_> {
    type Item = SynthSample;

    fn next(&mut self) -> Option<SynthSample> {
        if self.next >= self.len {
            return None;
        }
        let s = self.synth;
        let am = &s.artifacts;
        let t_s = s.config.sample_time_s(self.next);
        self.next += 1;

        let hold = (t_s / am.ecl_hold_s).floor() as u64;
        if self.hold_index != Some(hold) {
            let d_nu = am.ecl_sigma_hz * self.ecl_rng.sample::<f64, _>(StandardNormal);
            let tau = cd_delay_from_wavelength_drift(d_nu, &s.probe, self.rt_path_m);
            self.ecl_phase_deg = delay_to_phase_deg(tau, &s.probe);
            self.hold_index = Some(hold);
        }
        let synth_noise = am.synth_phase_sigma_deg * self.synth_rng.sample::<f64, _>(StandardNormal);
        let white = am.white_phase_sigma_deg * self.white_rng.sample::<f64, _>(StandardNormal);
        let noise_deg = self.ecl_phase_deg + synth_noise + white;

        let (at, dl, phase) = s.physics_at(t_s);
        Some(SynthSample {
            t_s,
            mpd_deg: phase + noise_deg,
            truth_dl_m: dl,
            truth_at_m: at,
            noise_deg,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.len - self.next;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for SampleIter<'_> {}

/// Builds a full in-memory recording.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_mpd_series(
    route: &CableRoute,
    tide_model: &TideModel,
    tube: &TubeSpec,
    pm: &PressureModel,
    probe: &ProbeSpec,
    rc: &RecordingConfig,
    am: &ArtifactModel,
    with_truth: bool,
) -> Result<RecordingSeries, InstrumentError> {
    let synth = Synthesizer::new(route, tide_model, tube, pm, probe, rc, am, LandPolicy::Error)?;
    let n = rc.sample_count()?;
    let mut records = Vec::with_capacity(n);
    let mut truth = with_truth.then(|| Vec::with_capacity(n));
    for s in synth.samples() {
        records.push(PhaseRecord {
            t_s: s.t_s,
            mpd_deg: s.mpd_deg,
        });
        if let Some(t) = truth.as_mut() {
            t.push(GroundTruth {
                dl_m: s.truth_dl_m,
                at_m: s.truth_at_m,
            });
        }
    }
    Ok(RecordingSeries {
        config: *rc,
        rf_freq_hz: probe.rf_freq_hz,
        records,
        ground_truth: truth,
        temperature: synth.temperature(),
    })
}
