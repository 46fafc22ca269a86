//! Streams a two-day synthetic recording to CSV and reads it back.
//!
//! Usage: `cargo run --example synthesize_recording [OUT_PATH]`

use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use cable_tide::elastic::{PressureModel, ProbeSpec, TubeSpec};
use cable_tide::georoute::japan_us_route_file;
use cable_tide::instrument::{
    read_recording, ArtifactModel, GroundTruth, PhaseRecord, RecordingConfig, RecordingHeader, RecordingWriter,
    Synthesizer,
};
use cable_tide::tide::{EquilibriumParams, LandPolicy, TideModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cable_tide_example_recording.csv"));

    let route = japan_us_route_file().sample(50e3)?;
    let model = TideModel::Equilibrium(EquilibriumParams::default());
    let probe = ProbeSpec::default();
    let rc = RecordingConfig {
        duration_s: 2.0 * 86_400.0,
        sample_rate_hz: 0.1,
        ..RecordingConfig::default()
    };
    let synth = Synthesizer::new(
        &route,
        &model,
        &TubeSpec::steel(),
        &PressureModel::default(),
        &probe,
        &rc,
        &ArtifactModel::default(),
        LandPolicy::Error,
    )?;

    let header = RecordingHeader {
        start_utc_s: rc.start_utc_s,
        sample_rate_hz: rc.sample_rate_hz,
        duration_s: rc.duration_s,
        rf_freq_hz: probe.rf_freq_hz,
        seed: rc.rng_seed,
    };
    let file = std::fs::File::create(&out)?;
    let mut writer = RecordingWriter::new(BufWriter::new(file), &header, true)?;
    let mut worst_noise: f64 = 0.0;
    for s in synth.samples() {
        worst_noise = worst_noise.max(s.noise_deg.abs());
        writer.write(
            &PhaseRecord { t_s: s.t_s, mpd_deg: s.mpd_deg },
            Some(&GroundTruth { dl_m: s.truth_dl_m, at_m: s.truth_at_m }),
        )?;
    }
    writer.finish()?;

    let back = read_recording(BufReader::new(std::fs::File::open(&out)?))?;
    println!("wrote {} rows to {}", back.records.len(), out.display());
    println!("largest noise excursion {worst_noise:.3} deg");
    let last = back.records.last().expect("non-empty");
    println!("last sample t={:.0} s mpd={:+.4} deg", last.t_s, last.mpd_deg);
    Ok(())
}
