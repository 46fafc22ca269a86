//! Synthesizes six days in memory and runs the full analysis chain on it.

use cable_tide::analysis::{analyze, at_series, AnalysisOptions};
use cable_tide::elastic::{PressureModel, ProbeSpec, TubeSpec};
use cable_tide::georoute::japan_us_route_file;
use cable_tide::instrument::{synthesize_mpd_series, ArtifactModel, RecordingConfig};
use cable_tide::tide::{EquilibriumParams, LandPolicy, RouteTide, TideModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let route = japan_us_route_file().sample(50e3)?;
    let model = TideModel::Equilibrium(EquilibriumParams::default());
    let probe = ProbeSpec::default();
    let rc = RecordingConfig {
        duration_s: 6.0 * 86_400.0,
        sample_rate_hz: 0.2,
        ..RecordingConfig::default()
    };
    let rec = synthesize_mpd_series(
        &route,
        &model,
        &TubeSpec::steel(),
        &PressureModel::default(),
        &probe,
        &rc,
        &ArtifactModel::default(),
        false,
    )?;

    let opts = AnalysisOptions::default();
    let rt = RouteTide::project(&route, &model, LandPolicy::Error)?;
    let predicted = at_series(&rt, rc.start_utc_s, rc.duration_s, opts.window_s);
    let products = analyze(&rec, &predicted, &probe, &route, &opts)?;
    let r = &products.report;

    println!("bins {}", r.bins);
    println!("pearson r {:?}", r.pearson_r);
    println!(
        "tilt {:+.3e} deg/s (strain rate {:?})",
        r.trend.slope_deg_per_s, r.trend.implied_strain_rate_per_s
    );
    for p in r.dominant_periods_s.iter().take(3) {
        println!("period {:.3} h, amplitude {:.3} deg", p.period_s / 3600.0, p.amplitude);
    }
    println!("semidiurnal amplitude {:.3} deg", r.semidiurnal_amplitude_deg);
    for n in &r.notes {
        println!("note: {n}");
    }
    Ok(())
}
