//! Writes a synthetic North Pacific constituent grid usable with `"tide": {"grid": ...}`.
//!
//! Usage: `cargo run --example build_demo_grid [OUT_PATH]`
//! (default `crates/core/data/grids/pacific_demo.json`).

use std::path::PathBuf;

use cable_tide::tide::{
    ConstituentGrid, TideConstituent, DEFAULT_EPOCH_UTC_S, K1_SPEED_DEG_PER_HOUR, M2_SPEED_DEG_PER_HOUR,
    O1_SPEED_DEG_PER_HOUR, S2_SPEED_DEG_PER_HOUR,
};

const LAT0: f64 = 20.0;
const LON0: f64 = 130.0;
const STEP: f64 = 2.0;
const NLAT: usize = 21; // 20..=60 N
const NLON: usize = 61; // 130..=250 E

fn is_land(lat: f64, lon: f64) -> bool {
    // Crude North American coast; keeps the bundled route's landing point wet.
    lon >= 246.0 || (lat >= 50.0 && lon >= 232.0)
}

fn field(amp0: f64, amp_swing: f64, phase0: f64, phase_per_deg_lon: f64) -> Vec<Option<(f64, f64)>> {
    let mut out = Vec::with_capacity(NLAT * NLON);
    for i in 0..NLAT {
        let lat = LAT0 + STEP * i as f64;
        for j in 0..NLON {
            let lon = LON0 + STEP * j as f64;
            let value = (!is_land(lat, lon)).then(|| {
                let amp = amp0 + amp_swing * ((lon - LON0) / 120.0 * std::f64::consts::PI).sin() * lat.to_radians().cos();
                (amp, (phase0 + phase_per_deg_lon * (lon - LON0)).rem_euclid(360.0))
            });
            out.push(value);
        }
    }
    out
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/grids/pacific_demo.json"));
    let grid = ConstituentGrid::new(
        LAT0,
        LON0,
        STEP,
        STEP,
        NLAT,
        NLON,
        DEFAULT_EPOCH_UTC_S,
        vec![
            (TideConstituent::new("M2", M2_SPEED_DEG_PER_HOUR), field(0.35, 0.25, 200.0, 1.5)),
            (TideConstituent::new("S2", S2_SPEED_DEG_PER_HOUR), field(0.12, 0.08, 230.0, 1.5)),
            (TideConstituent::new("K1", K1_SPEED_DEG_PER_HOUR), field(0.25, 0.10, 180.0, 0.8)),
            (TideConstituent::new("O1", O1_SPEED_DEG_PER_HOUR), field(0.18, 0.06, 160.0, 0.8)),
        ],
    )?;
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(&out, grid.to_json())?;
    println!("wrote {} ({}x{} nodes, 4 constituents)", out.display(), NLAT, NLON);
    Ok(())
}
