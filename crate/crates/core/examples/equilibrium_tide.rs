//! Equilibrium tide at one point and aggregated along the bundled route.

use cable_tide::georoute::{japan_us_route_file, GeoPoint};
use cable_tide::tide::{EquilibriumParams, LandPolicy, RouteTide, TideModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = EquilibriumParams::default();
    params.validate()?;
    println!("spring-neap beat {:.3} d", params.spring_neap_period_s() / 86_400.0);

    let p = GeoPoint::new(35.0, 140.0)?;
    let t0 = params.epoch_utc_s;
    println!("elevation at 35N 140E, hourly for one day:");
    for h in (0..24).step_by(3) {
        let t = t0 + h as f64 * 3600.0;
        println!("  +{h:02} h  {:+.4} m", params.elevation(&p, t));
    }

    let route = japan_us_route_file().sample(50e3)?;
    let model = TideModel::Equilibrium(params);
    let rt = RouteTide::project(&route, &model, LandPolicy::Error)?;
    println!("aggregated tide: constant {:+.3e} m, {} harmonic terms", rt.constant_m(), rt.terms().len());
    for day in [0.0, 3.5, 7.38, 11.0, 14.77] {
        let t = t0 + day * 86_400.0;
        let mean_abs = (0..288)
            .map(|k| rt.at(t + k as f64 * 300.0).abs())
            .sum::<f64>()
            / 288.0;
        println!("  day {day:>5.2}: mean |AT| over next 24 h = {:.4} m", mean_abs);
    }
    Ok(())
}
