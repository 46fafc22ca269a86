//! Harmonic constituent grids: interpolation, merging and route projection.

use cable_tide::georoute::{sample_route, GeoPoint};
use cable_tide::tide::{
    ConstituentGrid, LandPolicy, RouteTide, TideConstituent, TideModel, DEFAULT_EPOCH_UTC_S,
    M2_SPEED_DEG_PER_HOUR, S2_SPEED_DEG_PER_HOUR,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m2 = TideConstituent::new("M2", M2_SPEED_DEG_PER_HOUR);
    let s2 = TideConstituent::new("S2", S2_SPEED_DEG_PER_HOUR);

    // 3 x 3 grid, 10 deg spacing, phase growing eastwards; one land node.
    let (nlat, nlon) = (3, 3);
    let m2_nodes: Vec<_> = (0..nlat * nlon)
        .map(|k| {
            let j = k % nlon;
            (k != 8).then_some((0.5, 30.0 * j as f64))
        })
        .collect();
    let a = ConstituentGrid::new(-10.0, 0.0, 10.0, 10.0, nlat, nlon, DEFAULT_EPOCH_UTC_S, vec![(m2, m2_nodes)])?;
    let b = ConstituentGrid::uniform(-10.0, 0.0, 10.0, 10.0, nlat, nlon, DEFAULT_EPOCH_UTC_S, &[(s2, 0.2, 0.0)])?;
    let grid = a.merge(&b)?;

    let p = GeoPoint::new(0.0, 5.0)?;
    for (c, (amp, g)) in grid.constituents().zip(grid.constants_at(&p)?) {
        println!("{} at 0N 5E: {:.3} m, {:.1} deg", c.name, amp, g);
    }
    match grid.elevation(&GeoPoint::new(8.0, 18.0)?, DEFAULT_EPOCH_UTC_S) {
        Ok(h) => println!("near land node: {h:.3} m"),
        Err(e) => println!("near land node: {e}"),
    }

    let route = sample_route(&[GeoPoint::new(0.0, 0.0)?, GeoPoint::new(0.0, 10.0)?], 50e3, None)?;
    let rt = RouteTide::project(&route, &TideModel::Harmonic(grid.clone()), LandPolicy::Error)?;
    for term in rt.terms() {
        println!("AT term: amplitude {:.4} m, period {:.3} h", term.amplitude_m(), 2.0 * std::f64::consts::PI / term.omega_rad_per_s / 3600.0);
    }
    println!("grid JSON is {} bytes", grid.to_json().len());
    Ok(())
}
