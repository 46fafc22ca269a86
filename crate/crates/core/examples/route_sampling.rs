//! Samples the bundled trans-Pacific route at several step sizes.

use cable_tide::georoute::{great_circle_distance, japan_us_route_file, GeoPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = japan_us_route_file();
    let a = file.waypoints[0];
    let b = file.waypoints[file.waypoints.len() - 1];
    println!("route {}: {} waypoints", file.name, file.waypoints.len());
    println!("end-to-end geodesic {:.1} km", great_circle_distance(&a, &b) / 1e3);

    println!("{:>10} {:>9} {:>14} {:>8}", "step_km", "segments", "length_km", "scale");
    for step_km in [500.0, 200.0, 100.0, 50.0, 10.0] {
        let route = file.sample(step_km * 1e3)?;
        println!(
            "{:>10.0} {:>9} {:>14.3} {:>8.4}",
            step_km,
            route.segments().len(),
            route.total_length_m() / 1e3,
            route.scale_factor()
        );
    }

    let route = file.sample(50e3)?;
    let seg = &route.segments()[route.segments().len() / 2];
    println!(
        "middle segment: {:.3} N {:.3} E, {:.2} km",
        seg.midpoint.lat_deg(),
        seg.midpoint.lon_deg(),
        seg.length_m / 1e3
    );

    // A short custom route; no declared length, so the scale is 1.
    let custom = cable_tide::georoute::sample_route(
        &[GeoPoint::new(0.0, 0.0)?, GeoPoint::new(0.0, 10.0)?],
        100e3,
        None,
    )?;
    println!("equatorial 10 deg: {:.3} km", custom.total_length_m() / 1e3);
    Ok(())
}
