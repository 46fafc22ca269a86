//! Pressure to strain to length to phase, for the built-in tube materials.

use cable_tide::elastic::{
    hydrostatic_pressure_delta, phase_from_path_change, poisson_length_change, PressureModel, ProbeSpec, TubeSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pm = PressureModel::default();
    let probe = ProbeSpec::default();
    let l0 = 10.4e6;
    let head = 0.085;
    let dp = hydrostatic_pressure_delta(head, &pm);
    println!("head {head} m -> dP {dp:.3} Pa (lambda_RF {:.1} m)", probe.rf_wavelength_m());

    for (name, tube) in [("steel", TubeSpec::steel()), ("hdpe", TubeSpec::hdpe())] {
        tube.validate()?;
        let dl = poisson_length_change(&tube, dp, l0)?;
        println!(
            "{name:>6}: strain/Pa {:.3e}, dl {:.3} cm, MPD {:.2} deg",
            tube.strain_per_pa(),
            dl * 100.0,
            phase_from_path_change(dl, &probe)
        );
    }

    // Thicker wall, same material: smaller geometric factor, smaller response.
    let thick = TubeSpec::new(200e9, 0.3, 4.0e-3, 1.0e-3, 1.0)?;
    let dl = poisson_length_change(&thick, dp, l0)?;
    println!(" thick: geometric factor {:.3}, dl {:.3} cm", thick.geometric_factor(), dl * 100.0);
    Ok(())
}
