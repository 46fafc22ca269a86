//! Runs the reference checks of the model chain, as `cable-tide reproduce` does.

use cable_tide::cli::{cmd_reproduce, ReproducePresets, RunConfig};

fn main() {
    let mut out = std::io::stdout().lock();
    match cmd_reproduce(&RunConfig::default(), &ReproducePresets::default(), &mut out) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
