//! Pressure-induced axial strain of a cable tube and its probe-phase signature.
//!
//! A tube of outer radius `r_o` and inner radius `r_i` loaded by an external
//! pressure change `dP` lengthens by
//!
//! ```text
//! dl = 2 nu / E * r_o^2 / (r_o^2 - r_i^2) * L0 * dP
//! ```
//!
//! `L0` is the one-way cable length. The RF probe travels the cable twice
//! (looped back at the far end), so the phase step uses `2 dl`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::georoute::CableRoute;
use crate::tide::{TideError, TideModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElasticError {
    #[error("invalid tube: {0}")]
    InvalidTube(String),
    #[error("invalid pressure model: rho*g must be positive, got {0}")]
    InvalidPressure(f64),
    #[error("invalid probe: {0}")]
    InvalidProbe(String),
    #[error("cable length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error(transparent)]
    Tide(#[from] TideError),
}

/// Elastic cylinder parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeSpec {
    pub young_modulus_pa: f64,
    pub poisson_ratio: f64,
    pub r_outer_m: f64,
    pub r_inner_m: f64,
    /// Fraction of jacket strain transferred to the fiber.
    #[serde(default = "default_coupling")]
    pub coupling: f64,
}

fn default_coupling() -> f64 {
    1.0
}

impl TubeSpec {
    pub fn new(
        young_modulus_pa: f64,
        poisson_ratio: f64,
        r_outer_m: f64,
        r_inner_m: f64,
        coupling: f64,
    ) -> Result<Self, ElasticError> {
        let t = Self {
            young_modulus_pa,
            poisson_ratio,
            r_outer_m,
            r_inner_m,
            coupling,
        };
        t.validate()?;
        Ok(t)
    }

    /// Steel-wire bound: E = 200 GPa, nu = 0.3, r_o = 4 mm, r_i = 2.6 mm.
    pub fn steel() -> Self {
        Self {
            young_modulus_pa: 200e9,
            poisson_ratio: 0.3,
            r_outer_m: 4.0e-3,
            r_inner_m: 2.6e-3,
            coupling: 1.0,
        }
    }

    /// HDPE-insulation bound: E = 0.8 GPa, nu = 0.45, r_o = 8.5 mm, r_i = 4.6 mm.
    pub fn hdpe() -> Self {
        Self {
            young_modulus_pa: 0.8e9,
            poisson_ratio: 0.45,
            r_outer_m: 8.5e-3,
            r_inner_m: 4.6e-3,
            coupling: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ElasticError> {
        let bad = |m: &str| Err(ElasticError::InvalidTube(m.to_string()));
        if !(self.young_modulus_pa > 0.0) || !self.young_modulus_pa.is_finite() {
            return bad("Young modulus must be positive");
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio <= 0.5) {
            return bad("Poisson ratio must lie in (0, 0.5]");
        }
        if !(self.r_outer_m > 0.0) || !self.r_outer_m.is_finite() {
            return bad("outer radius must be positive");
        }
        if !(self.r_inner_m >= 0.0 && self.r_inner_m < self.r_outer_m) {
            return bad("inner radius must satisfy 0 <= r_i < r_o");
        }
        if !(0.0..=1.0).contains(&self.coupling) {
            return bad("coupling must lie in [0, 1]");
        }
        Ok(())
    }

    /// `r_o^2 / (r_o^2 - r_i^2)`; exactly 1 for a solid rod.
    pub fn geometric_factor(&self) -> f64 {
        let ro2 = self.r_outer_m * self.r_outer_m;
        ro2 / (ro2 - self.r_inner_m * self.r_inner_m)
    }

    /// Axial strain per pascal of external pressure change.
    pub fn strain_per_pa(&self) -> f64 {
        2.0 * self.poisson_ratio / self.young_modulus_pa * self.geometric_factor() * self.coupling
    }
}

/// Hydrostatic head-to-pressure conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureModel {
    pub rho_g_pa_per_m: f64,
}

impl Default for PressureModel {
    /// 9765 Pa/m maps an 8.5 cm head to 830 Pa.
    fn default() -> Self {
        Self { rho_g_pa_per_m: 9_765.0 }
    }
}

impl PressureModel {
    pub fn new(rho_g_pa_per_m: f64) -> Result<Self, ElasticError> {
        let pm = Self { rho_g_pa_per_m };
        pm.validate()?;
        Ok(pm)
    }

    pub fn validate(&self) -> Result<(), ElasticError> {
        if self.rho_g_pa_per_m > 0.0 && self.rho_g_pa_per_m.is_finite() {
            Ok(())
        } else {
            Err(ElasticError::InvalidPressure(self.rho_g_pa_per_m))
        }
    }
}

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// RF probe riding on the optical carrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    pub rf_freq_hz: f64,
    pub group_velocity_m_per_s: f64,
    pub cd_ps_per_nm_km: f64,
    pub carrier_wavelength_nm: f64,
    /// Scales fiber strain into optical-length change (1.0 ignores the photoelastic correction).
    pub strain_optic_factor: f64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            rf_freq_hz: 20e6,
            group_velocity_m_per_s: 2.0e8,
            cd_ps_per_nm_km: 21.0,
            carrier_wavelength_nm: 1550.0,
            strain_optic_factor: 1.0,
        }
    }
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<(), ElasticError> {
        let bad = |m: &str| Err(ElasticError::InvalidProbe(m.to_string()));
        if !(self.rf_freq_hz > 0.0) || !self.rf_freq_hz.is_finite() {
            return bad("RF frequency must be positive");
        }
        if !(self.group_velocity_m_per_s > 0.0) || !self.group_velocity_m_per_s.is_finite() {
            return bad("group velocity must be positive");
        }
        if !(self.carrier_wavelength_nm > 0.0) || !self.carrier_wavelength_nm.is_finite() {
            return bad("carrier wavelength must be positive");
        }
        if !self.cd_ps_per_nm_km.is_finite() {
            return bad("dispersion must be finite");
        }
        if !(self.strain_optic_factor > 0.0) || !self.strain_optic_factor.is_finite() {
            return bad("strain-optic factor must be positive");
        }
        Ok(())
    }

    /// RF wavelength in the fiber; 10 m with the defaults.
    pub fn rf_wavelength_m(&self) -> f64 {
        self.group_velocity_m_per_s / self.rf_freq_hz
    }
}

pub fn hydrostatic_pressure_delta(elevation_m: f64, pm: &PressureModel) -> f64 {
    pm.rho_g_pa_per_m * elevation_m
}

pub fn poisson_unit_strain(tube: &TubeSpec, dp_pa: f64) -> f64 {
    tube.strain_per_pa() * dp_pa
}

/// Length change of a cable of one-way length `l0_m` under `dp_pa`.
pub fn poisson_length_change(tube: &TubeSpec, dp_pa: f64, l0_m: f64) -> Result<f64, ElasticError> {
    if !(l0_m > 0.0) {
        return Err(ElasticError::NonPositiveLength(l0_m));
    }
    Ok(poisson_unit_strain(tube, dp_pa) * l0_m)
}

/// Segment-resolved length change at time `t`: sum_k strain(dP(eta_k)) * len_k.
pub fn route_length_change(
    route: &CableRoute,
    model: &TideModel,
    tube: &TubeSpec,
    pm: &PressureModel,
    t_utc_s: f64,
) -> Result<f64, ElasticError> {
    let mut dl = 0.0;
    for seg in route.segments() {
        let eta = model.elevation(&seg.midpoint, t_utc_s)?;
        dl += poisson_unit_strain(tube, hydrostatic_pressure_delta(eta, pm)) * seg.length_m;
    }
    Ok(dl)
}

/// Probe phase change (deg) for a one-way cable length change: 360 * 2 dl / lambda_RF.
pub fn phase_from_path_change(dl_one_way_m: f64, probe: &ProbeSpec) -> f64 {
    360.0 * 2.0 * dl_one_way_m * probe.strain_optic_factor / probe.rf_wavelength_m()
}
