use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{HarmonicTerm, TideError};
use crate::georoute::GeoPoint;

/// 2020-02-28T06:06:29Z, the start of the reference recording.
pub const DEFAULT_EPOCH_UTC_S: f64 = 1_582_869_989.0;

/// Two-bulge equilibrium tide on a water-covered sphere.
///
/// Each body raises a pair of bulges whose longitude advances linearly in
/// time; the elevation is
///
/// ```text
/// eta = cos^2(lat) * [ A_m cos(2(lon - phi_m(t))) + A_s cos(2(lon - phi_s(t))) ]
/// phi_x(t) = phi_x0 + 2 pi (t - epoch) / (2 T_x)
/// ```
///
/// where `T_x` is the semidiurnal period. With equal initial phases the
/// bulges are aligned (spring tide) at the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquilibriumParams {
    pub lunar_amp_m: f64,
    pub solar_amp_m: f64,
    pub lunar_semidiurnal_period_s: f64,
    pub solar_semidiurnal_period_s: f64,
    pub lunar_phase0_rad: f64,
    pub solar_phase0_rad: f64,
    pub epoch_utc_s: f64,
}

impl Default for EquilibriumParams {
    fn default() -> Self {
        Self {
            lunar_amp_m: 0.24,
            solar_amp_m: 0.11,
            lunar_semidiurnal_period_s: 44_714.16,
            solar_semidiurnal_period_s: 43_200.0,
            lunar_phase0_rad: 0.0,
            solar_phase0_rad: 0.0,
            epoch_utc_s: DEFAULT_EPOCH_UTC_S,
        }
    }
}

impl EquilibriumParams {
    pub fn validate(&self) -> Result<(), TideError> {
        let finite = [
            self.lunar_amp_m,
            self.solar_amp_m,
            self.lunar_semidiurnal_period_s,
            self.solar_semidiurnal_period_s,
            self.lunar_phase0_rad,
            self.solar_phase0_rad,
            self.epoch_utc_s,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(TideError::InvalidParams("non-finite equilibrium parameter".into()));
        }
        if self.lunar_amp_m < 0.0 || self.solar_amp_m < 0.0 {
            return Err(TideError::InvalidParams("amplitudes must be >= 0".into()));
        }
        if self.lunar_semidiurnal_period_s <= 0.0 || self.solar_semidiurnal_period_s <= 0.0 {
            return Err(TideError::InvalidParams("periods must be > 0".into()));
        }
        Ok(())
    }

    /// Beat period of the two semidiurnal terms (about 14.77 d with defaults).
    pub fn spring_neap_period_s(&self) -> f64 {
        1.0 / (1.0 / self.solar_semidiurnal_period_s - 1.0 / self.lunar_semidiurnal_period_s).abs()
    }

    fn bulge_longitude(phase0: f64, semidiurnal_period_s: f64, tau: f64) -> f64 {
        phase0 + 2.0 * PI * tau / (2.0 * semidiurnal_period_s)
    }

    pub fn elevation(&self, at: &GeoPoint, t_utc_s: f64) -> f64 {
        let tau = t_utc_s - self.epoch_utc_s;
        let lon = at.lon_deg().to_radians();
        let c2 = at.lat_deg().to_radians().cos().powi(2);
        let phi_m = Self::bulge_longitude(self.lunar_phase0_rad, self.lunar_semidiurnal_period_s, tau);
        let phi_s = Self::bulge_longitude(self.solar_phase0_rad, self.solar_semidiurnal_period_s, tau);
        c2 * (self.lunar_amp_m * (2.0 * (lon - phi_m)).cos()
            + self.solar_amp_m * (2.0 * (lon - phi_s)).cos())
    }

    /// The same field written as `C cos(w tau) + S sin(w tau)` per body.
    pub(crate) fn local_terms(&self, at: &GeoPoint) -> [HarmonicTerm; 2] {
        let lon = at.lon_deg().to_radians();
        let c2 = at.lat_deg().to_radians().cos().powi(2);
        let term = |amp: f64, phase0: f64, period: f64| {
            let arg = 2.0 * (lon - phase0);
            HarmonicTerm {
                omega_rad_per_s: 2.0 * PI / period,
                cos_m: c2 * amp * arg.cos(),
                sin_m: c2 * amp * arg.sin(),
            }
        };
        [
            term(self.lunar_amp_m, self.lunar_phase0_rad, self.lunar_semidiurnal_period_s),
            term(self.solar_amp_m, self.solar_phase0_rad, self.solar_semidiurnal_period_s),
        ]
    }
}
