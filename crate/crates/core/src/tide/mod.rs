//! Sea-surface elevation models and the aggregated tide (AT) along a route.

mod equilibrium;
mod grid;

pub use equilibrium::{EquilibriumParams, DEFAULT_EPOCH_UTC_S};
pub use grid::{
    format_utc, load_constituent_grid, normalize_phase_deg, parse_utc, ConstituentGrid, GridFile,
    GridFileConstituent, NodeValue, TideConstituent, K1_SPEED_DEG_PER_HOUR, M2_SPEED_DEG_PER_HOUR,
    O1_SPEED_DEG_PER_HOUR, S2_SPEED_DEG_PER_HOUR,
};

use thiserror::Error;

use crate::georoute::{CableRoute, GeoPoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TideError {
    #[error("point ({lat_deg}, {lon_deg}) lies outside the grid")]
    OutOfGrid { lat_deg: f64, lon_deg: f64 },
    #[error("point ({lat_deg}, {lon_deg}) touches a land (missing) cell")]
    MissingCell { lat_deg: f64, lon_deg: f64 },
    #[error("grid file: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("negative amplitude {value} in constituent {constituent}")]
    NegativeAmplitude { constituent: String, value: f64 },
    #[error("constituent {constituent}: amplitude and phase disagree on land at row {row}, col {col}")]
    LandMaskMismatch { constituent: String, row: usize, col: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// What to do when a route point falls on land or outside a grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LandPolicy {
    #[default]
    Error,
    /// Treat the point as 0 m elevation (coastal approximation).
    ZeroFill,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TideModel {
    Equilibrium(EquilibriumParams),
    Harmonic(ConstituentGrid),
    /// Constant elevation everywhere and always.
    Uniform { elevation_m: f64 },
}

impl TideModel {
    pub fn elevation(&self, at: &GeoPoint, t_utc_s: f64) -> Result<f64, TideError> {
        match self {
            TideModel::Equilibrium(p) => Ok(p.elevation(at, t_utc_s)),
            TideModel::Harmonic(g) => g.elevation(at, t_utc_s),
            TideModel::Uniform { elevation_m } => Ok(*elevation_m),
        }
    }

    pub fn elevation_with(&self, at: &GeoPoint, t_utc_s: f64, policy: LandPolicy) -> Result<f64, TideError> {
        apply_policy(self.elevation(at, t_utc_s), policy)
    }

    fn epoch_utc_s(&self) -> f64 {
        match self {
            TideModel::Equilibrium(p) => p.epoch_utc_s,
            TideModel::Harmonic(g) => g.epoch_utc_s(),
            TideModel::Uniform { .. } => 0.0,
        }
    }

    fn local_terms(&self, at: &GeoPoint) -> Result<(f64, Vec<HarmonicTerm>), TideError> {
        match self {
            TideModel::Equilibrium(p) => Ok((0.0, p.local_terms(at).to_vec())),
            TideModel::Harmonic(g) => Ok((0.0, g.local_terms(at)?)),
            TideModel::Uniform { elevation_m } => Ok((*elevation_m, Vec::new())),
        }
    }
}

fn apply_policy(r: Result<f64, TideError>, policy: LandPolicy) -> Result<f64, TideError> {
    match (r, policy) {
        (Err(TideError::MissingCell { .. } | TideError::OutOfGrid { .. }), LandPolicy::ZeroFill) => Ok(0.0),
        (r, _) => r,
    }
}

/// One harmonic `cos_m cos(w tau) + sin_m sin(w tau)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct HarmonicTerm {
    pub omega_rad_per_s: f64,
    pub cos_m: f64,
    pub sin_m: f64,
}

impl HarmonicTerm {
    pub fn eval(&self, tau_s: f64) -> f64 {
        let (s, c) = (self.omega_rad_per_s * tau_s).sin_cos();
        self.cos_m * c + self.sin_m * s
    }

    /// Mean over `[tau0, tau1]`.
    pub fn mean(&self, tau0_s: f64, tau1_s: f64) -> f64 {
        let w = self.omega_rad_per_s;
        if tau1_s == tau0_s {
            return self.eval(tau0_s);
        }
        let (s0, c0) = (w * tau0_s).sin_cos();
        let (s1, c1) = (w * tau1_s).sin_cos();
        (self.cos_m * (s1 - s0) - self.sin_m * (c1 - c0)) / (w * (tau1_s - tau0_s))
    }

    pub fn amplitude_m(&self) -> f64 {
        self.cos_m.hypot(self.sin_m)
    }
}

/// Aggregated tide AT(t) = (1/L) * sum_k eta(mid_k, t) * len_k, by direct summation.
pub fn aggregated_tide(route: &CableRoute, model: &TideModel, t_utc_s: f64) -> Result<f64, TideError> {
    aggregated_tide_with(route, model, t_utc_s, LandPolicy::Error)
}

pub fn aggregated_tide_with(
    route: &CableRoute,
    model: &TideModel,
    t_utc_s: f64,
    policy: LandPolicy,
) -> Result<f64, TideError> {
    let mut weighted = 0.0;
    let mut length = 0.0;
    for seg in route.segments() {
        let eta = model.elevation_with(&seg.midpoint, t_utc_s, policy)?;
        weighted += eta * seg.length_m;
        length += seg.length_m;
    }
    Ok(weighted / length)
}

/// The aggregated tide of a fixed route, reduced to a short sum of harmonics.
///
/// Every supported model is a constant plus harmonics in time at each point,
/// so the length-weighted route average collapses to one coefficient pair per
/// frequency. Evaluation cost is then independent of the number of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteTide {
    epoch_utc_s: f64,
    constant_m: f64,
    terms: Vec<HarmonicTerm>,
    length_m: f64,
}

impl RouteTide {
    pub fn project(route: &CableRoute, model: &TideModel, policy: LandPolicy) -> Result<Self, TideError> {
        let length_m = route.total_length_m();
        let mut constant_m = 0.0;
        let mut terms: Vec<HarmonicTerm> = Vec::new();
        for seg in route.segments() {
            let w = seg.length_m;
            let (c0, local) = match model.local_terms(&seg.midpoint) {
                Ok(v) => v,
                Err(e @ (TideError::MissingCell { .. } | TideError::OutOfGrid { .. })) => match policy {
                    LandPolicy::ZeroFill => continue,
                    LandPolicy::Error => return Err(e),
                },
                Err(e) => return Err(e),
            };
            constant_m += w * c0;
            if terms.is_empty() {
                terms = local
                    .iter()
                    .map(|h| HarmonicTerm {
                        omega_rad_per_s: h.omega_rad_per_s,
                        cos_m: 0.0,
                        sin_m: 0.0,
                    })
                    .collect();
            }
            for (acc, h) in terms.iter_mut().zip(&local) {
                acc.cos_m += w * h.cos_m;
                acc.sin_m += w * h.sin_m;
            }
        }
        for h in &mut terms {
            h.cos_m /= length_m;
            h.sin_m /= length_m;
        }
        Ok(Self {
            epoch_utc_s: model.epoch_utc_s(),
            constant_m: constant_m / length_m,
            terms,
            length_m,
        })
    }

    pub fn at(&self, t_utc_s: f64) -> f64 {
        let tau = t_utc_s - self.epoch_utc_s;
        self.constant_m + self.terms.iter().map(|h| h.eval(tau)).sum::<f64>()
    }

    /// Time average of AT over `[t0, t1]`, exact for the harmonic form.
    pub fn mean_over(&self, t0_utc_s: f64, t1_utc_s: f64) -> f64 {
        let (a, b) = (t0_utc_s - self.epoch_utc_s, t1_utc_s - self.epoch_utc_s);
        self.constant_m + self.terms.iter().map(|h| h.mean(a, b)).sum::<f64>()
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn constant_m(&self) -> f64 {
        self.constant_m
    }

    /// Upper bound on |AT|.
    pub fn max_abs_m(&self) -> f64 {
        self.constant_m.abs() + self.terms.iter().map(HarmonicTerm::amplitude_m).sum::<f64>()
    }

    pub fn route_length_m(&self) -> f64 {
        self.length_m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::georoute::{sample_route, GeoPoint};

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn uniform_field_is_normalization_identity() {
        let route = sample_route(&[p(10.0, 20.0), p(40.0, -170.0)], 50_000.0, None).unwrap();
        let m = TideModel::Uniform { elevation_m: 0.123 };
        for t in [0.0, 5e8, 1.6e9] {
            let at = aggregated_tide(&route, &m, t).unwrap();
            assert!((at - 0.123).abs() < 1e-15);
        }
        let rt = RouteTide::project(&route, &m, LandPolicy::Error).unwrap();
        assert!((rt.at(7.0) - 0.123).abs() < 1e-14);
    }

    #[test]
    fn projection_matches_direct_sum() {
        let route = sample_route(&[p(34.3, 136.8), p(33.86, -118.4)], 50_000.0, Some(10.4e6)).unwrap();
        let m = TideModel::Equilibrium(EquilibriumParams {
            solar_phase0_rad: 0.4,
            ..Default::default()
        });
        let rt = RouteTide::project(&route, &m, LandPolicy::Error).unwrap();
        let scale = rt.max_abs_m();
        for k in 0..25 {
            let t = DEFAULT_EPOCH_UTC_S + k as f64 * 37_123.0;
            let direct = aggregated_tide(&route, &m, t).unwrap();
            assert!((rt.at(t) - direct).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn mean_over_matches_quadrature() {
        let h = HarmonicTerm {
            omega_rad_per_s: 2.0 * std::f64::consts::PI / 44_714.16,
            cos_m: 0.3,
            sin_m: -0.2,
        };
        let (a, b) = (1234.0, 1834.0);
        let n = 20_000;
        let quad: f64 = (0..n)
            .map(|i| h.eval(a + (i as f64 + 0.5) * (b - a) / n as f64))
            .sum::<f64>()
            / n as f64;
        assert!((h.mean(a, b) - quad).abs() < 1e-10);
        assert_eq!(h.mean(a, a), h.eval(a));
    }

    #[test]
    fn zero_fill_policy() {
        let g = ConstituentGrid::uniform(
            0.0,
            0.0,
            1.0,
            1.0,
            2,
            6,
            0.0,
            &[(TideConstituent::new("M2", M2_SPEED_DEG_PER_HOUR), 1.0, 0.0)],
        )
        .unwrap();
        let m = TideModel::Harmonic(g);
        // Half the route lies east of the grid (lon > 5).
        let route = sample_route(&[p(0.5, 0.0), p(0.5, 10.0)], 10_000.0, None).unwrap();
        assert!(matches!(aggregated_tide(&route, &m, 0.0), Err(TideError::OutOfGrid { .. })));
        assert!(RouteTide::project(&route, &m, LandPolicy::Error).is_err());
        let at = aggregated_tide_with(&route, &m, 0.0, LandPolicy::ZeroFill).unwrap();
        assert!(at > 0.4 && at < 0.6, "{at}");
        let rt = RouteTide::project(&route, &m, LandPolicy::ZeroFill).unwrap();
        assert!((rt.at(0.0) - at).abs() < 1e-12);
    }
}
