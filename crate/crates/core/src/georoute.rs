//! Cable routes on a spherical Earth.
//!
//! A route is an ordered list of waypoints joined by minor great-circle arcs.
//! Each leg is split into equal segments; the segment midpoints and lengths
//! form the quadrature used to integrate sea level along the cable.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius used for all route geometry (m).
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Default segment length when sampling a route (m).
pub const DEFAULT_STEP_M: f64 = 50_000.0;

/// Bounds on `declared / geodesic` length.
pub const MIN_SCALE: f64 = 1.0;
pub const MAX_SCALE: f64 = 1.5;

const ANTIPODAL_EPS_RAD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("latitude {0} outside [-90, 90]")]
    InvalidLatitude(f64),
    #[error("longitude {0} is not finite")]
    InvalidLongitude(f64),
    #[error("points are antipodal; great-circle direction undefined")]
    AntipodalPoints,
    #[error("interpolation fraction {0} outside [0, 1]")]
    InvalidFraction(f64),
    #[error("step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("a route needs at least two waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("declared length {declared_m} m / geodesic {geodesic_m} m is outside [1.0, 1.5]")]
    ScalingOutOfRange { declared_m: f64, geodesic_m: f64 },
    #[error("route has zero geodesic length")]
    DegenerateRoute,
    #[error("route file: {0}")]
    Parse(String),
}

/// Geographic position in degrees. Longitude is kept in `[-180, 180)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeoPoint {
    lat_deg: f64,
    lon_deg: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64) -> Result<Self, GeoError> {
        if !lat_deg.is_finite() || !(-90.0..=90.0).contains(&lat_deg) {
            return Err(GeoError::InvalidLatitude(lat_deg));
        }
        if !lon_deg.is_finite() {
            return Err(GeoError::InvalidLongitude(lon_deg));
        }
        // Longitude is meaningless at the poles.
        let lon_deg = if lat_deg.abs() == 90.0 {
            0.0
        } else {
            normalize_lon(lon_deg)
        };
        Ok(Self { lat_deg, lon_deg })
    }

    pub fn lat_deg(&self) -> f64 {
        self.lat_deg
    }

    pub fn lon_deg(&self) -> f64 {
        self.lon_deg
    }

    /// Unit vector in Earth-centred coordinates.
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let (slat, clat) = self.lat_deg.to_radians().sin_cos();
        let (slon, clon) = self.lon_deg.to_radians().sin_cos();
        [clat * clon, clat * slon, slat]
    }

    fn from_vector(v: [f64; 3]) -> Self {
        let horiz = v[0].hypot(v[1]);
        let lat_deg = v[2].atan2(horiz).to_degrees().clamp(-90.0, 90.0);
        let lon_deg = v[1].atan2(v[0]).to_degrees();
        // Only fails for non-finite input, which a unit-vector combination cannot produce.
        Self::new(lat_deg, lon_deg).expect("finite vector maps to a valid point")
    }
}

impl<'de> Deserialize<'de> for GeoPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lat_deg: f64,
            lon_deg: f64,
        }
        let raw = Raw::deserialize(d)?;
        GeoPoint::new(raw.lat_deg, raw.lon_deg).map_err(serde::de::Error::custom)
    }
}

/// Wraps any finite longitude into `[-180, 180)`.
pub fn normalize_lon(lon_deg: f64) -> f64 {
    let wrapped = (lon_deg + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360.0 for tiny negative inputs.
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Central angle between two points (rad), well conditioned at all separations.
pub fn central_angle(a: &GeoPoint, b: &GeoPoint) -> f64 {
    let (va, vb) = (a.to_unit_vector(), b.to_unit_vector());
    norm(cross(va, vb)).atan2(dot(va, vb))
}

/// Great-circle distance on the sphere of radius [`EARTH_RADIUS_M`].
pub fn great_circle_distance(a: &GeoPoint, b: &GeoPoint) -> f64 {
    EARTH_RADIUS_M * central_angle(a, b)
}

/// Point a fraction `f` of the way along the minor arc from `a` to `b`.
pub fn interpolate_great_circle(a: &GeoPoint, b: &GeoPoint, f: f64) -> Result<GeoPoint, GeoError> {
    if !(0.0..=1.0).contains(&f) {
        return Err(GeoError::InvalidFraction(f));
    }
    let theta = central_angle(a, b);
    if std::f64::consts::PI - theta < ANTIPODAL_EPS_RAD {
        return Err(GeoError::AntipodalPoints);
    }
    if f == 0.0 {
        return Ok(*a);
    }
    if f == 1.0 {
        return Ok(*b);
    }
    if theta == 0.0 {
        return Ok(*a);
    }
    let (va, vb) = (a.to_unit_vector(), b.to_unit_vector());
    let s = theta.sin();
    let wa = ((1.0 - f) * theta).sin() / s;
    let wb = (f * theta).sin() / s;
    Ok(GeoPoint::from_vector([
        wa * va[0] + wb * vb[0],
        wa * va[1] + wb * vb[1],
        wa * va[2] + wb * vb[2],
    ]))
}

/// One quadrature cell of the path integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouteSegment {
    pub midpoint: GeoPoint,
    pub length_m: f64,
    pub cumulative_start_m: f64,
    /// Index of the waypoint leg this segment belongs to.
    pub leg: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CableRoute {
    name: String,
    waypoints: Vec<GeoPoint>,
    segments: Vec<RouteSegment>,
    total_length_m: f64,
    geodesic_length_m: f64,
    declared_length_m: Option<f64>,
}

impl CableRoute {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn waypoints(&self) -> &[GeoPoint] {
        &self.waypoints
    }

    pub fn segments(&self) -> &[RouteSegment] {
        &self.segments
    }

    /// Sum of segment lengths; equals the declared length when one is set.
    pub fn total_length_m(&self) -> f64 {
        self.total_length_m
    }

    /// Unscaled great-circle length along the waypoints.
    pub fn geodesic_length_m(&self) -> f64 {
        self.geodesic_length_m
    }

    pub fn declared_length_m(&self) -> Option<f64> {
        self.declared_length_m
    }

    /// Ratio applied to every geodesic segment length (1.0 without a declared length).
    pub fn scale_factor(&self) -> f64 {
        self.total_length_m / self.geodesic_length_m
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

/// Splits each leg into `ceil(leg / step_m)` equal segments.
pub fn sample_route(
    waypoints: &[GeoPoint],
    step_m: f64,
    declared_length_m: Option<f64>,
) -> Result<CableRoute, GeoError> {
    if waypoints.len() < 2 {
        return Err(GeoError::TooFewWaypoints(waypoints.len()));
    }
    if !(step_m > 0.0) || !step_m.is_finite() {
        return Err(GeoError::InvalidStep(step_m));
    }

    let mut raw: Vec<(GeoPoint, f64, usize)> = Vec::new();
    let mut geodesic_length_m = 0.0;
    for (leg, pair) in waypoints.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let theta = central_angle(a, b);
        if std::f64::consts::PI - theta < ANTIPODAL_EPS_RAD {
            return Err(GeoError::AntipodalPoints);
        }
        let leg_len = EARTH_RADIUS_M * theta;
        geodesic_length_m += leg_len;
        if leg_len == 0.0 {
            continue;
        }
        let n = (leg_len / step_m).ceil().max(1.0) as usize;
        let seg_len = leg_len / n as f64;
        for k in 0..n {
            let f = (k as f64 + 0.5) / n as f64;
            raw.push((interpolate_great_circle(a, b, f)?, seg_len, leg));
        }
    }
    if raw.is_empty() {
        return Err(GeoError::DegenerateRoute);
    }

    let scale = match declared_length_m {
        Some(declared) => {
            let s = declared / geodesic_length_m;
            if !(MIN_SCALE..=MAX_SCALE).contains(&s) {
                return Err(GeoError::ScalingOutOfRange {
                    declared_m: declared,
                    geodesic_m: geodesic_length_m,
                });
            }
            s
        }
        None => 1.0,
    };

    let mut cumulative = 0.0;
    let segments: Vec<RouteSegment> = raw
        .into_iter()
        .map(|(midpoint, len, leg)| {
            let length_m = len * scale;
            let seg = RouteSegment {
                midpoint,
                length_m,
                cumulative_start_m: cumulative,
                leg,
            };
            cumulative += length_m;
            seg
        })
        .collect();
    let total_length_m = segments.iter().map(|s| s.length_m).sum();

    Ok(CableRoute {
        name: String::new(),
        waypoints: waypoints.to_vec(),
        segments,
        total_length_m,
        geodesic_length_m,
        declared_length_m,
    })
}

/// On-disk route description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteFile {
    pub name: String,
    pub waypoints: Vec<GeoPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_length_m: Option<f64>,
}

impl RouteFile {
    pub fn from_json(bytes: &[u8]) -> Result<Self, GeoError> {
        serde_json::from_slice(bytes).map_err(|e| GeoError::Parse(e.to_string()))
    }

    pub fn sample(&self, step_m: f64) -> Result<CableRoute, GeoError> {
        Ok(sample_route(&self.waypoints, step_m, self.declared_length_m)?.with_name(&self.name))
    }
}

/// The bundled illustrative Japan–US route (one great-circle leg, 10.4 Mm deployed).
pub fn japan_us_route_file() -> RouteFile {
    RouteFile::from_json(include_bytes!("../data/routes/japan_us.json"))
        .expect("bundled route parses")
}
