//! Gridded harmonic constituents and their JSON file format.
//!
//! Amplitude and Greenwich phase are stored per node. Interpolation works on
//! the in-phase/quadrature pair `(A cos g, A sin g)` so phases near the
//! 0/360 degree seam blend correctly.

use std::collections::HashSet;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{HarmonicTerm, TideError};
use crate::georoute::GeoPoint;

/// Standard angular speeds (deg/h) of the four principal constituents.
pub const M2_SPEED_DEG_PER_HOUR: f64 = 28.984_104_2;
pub const S2_SPEED_DEG_PER_HOUR: f64 = 30.0;
pub const K1_SPEED_DEG_PER_HOUR: f64 = 15.041_068_6;
pub const O1_SPEED_DEG_PER_HOUR: f64 = 13.943_035_6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TideConstituent {
    pub name: String,
    pub speed_deg_per_hour: f64,
}

impl TideConstituent {
    pub fn new(name: impl Into<String>, speed_deg_per_hour: f64) -> Self {
        Self {
            name: name.into(),
            speed_deg_per_hour,
        }
    }

    pub fn omega_rad_per_s(&self) -> f64 {
        self.speed_deg_per_hour.to_radians() / 3600.0
    }

    pub fn period_s(&self) -> f64 {
        360.0 / self.speed_deg_per_hour * 3600.0
    }
}

/// Node value: amplitude (m) and phase (deg, `[0, 360)`), `None` on land.
pub type NodeValue = Option<(f64, f64)>;

#[derive(Debug, Clone, PartialEq)]
struct ConstituentField {
    constituent: TideConstituent,
    nodes: Vec<NodeValue>,
    components: Vec<Option<[f64; 2]>>,
}

impl ConstituentField {
    fn new(constituent: TideConstituent, nodes: Vec<NodeValue>) -> Self {
        let components = nodes
            .iter()
            .map(|n| {
                n.map(|(a, g)| {
                    let (s, c) = g.to_radians().sin_cos();
                    [a * c, a * s]
                })
            })
            .collect();
        Self {
            constituent,
            nodes,
            components,
        }
    }
}

/// Bilinear stencil: four corner indices with their weights.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    idx: [usize; 4],
    w: [f64; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstituentGrid {
    lat0_deg: f64,
    lon0_deg: f64,
    dlat_deg: f64,
    dlon_deg: f64,
    nlat: usize,
    nlon: usize,
    epoch_utc_s: f64,
    fields: Vec<ConstituentField>,
}

const EDGE_EPS: f64 = 1e-9;

impl ConstituentGrid {
    /// Builds a validated grid. `nodes[c]` is row-major `nlat x nlon` for constituent `c`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lat0_deg: f64,
        lon0_deg: f64,
        dlat_deg: f64,
        dlon_deg: f64,
        nlat: usize,
        nlon: usize,
        epoch_utc_s: f64,
        constituents: Vec<(TideConstituent, Vec<NodeValue>)>,
    ) -> Result<Self, TideError> {
        if !(dlat_deg > 0.0) || !(dlon_deg > 0.0) {
            return Err(TideError::InvalidGrid("cell size must be positive".into()));
        }
        if nlat < 2 || nlon < 2 {
            return Err(TideError::InvalidGrid("grid needs at least 2x2 nodes".into()));
        }
        if !lat0_deg.is_finite() || !lon0_deg.is_finite() || !epoch_utc_s.is_finite() {
            return Err(TideError::InvalidGrid("non-finite origin or epoch".into()));
        }
        if lat0_deg < -90.0 || lat0_deg + dlat_deg * (nlat - 1) as f64 > 90.0 + EDGE_EPS {
            return Err(TideError::InvalidGrid("latitude span leaves [-90, 90]".into()));
        }
        if constituents.is_empty() {
            return Err(TideError::InvalidGrid("no constituents".into()));
        }
        let mut names = HashSet::new();
        let mut fields = Vec::with_capacity(constituents.len());
        for (c, nodes) in constituents {
            if !(c.speed_deg_per_hour > 0.0) || !c.speed_deg_per_hour.is_finite() {
                return Err(TideError::InvalidGrid(format!(
                    "constituent {} has non-positive speed",
                    c.name
                )));
            }
            if !names.insert(c.name.clone()) {
                return Err(TideError::InvalidGrid(format!("duplicate constituent {}", c.name)));
            }
            if nodes.len() != nlat * nlon {
                return Err(TideError::DimensionMismatch(format!(
                    "{}: {} nodes for a {nlat}x{nlon} grid",
                    c.name,
                    nodes.len()
                )));
            }
            let mut normalized = Vec::with_capacity(nodes.len());
            for node in nodes {
                normalized.push(match node {
                    Some((a, g)) => {
                        if !a.is_finite() || !g.is_finite() {
                            return Err(TideError::InvalidGrid(format!(
                                "{}: non-finite node value",
                                c.name
                            )));
                        }
                        if a < 0.0 {
                            return Err(TideError::NegativeAmplitude {
                                constituent: c.name.clone(),
                                value: a,
                            });
                        }
                        Some((a, normalize_phase_deg(g)))
                    }
                    None => None,
                });
            }
            fields.push(ConstituentField::new(c, normalized));
        }
        Ok(Self {
            lat0_deg,
            lon0_deg,
            dlat_deg,
            dlon_deg,
            nlat,
            nlon,
            epoch_utc_s,
            fields,
        })
    }

    /// Grid with the same amplitude and phase at every node, for every constituent given.
    pub fn uniform(
        lat0_deg: f64,
        lon0_deg: f64,
        dlat_deg: f64,
        dlon_deg: f64,
        nlat: usize,
        nlon: usize,
        epoch_utc_s: f64,
        constituents: &[(TideConstituent, f64, f64)],
    ) -> Result<Self, TideError> {
        let n = nlat * nlon;
        Self::new(
            lat0_deg,
            lon0_deg,
            dlat_deg,
            dlon_deg,
            nlat,
            nlon,
            epoch_utc_s,
            constituents
                .iter()
                .map(|(c, a, g)| (c.clone(), vec![Some((*a, *g)); n]))
                .collect(),
        )
    }

    pub fn nlat(&self) -> usize {
        self.nlat
    }

    pub fn nlon(&self) -> usize {
        self.nlon
    }

    pub fn epoch_utc_s(&self) -> f64 {
        self.epoch_utc_s
    }

    pub fn constituents(&self) -> impl Iterator<Item = &TideConstituent> {
        self.fields.iter().map(|f| &f.constituent)
    }

    /// Node value of constituent `c` at row `i`, column `j`.
    pub fn node(&self, c: usize, i: usize, j: usize) -> NodeValue {
        self.fields[c].nodes[i * self.nlon + j]
    }

    fn wraps_globally(&self) -> bool {
        (self.nlon as f64 * self.dlon_deg - 360.0).abs() < 1e-9
    }

    fn stencil(&self, at: &GeoPoint) -> Result<Stencil, TideError> {
        let out = || TideError::OutOfGrid {
            lat_deg: at.lat_deg(),
            lon_deg: at.lon_deg(),
        };
        let y = (at.lat_deg() - self.lat0_deg) / self.dlat_deg;
        let ymax = (self.nlat - 1) as f64;
        if y < -EDGE_EPS || y > ymax + EDGE_EPS {
            return Err(out());
        }
        let y = y.clamp(0.0, ymax);
        let i0 = (y.floor() as usize).min(self.nlat - 2);
        let fy = y - i0 as f64;

        let mut x = (at.lon_deg() - self.lon0_deg).rem_euclid(360.0) / self.dlon_deg;
        let (j0, j1, fx) = if self.wraps_globally() {
            let j0 = (x.floor() as usize) % self.nlon;
            (j0, (j0 + 1) % self.nlon, x - x.floor())
        } else {
            let xmax = (self.nlon - 1) as f64;
            // A point just west of the origin wraps to ~360/dlon.
            if x > 360.0 / self.dlon_deg - EDGE_EPS {
                x -= 360.0 / self.dlon_deg;
            }
            if x < -EDGE_EPS || x > xmax + EDGE_EPS {
                return Err(out());
            }
            let x = x.clamp(0.0, xmax);
            let j0 = (x.floor() as usize).min(self.nlon - 2);
            (j0, j0 + 1, x - j0 as f64)
        };
        let row0 = i0 * self.nlon;
        let row1 = (i0 + 1) * self.nlon;
        Ok(Stencil {
            idx: [row0 + j0, row0 + j1, row1 + j0, row1 + j1],
            w: [
                (1.0 - fy) * (1.0 - fx),
                (1.0 - fy) * fx,
                fy * (1.0 - fx),
                fy * fx,
            ],
        })
    }

    fn interpolate_components(
        &self,
        field: &ConstituentField,
        st: &Stencil,
        at: &GeoPoint,
    ) -> Result<[f64; 2], TideError> {
        let mut acc = [0.0; 2];
        for (&k, &w) in st.idx.iter().zip(&st.w) {
            if w == 0.0 {
                continue;
            }
            match field.components[k] {
                Some([c, s]) => {
                    acc[0] += w * c;
                    acc[1] += w * s;
                }
                None => {
                    return Err(TideError::MissingCell {
                        lat_deg: at.lat_deg(),
                        lon_deg: at.lon_deg(),
                    })
                }
            }
        }
        Ok(acc)
    }

    /// Interpolated `(amplitude_m, phase_deg)` for each constituent at `at`.
    pub fn constants_at(&self, at: &GeoPoint) -> Result<Vec<(f64, f64)>, TideError> {
        let st = self.stencil(at)?;
        self.fields
            .iter()
            .map(|f| {
                let [c, s] = self.interpolate_components(f, &st, at)?;
                Ok((c.hypot(s), normalize_phase_deg(s.atan2(c).to_degrees())))
            })
            .collect()
    }

    pub(crate) fn local_terms(&self, at: &GeoPoint) -> Result<Vec<HarmonicTerm>, TideError> {
        let st = self.stencil(at)?;
        self.fields
            .iter()
            .map(|f| {
                let [c, s] = self.interpolate_components(f, &st, at)?;
                Ok(HarmonicTerm {
                    omega_rad_per_s: f.constituent.omega_rad_per_s(),
                    cos_m: c,
                    sin_m: s,
                })
            })
            .collect()
    }

    /// Harmonic synthesis `sum_i A_i cos(w_i (t - epoch) - g_i)`.
    pub fn elevation(&self, at: &GeoPoint, t_utc_s: f64) -> Result<f64, TideError> {
        let tau = t_utc_s - self.epoch_utc_s;
        let st = self.stencil(at)?;
        let mut eta = 0.0;
        for f in &self.fields {
            let [c, s] = self.interpolate_components(f, &st, at)?;
            let amp = c.hypot(s);
            let g = s.atan2(c);
            eta += amp * (f.constituent.omega_rad_per_s() * tau - g).cos();
        }
        Ok(eta)
    }

    /// Union of the constituents of two grids with identical geometry and epoch.
    pub fn merge(&self, other: &ConstituentGrid) -> Result<ConstituentGrid, TideError> {
        let same = self.lat0_deg == other.lat0_deg
            && self.lon0_deg == other.lon0_deg
            && self.dlat_deg == other.dlat_deg
            && self.dlon_deg == other.dlon_deg
            && self.nlat == other.nlat
            && self.nlon == other.nlon
            && self.epoch_utc_s == other.epoch_utc_s;
        if !same {
            return Err(TideError::DimensionMismatch("grids differ in geometry or epoch".into()));
        }
        Self::new(
            self.lat0_deg,
            self.lon0_deg,
            self.dlat_deg,
            self.dlon_deg,
            self.nlat,
            self.nlon,
            self.epoch_utc_s,
            self.fields
                .iter()
                .chain(&other.fields)
                .map(|f| (f.constituent.clone(), f.nodes.clone()))
                .collect(),
        )
    }

    pub fn to_file(&self) -> GridFile {
        let epoch = DateTime::<Utc>::from_timestamp(
            self.epoch_utc_s.floor() as i64,
            ((self.epoch_utc_s - self.epoch_utc_s.floor()) * 1e9).round() as u32,
        )
        .expect("epoch within chrono range");
        let rows = |f: &ConstituentField, pick: fn((f64, f64)) -> f64| -> Vec<Vec<Option<f64>>> {
            f.nodes
                .chunks(self.nlon)
                .map(|row| row.iter().map(|n| n.map(pick)).collect())
                .collect()
        };
        GridFile {
            lat0_deg: self.lat0_deg,
            lon0_deg: self.lon0_deg,
            dlat_deg: self.dlat_deg,
            dlon_deg: self.dlon_deg,
            nlat: self.nlat,
            nlon: self.nlon,
            epoch_utc: epoch.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            constituents: self
                .fields
                .iter()
                .map(|f| GridFileConstituent {
                    name: f.constituent.name.clone(),
                    speed_deg_per_hour: f.constituent.speed_deg_per_hour,
                    amplitude_m: rows(f, |n| n.0),
                    phase_deg: rows(f, |n| n.1),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("grid serializes")
    }
}

pub fn normalize_phase_deg(g: f64) -> f64 {
    let r = g.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Parses an ISO-8601 / RFC 3339 UTC timestamp into seconds since the Unix epoch.
pub fn parse_utc(s: &str) -> Result<f64, String> {
    let dt = DateTime::parse_from_rfc3339(s.trim()).map_err(|e| format!("bad timestamp {s:?}: {e}"))?;
    Ok(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9)
}

/// Formats Unix seconds as RFC 3339 UTC (`...Z`).
pub fn format_utc(t_utc_s: f64) -> String {
    let secs = t_utc_s.floor();
    let nanos = ((t_utc_s - secs) * 1e9).round().min(999_999_999.0) as u32;
    DateTime::<Utc>::from_timestamp(secs as i64, nanos)
        .map(|d| d.to_rfc3339_opts(SecondsFormat::AutoSi, true))
        .unwrap_or_else(|| format!("{t_utc_s}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFileConstituent {
    pub name: String,
    pub speed_deg_per_hour: f64,
    pub amplitude_m: Vec<Vec<Option<f64>>>,
    pub phase_deg: Vec<Vec<Option<f64>>>,
}

/// Serialized form of [`ConstituentGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub lat0_deg: f64,
    pub lon0_deg: f64,
    pub dlat_deg: f64,
    pub dlon_deg: f64,
    pub nlat: usize,
    pub nlon: usize,
    pub epoch_utc: String,
    pub constituents: Vec<GridFileConstituent>,
}

impl GridFile {
    pub fn into_grid(self) -> Result<ConstituentGrid, TideError> {
        let epoch = parse_utc(&self.epoch_utc).map_err(TideError::Parse)?;
        let (nlat, nlon) = (self.nlat, self.nlon);
        let check_shape = |name: &str, what: &str, rows: &[Vec<Option<f64>>]| {
            if rows.len() != nlat || rows.iter().any(|r| r.len() != nlon) {
                let cols: Vec<usize> = rows.iter().map(Vec::len).collect();
                return Err(TideError::DimensionMismatch(format!(
                    "{name}: {what} has {} rows with lengths {cols:?}, expected {nlat}x{nlon}",
                    rows.len()
                )));
            }
            Ok(())
        };
        let mut constituents = Vec::with_capacity(self.constituents.len());
        for c in self.constituents {
            check_shape(&c.name, "amplitude_m", &c.amplitude_m)?;
            check_shape(&c.name, "phase_deg", &c.phase_deg)?;
            let mut nodes = Vec::with_capacity(nlat * nlon);
            for (i, (ar, pr)) in c.amplitude_m.iter().zip(&c.phase_deg).enumerate() {
                for (j, (a, g)) in ar.iter().zip(pr).enumerate() {
                    nodes.push(match (a, g) {
                        (Some(a), Some(g)) => Some((*a, *g)),
                        (None, None) => None,
                        _ => return Err(TideError::LandMaskMismatch { constituent: c.name.clone(), row: i, col: j }),
                    });
                }
            }
            constituents.push((TideConstituent::new(c.name, c.speed_deg_per_hour), nodes));
        }
        ConstituentGrid::new(
            self.lat0_deg,
            self.lon0_deg,
            self.dlat_deg,
            self.dlon_deg,
            nlat,
            nlon,
            epoch,
            constituents,
        )
    }
}

/// Parses and validates a grid file.
pub fn load_constituent_grid(bytes: &[u8]) -> Result<ConstituentGrid, TideError> {
    let file: GridFile = serde_json::from_slice(bytes).map_err(|e| TideError::Parse(e.to_string()))?;
    file.into_grid()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    fn m2() -> TideConstituent {
        TideConstituent::new("M2", M2_SPEED_DEG_PER_HOUR)
    }

    fn unit_m2_block() -> ConstituentGrid {
        ConstituentGrid::uniform(-1.0, -1.0, 1.0, 1.0, 3, 3, 0.0, &[(m2(), 1.0, 0.0)]).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        let g = unit_m2_block();
        let at = p(0.0, 0.0);
        assert!((g.elevation(&at, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // quarter of an M2 cycle: 90 deg / 28.9841042 deg/h
        let quarter_s = 90.0 / M2_SPEED_DEG_PER_HOUR * 3600.0;
        assert!((quarter_s / 3600.0 - 3.1052).abs() < 1e-4);
        assert!(g.elevation(&at, quarter_s).unwrap().abs() < 1e-9);
    }

    #[test]
    fn bilinear_midpoint() {
        let nodes = vec![Some((0.0, 0.0)), Some((2.0, 0.0)), Some((0.0, 0.0)), Some((2.0, 0.0))];
        let g = ConstituentGrid::new(0.0, 0.0, 1.0, 1.0, 2, 2, 0.0, vec![(m2(), nodes)]).unwrap();
        assert!((g.elevation(&p(0.5, 0.5), 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_interpolation_across_seam() {
        // 359 and 1 degrees must blend to ~0, not 180.
        let nodes = vec![Some((1.0, 359.0)), Some((1.0, 1.0)), Some((1.0, 359.0)), Some((1.0, 1.0))];
        let g = ConstituentGrid::new(0.0, 0.0, 1.0, 1.0, 2, 2, 0.0, vec![(m2(), nodes)]).unwrap();
        let (a, ph) = g.constants_at(&p(0.5, 0.5)).unwrap()[0];
        assert!(ph < 1e-9 || ph > 360.0 - 1e-9, "{ph}");
        assert!((a - 1f64.to_radians().cos()).abs() < 1e-12);
    }

    #[test]
    fn out_of_grid_and_missing() {
        let mut nodes = vec![Some((1.0, 0.0)); 9];
        nodes[4] = None;
        let g = ConstituentGrid::new(0.0, 0.0, 1.0, 1.0, 3, 3, 0.0, vec![(m2(), nodes)]).unwrap();
        assert!(matches!(g.elevation(&p(5.0, 0.5), 0.0), Err(TideError::OutOfGrid { .. })));
        assert!(matches!(g.elevation(&p(0.5, 3.0), 0.0), Err(TideError::OutOfGrid { .. })));
        assert!(matches!(g.elevation(&p(0.5, 0.5), 0.0), Err(TideError::MissingCell { .. })));
        // On the node row 0 the missing centre node carries zero weight.
        assert!(g.elevation(&p(0.0, 0.5), 0.0).is_ok());
    }

    #[test]
    fn grid_across_antimeridian() {
        let g = ConstituentGrid::uniform(30.0, 170.0, 5.0, 5.0, 3, 5, 0.0, &[(m2(), 0.5, 0.0)]).unwrap();
        assert!((g.elevation(&p(35.0, -175.0), 0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(g.elevation(&p(35.0, 165.0), 0.0).is_err());
        assert!(g.elevation(&p(35.0, -169.0), 0.0).is_err());
    }

    #[test]
    fn global_grid_wraps() {
        let mut nodes = Vec::new();
        for _ in 0..3 {
            for j in 0..4 {
                nodes.push(Some((j as f64, 0.0)));
            }
        }
        let g = ConstituentGrid::new(-10.0, 0.0, 10.0, 90.0, 3, 4, 0.0, vec![(m2(), nodes)]).unwrap();
        // Between column 3 (270 deg, A=3) and column 0 (360 deg, A=0).
        assert!((g.elevation(&p(0.0, -45.0), 0.0).unwrap() - 1.5).abs() < 1e-12);
    }

    const GOOD: &str = r#"{
        "lat0_deg": 0, "lon0_deg": 0, "dlat_deg": 1, "dlon_deg": 1, "nlat": 2, "nlon": 2,
        "epoch_utc": "2020-02-28T06:06:29Z",
        "constituents": [ { "name": "M2", "speed_deg_per_hour": 28.9841042,
            "amplitude_m": [[0.1, 0.2], [null, 0.4]],
            "phase_deg": [[10, -20], [null, 400]] } ] }"#;

    #[test]
    fn load_well_formed() {
        let g = load_constituent_grid(GOOD.as_bytes()).unwrap();
        assert_eq!((g.nlat(), g.nlon()), (2, 2));
        assert_eq!(g.epoch_utc_s(), 1_582_869_989.0);
        assert_eq!(g.node(0, 0, 1), Some((0.2, 340.0)));
        assert_eq!(g.node(0, 1, 1), Some((0.4, 40.0)));
        assert_eq!(g.node(0, 1, 0), None);
        let back = load_constituent_grid(g.to_json().as_bytes()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn load_errors() {
        let dims = GOOD.replace("[[10, -20], [null, 400]]", "[[10, -20, 0], [null, 400, 0]]");
        assert!(matches!(load_constituent_grid(dims.as_bytes()), Err(TideError::DimensionMismatch(_))));
        let neg = GOOD.replace("[[0.1, 0.2]", "[[-0.1, 0.2]");
        assert!(matches!(load_constituent_grid(neg.as_bytes()), Err(TideError::NegativeAmplitude { .. })));
        let mask = GOOD.replace("[null, 400]", "[5, 400]");
        assert!(matches!(load_constituent_grid(mask.as_bytes()), Err(TideError::LandMaskMismatch { .. })));
        assert!(matches!(load_constituent_grid(b"{ nope"), Err(TideError::Parse(_))));
        let when = GOOD.replace("2020-02-28T06:06:29Z", "yesterday");
        assert!(matches!(load_constituent_grid(when.as_bytes()), Err(TideError::Parse(_))));
    }

    #[test]
    fn duplicate_names_rejected() {
        let n = vec![Some((1.0, 0.0)); 4];
        let r = ConstituentGrid::new(0.0, 0.0, 1.0, 1.0, 2, 2, 0.0, vec![(m2(), n.clone()), (m2(), n)]);
        assert!(matches!(r, Err(TideError::InvalidGrid(_))));
    }

    #[test]
    fn utc_round_trip() {
        assert_eq!(format_utc(1_582_869_989.0), "2020-02-28T06:06:29Z");
        assert_eq!(parse_utc("2020-02-28T06:06:29Z").unwrap(), 1_582_869_989.0);
        assert_eq!(parse_utc(&format_utc(1_582_869_989.25)).unwrap(), 1_582_869_989.25);
    }
}
