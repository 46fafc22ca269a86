use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::analysis::AnalysisOptions;
use crate::elastic::{PressureModel, ProbeSpec, TubeSpec};
use crate::georoute::{japan_us_route_file, CableRoute, RouteFile, DEFAULT_STEP_M};
use crate::instrument::{ArtifactModel, RecordingConfig};
use crate::tide::{load_constituent_grid, EquilibriumParams, LandPolicy, TideModel};

/// Where sea-surface elevation comes from. Exactly one per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TideSource {
    Equilibrium(EquilibriumParams),
    /// Path to a constituent grid JSON file.
    Grid(PathBuf),
    /// Constant elevation in meters.
    UniformM(f64),
}

impl Default for TideSource {
    fn default() -> Self {
        TideSource::Equilibrium(EquilibriumParams::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Material {
    #[default]
    Steel,
    Hdpe,
    Custom(TubeSpec),
}

impl Material {
    pub fn tube(&self) -> TubeSpec {
        match self {
            Material::Steel => TubeSpec::steel(),
            Material::Hdpe => TubeSpec::hdpe(),
            Material::Custom(t) => *t,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Material::Steel => "steel",
            Material::Hdpe => "hdpe",
            Material::Custom(_) => "custom",
        }
    }
}

/// One flat schema shared by every subcommand; echoed into the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Route JSON; the bundled Japan-US route when absent.
    pub route_path: Option<PathBuf>,
    pub route_step_m: f64,
    pub tide: TideSource,
    pub material: Material,
    pub pressure: PressureModel,
    pub probe: ProbeSpec,
    pub recording: RecordingConfig,
    pub artifacts: ArtifactModel,
    pub analysis: AnalysisOptions,
    pub output_dir: PathBuf,
    pub zero_fill_land: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            route_path: None,
            route_step_m: DEFAULT_STEP_M,
            tide: TideSource::default(),
            material: Material::default(),
            pressure: PressureModel::default(),
            probe: ProbeSpec::default(),
            recording: RecordingConfig::default(),
            artifacts: ArtifactModel::default(),
            analysis: AnalysisOptions::default(),
            output_dir: PathBuf::from("out"),
            zero_fill_land: false,
        }
    }
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.route_path.as_mut() {
            rebase(p);
        }
        if let TideSource::Grid(p) = &mut cfg.tide {
            rebase(p);
        }
        rebase(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn land_policy(&self) -> LandPolicy {
        if self.zero_fill_land {
            LandPolicy::ZeroFill
        } else {
            LandPolicy::Error
        }
    }

    pub fn tube(&self) -> TubeSpec {
        self.material.tube()
    }

    /// Checks every parameter block without touching the file system.
    pub fn validate(&self) -> Result<(), CliError> {
        let cfg = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        self.tube().validate().map_err(|e| cfg(&e))?;
        self.pressure.validate().map_err(|e| cfg(&e))?;
        self.probe.validate().map_err(|e| cfg(&e))?;
        self.recording.validate().map_err(|e| cfg(&e))?;
        self.artifacts.validate().map_err(|e| cfg(&e))?;
        if let TideSource::Equilibrium(p) = &self.tide {
            p.validate().map_err(|e| cfg(&e))?;
        }
        if let TideSource::UniformM(h) = self.tide {
            if !h.is_finite() {
                return Err(CliError::Config(format!("uniform elevation must be finite, got {h}")));
            }
        }
        if !(self.analysis.window_s > 0.0) {
            return Err(CliError::Config("analysis window must be positive".into()));
        }
        Ok(())
    }

    pub fn route(&self) -> Result<CableRoute, CliError> {
        let file = match &self.route_path {
            Some(p) => {
                let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
                RouteFile::from_json(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => japan_us_route_file(),
        };
        file.sample(self.route_step_m).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn tide_model(&self) -> Result<TideModel, CliError> {
        Ok(match &self.tide {
            TideSource::Equilibrium(p) => TideModel::Equilibrium(*p),
            TideSource::UniformM(h) => TideModel::Uniform { elevation_m: *h },
            TideSource::Grid(p) => {
                let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
                TideModel::Harmonic(
                    load_constituent_grid(&bytes).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
                )
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn tide_source_forms() {
        let c: RunConfig = serde_json::from_str(r#"{"tide": {"uniform_m": 0.085}, "material": "hdpe"}"#).unwrap();
        assert_eq!(c.tide, TideSource::UniformM(0.085));
        assert_eq!(c.tube(), TubeSpec::hdpe());
        let c: RunConfig = serde_json::from_str(r#"{"tide": {"grid": "g.json"}}"#).unwrap();
        assert_eq!(c.tide, TideSource::Grid("g.json".into()));
        let two = r#"{"tide": {"uniform_m": 0.1, "grid": "g.json"}}"#;
        assert!(serde_json::from_str::<RunConfig>(two).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"tyde": {}}"#).is_err());
    }

    #[test]
    fn custom_material() {
        let c: RunConfig = serde_json::from_str(
            r#"{"material": {"custom": {"young_modulus_pa": 1e11, "poisson_ratio": 0.3,
                "r_outer_m": 0.004, "r_inner_m": 0.0026}}}"#,
        )
        .unwrap();
        assert_eq!(c.tube().young_modulus_pa, 1e11);
        assert_eq!(c.tube().coupling, 1.0);
        c.validate().unwrap();
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.json");
        std::fs::write(&p, r#"{"route_path": "r.json", "output_dir": "o"}"#).unwrap();
        let c = RunConfig::load(&p).unwrap();
        assert_eq!(c.route_path.unwrap(), dir.path().join("r.json"));
        assert_eq!(c.output_dir, dir.path().join("o"));
    }
}
