use std::path::PathBuf;

use nanoradar::medium::Medium;
use nanoradar::mie::{DipoleSource, Sphere};
use nanoradar::radar::{Illumination, NoiseModel, RadarScene, Target, Threshold};
use nanoradar::rgd::HomogeneousRegion;
use nanoradar::{constants::SPEED_OF_LIGHT, Complex64, Polarization};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const REQUIRED_KEYS: [&str; 4] = ["scenario", "scene", "grid", "threshold"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: String,
    pub scene: SceneConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub noise: NoiseModel,
    pub threshold: Threshold,
    #[serde(default = "default_look_direction")]
    pub look_direction_deg: f64,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
}

fn default_look_direction() -> f64 {
    180.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub wavelength_nm: f64,
    pub medium: MediumConfig,
    /// Emitter-to-particle distance.
    pub range_m: f64,
    #[serde(default)]
    pub polarization: Polarization,
    #[serde(default)]
    pub source: SourceConfig,
    pub particle: ParticleConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub refractive_index: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_permittivity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    #[default]
    PlaneWave,
    /// Oscillating at the scene wavelength.
    Dipole {
        moment_cm: [f64; 3],
        position_nm: [f64; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParticleConfig {
    Sphere {
        radius_nm: f64,
        rri: f64,
        #[serde(default)]
        rri_imag: f64,
        #[serde(default)]
        center_nm: [f64; 3],
    },
    Box {
        extents_nm: [f64; 3],
        rri: f64,
        #[serde(default)]
        rri_imag: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_deg: f64,
    pub stop_deg: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Structured,
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.count < 2 {
            return Err(CliError::validation(format!("grid.count must be >= 2, got {}", self.count)));
        }
        if !(self.start_deg < self.stop_deg) {
            return Err(CliError::validation(format!(
                "grid.start_deg ({}) must be below grid.stop_deg ({})",
                self.start_deg, self.stop_deg
            )));
        }
        if self.start_deg < 0.0 || self.stop_deg > 180.0 {
            return Err(CliError::validation("grid angles must lie in [0, 180] degrees"));
        }
        Ok(())
    }

    /// Angles in radians; the last node is exactly `stop`.
    pub fn radians(&self) -> Vec<f64> {
        let start = self.start_deg.to_radians();
        let stop = if self.stop_deg == 180.0 {
            std::f64::consts::PI
        } else {
            self.stop_deg.to_radians()
        };
        nanoradar::pattern::linspace(start, stop, self.count)
    }
}

impl std::str::FromStr for GridConfig {
    type Err = String;

    /// `start:stop:count`, angles in degrees.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected start:stop:count, got {s:?}"));
        };
        let grid = GridConfig {
            start_deg: start.trim().parse().map_err(|e| format!("bad start {start:?}: {e}"))?,
            stop_deg: stop.trim().parse().map_err(|e| format!("bad stop {stop:?}: {e}"))?,
            count: count.trim().parse().map_err(|e| format!("bad count {count:?}: {e}"))?,
        };
        grid.validate().map_err(|e| e.to_string())?;
        Ok(grid)
    }
}

impl ParticleConfig {
    pub fn target(&self) -> nanoradar::Result<Target> {
        Ok(match *self {
            ParticleConfig::Sphere {
                radius_nm,
                rri,
                rri_imag,
                center_nm,
            } => Target::Sphere(
                Sphere::new(radius_nm / 1e9, Complex64::new(rri, rri_imag))?
                    .centered_at(center_nm.map(|c| c / 1e9)),
            ),
            ParticleConfig::Box {
                extents_nm,
                rri,
                rri_imag,
            } => Target::Region(HomogeneousRegion::cuboid(
                extents_nm.map(|e| e / 1e9),
                Complex64::new(rri, rri_imag),
            )?),
        })
    }
}

impl SceneConfig {
    pub fn medium(&self) -> nanoradar::Result<Medium> {
        match self.medium.relative_permittivity {
            Some(eps) => Medium::with_permittivity(self.medium.refractive_index, eps),
            None => Medium::new(self.medium.refractive_index),
        }
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength_nm / 1e9
    }

    pub fn build(&self) -> nanoradar::Result<RadarScene> {
        let illumination = match self.source {
            SourceConfig::PlaneWave => Illumination::PlaneWave {
                wavelength_vacuum: self.wavelength(),
                polarization: self.polarization,
            },
            SourceConfig::Dipole {
                moment_cm,
                position_nm,
            } => {
                let omega = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.wavelength();
                Illumination::Dipole(DipoleSource::new(
                    moment_cm.map(|p| Complex64::new(p, 0.0)),
                    position_nm.map(|x| x / 1e9),
                    omega,
                )?)
            }
        };
        RadarScene::new(illumination, self.particle.target()?, self.medium()?, self.range_m)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.validate()?;
        self.threshold.validate().map_err(CliError::from)?;
        if !(0.0..=180.0).contains(&self.look_direction_deg) {
            return Err(CliError::validation("look_direction_deg must lie in [0, 180]"));
        }
        self.scene.build().map_err(CliError::from)?;
        Ok(())
    }

    pub fn look_direction(&self) -> f64 {
        if self.look_direction_deg == 180.0 {
            std::f64::consts::PI
        } else {
            self.look_direction_deg.to_radians()
        }
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| CliError::validation(format!("config syntax: {e}")))?;
    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .copied()
        .filter(|k| !table.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::validation(format!(
            "config is missing required keys: {}",
            missing.join(", ")
        )));
    }
    let config: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table))
        .map_err(|e| CliError::validation(format!("config at `{}`: {}", e.path(), e.inner())))?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
pub fn to_toml(config: &RunConfig) -> String {
    toml::to_string(config).expect("run configuration always serializes")
}
