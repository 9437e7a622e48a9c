use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Polarization state of the incident field relative to the scattering plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Polarization {
    #[default]
    Unpolarized,
    /// Electric field in the scattering plane, intensity `|S2|^2`.
    Parallel,
    /// Electric field normal to the scattering plane, intensity `|S1|^2`.
    Perpendicular,
}

impl Polarization {
    pub fn intensity(self, s1_sq: f64, s2_sq: f64) -> f64 {
        match self {
            Polarization::Unpolarized => 0.5 * (s1_sq + s2_sq),
            Polarization::Parallel => s2_sq,
            Polarization::Perpendicular => s1_sq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScatteringModel {
    Mie,
    #[serde(rename = "RGD")]
    Rgd,
}

impl std::fmt::Display for ScatteringModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScatteringModel::Mie => f.write_str("Mie"),
            ScatteringModel::Rgd => f.write_str("RGD"),
        }
    }
}

/// Sampled differential scattered intensity versus scattering angle.
///
/// `theta = 0` is the forward direction, `theta = pi` is backscatter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPattern {
    pub thetas: Vec<f64>,
    pub intensities: Vec<f64>,
    pub model: ScatteringModel,
    pub wavelength_vacuum: f64,
    pub medium_index: f64,
    pub polarization: Polarization,
    /// Non-fatal diagnostics, e.g. an RGD pattern evaluated outside its validity regime.
    pub warnings: Vec<String>,
}

impl ScatteringPattern {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensities.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation of the intensity at `theta`; `None` outside the grid.
    pub fn interpolate(&self, theta: f64) -> Option<f64> {
        let (first, last) = (*self.thetas.first()?, *self.thetas.last()?);
        if theta < first || theta > last {
            return None;
        }
        let idx = self.thetas.partition_point(|&t| t <= theta);
        if idx == 0 {
            return Some(self.intensities[0]);
        }
        if idx >= self.thetas.len() {
            return self.intensities.last().copied();
        }
        let (t0, t1) = (self.thetas[idx - 1], self.thetas[idx]);
        let (y0, y1) = (self.intensities[idx - 1], self.intensities[idx]);
        if t0 == theta {
            return Some(y0);
        }
        Some(y0 + (y1 - y0) * (theta - t0) / (t1 - t0))
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        for v in &mut self.intensities {
            *v *= factor;
        }
        self
    }
}

/// Checks that an angle grid is nonempty, inside `[0, pi]` and nondecreasing.
pub(crate) fn validate_angle_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("angle grid is empty"));
    }
    for (i, &t) in grid.iter().enumerate() {
        if !(0.0..=std::f64::consts::PI).contains(&t) {
            return Err(Error::domain(format!(
                "angle grid value {t} at index {i} is outside [0, pi]"
            )));
        }
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("angle grid is not sorted"));
    }
    Ok(())
}

/// `count` evenly spaced angles from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        stop
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(thetas: Vec<f64>, intensities: Vec<f64>) -> ScatteringPattern {
        ScatteringPattern {
            thetas,
            intensities,
            model: ScatteringModel::Mie,
            wavelength_vacuum: 1.0,
            medium_index: 1.0,
            polarization: Polarization::Unpolarized,
            warnings: vec![],
        }
    }

    #[test]
    fn interpolation_hits_nodes_and_midpoints() {
        let p = pattern(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 4.0]);
        assert_eq!(p.interpolate(1.0), Some(2.0));
        assert_eq!(p.interpolate(1.5), Some(3.0));
        assert_eq!(p.interpolate(2.0), Some(4.0));
        assert_eq!(p.interpolate(2.5), None);
    }

    #[test]
    fn linspace_endpoints_are_exact() {
        let g = linspace(0.0, std::f64::consts::PI, 7);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[6], std::f64::consts::PI);
    }

    #[test]
    fn grid_validation() {
        assert!(validate_angle_grid(&[]).is_err());
        assert!(validate_angle_grid(&[0.0, 4.0]).is_err());
        assert!(validate_angle_grid(&[1.0, 0.5]).is_err());
        assert!(validate_angle_grid(&[0.0, std::f64::consts::PI]).is_ok());
    }
}
