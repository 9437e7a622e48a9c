use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Background medium in which waves propagate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    refractive_index: f64,
    relative_permittivity: f64,
}

impl Medium {
    pub const AIR: Medium = Medium {
        refractive_index: 1.0,
        relative_permittivity: 1.0,
    };

    pub fn new(refractive_index: f64) -> Result<Self> {
        if !(refractive_index >= 1.0) || !refractive_index.is_finite() {
            return Err(Error::domain(format!(
                "medium refractive index must be finite and >= 1, got {refractive_index}"
            )));
        }
        Ok(Medium {
            refractive_index,
            relative_permittivity: refractive_index * refractive_index,
        })
    }

    /// Builds a medium from both index and permittivity, rejecting `eps != n^2`.
    pub fn with_permittivity(refractive_index: f64, relative_permittivity: f64) -> Result<Self> {
        let medium = Medium::new(refractive_index)?;
        let expected = medium.relative_permittivity;
        if (relative_permittivity - expected).abs() > 1e-12 * expected {
            return Err(Error::domain(format!(
                "relative permittivity {relative_permittivity} inconsistent with n^2 = {expected}"
            )));
        }
        Ok(medium)
    }

    pub fn refractive_index(&self) -> f64 {
        self.refractive_index
    }

    pub fn relative_permittivity(&self) -> f64 {
        self.relative_permittivity
    }

    /// Wavenumber in the medium, `2 pi n / lambda0`.
    pub fn wavenumber(&self, wavelength_vacuum: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.refractive_index / wavelength_vacuum
    }
}
