//! Simulation library for optical nanoscale radar.
//!
//! The crate covers the physics chain from emitter to detector:
//!
//! - [`specfun`]: spherical Bessel/Hankel, Riccati-Bessel and Mie angular functions.
//! - [`mie`]: Lorenz-Mie scattering by a homogeneous sphere, including
//!   dipole-excited partial-wave coefficients.
//! - [`rgd`]: Rayleigh-Gans-Debye scattering with form factors for spheres,
//!   boxes and sampled volumes.
//! - [`antenna`]: radiated power, directivity, gain, LDOS and linear arrays.
//! - [`spp`]: surface plasmon polaritons on a Drude metal/dielectric interface.
//! - [`photodetector`]: transient current of a resonant-cavity-enhanced photodiode.
//! - [`radar`]: scene description, echo patterns, noise and threshold detection.
//!
//! Angles are radians throughout. Fields follow the `exp(-i omega t)` time
//! convention except in [`spp`], which keeps the engineering `exp(j omega t)`
//! form of the TM mode expressions.

pub mod antenna;
pub mod constants;
pub mod medium;
mod error;
pub mod mie;
pub mod pattern;
pub mod photodetector;
pub mod radar;
pub mod rgd;
pub mod specfun;
pub mod spp;
mod sum;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use medium::Medium;
pub use pattern::{Polarization, ScatteringModel, ScatteringPattern};
