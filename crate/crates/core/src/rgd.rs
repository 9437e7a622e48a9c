//! Rayleigh-Gans-Debye scattering.
//!
//! Incidence is along `+z` and the scattering plane is `xz`, so the
//! scattered direction at angle `theta` is `(sin theta, 0, cos theta)`. The
//! phase of a volume element at `r` is `delta = q . r` with
//! `q = k (z_hat - s_hat)`, `|q| = 2 k sin(theta/2)`. For the supported
//! shapes and this incidence axis the form factor does not depend on the
//! azimuth, so only `theta` is taken.
//!
//! Amplitudes are far-field normalized: the `exp(ik(r - z))/(-ikr)`
//! propagator is not included.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::pattern::{validate_angle_grid, Polarization, ScatteringModel, ScatteringPattern};
use crate::sum::ComplexSum;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default numeric bound standing in for "much less than one" in both conditions.
pub const DEFAULT_VALIDITY_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgdValidity {
    /// `|m - 1|`
    pub contrast: f64,
    /// `k d |m - 1|`
    pub phase_shift: f64,
    pub valid: bool,
    /// `min(1 - contrast/limit, 1 - phase_shift/limit)`; negative when invalid.
    pub margin: f64,
    pub contrast_limit: f64,
    pub phase_limit: f64,
}

/// Evaluates `|m - 1| < contrast_limit` and `k d |m - 1| < phase_limit`.
pub fn validity_check(
    m: Complex64,
    k: f64,
    d: f64,
    contrast_limit: f64,
    phase_limit: f64,
) -> RgdValidity {
    let contrast = (m - 1.0).norm();
    let phase_shift = k * d * contrast;
    RgdValidity {
        contrast,
        phase_shift,
        valid: contrast < contrast_limit && phase_shift < phase_limit,
        margin: (1.0 - contrast / contrast_limit).min(1.0 - phase_shift / phase_limit),
        contrast_limit,
        phase_limit,
    }
}

/// [`validity_check`] with both limits at [`DEFAULT_VALIDITY_LIMIT`].
pub fn validity_check_default(m: Complex64, k: f64, d: f64) -> RgdValidity {
    validity_check(m, k, d, DEFAULT_VALIDITY_LIMIT, DEFAULT_VALIDITY_LIMIT)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Sphere { radius: f64 },
    /// Axis-aligned box centered on the region offset.
    Box { extents: [f64; 3] },
    /// Sampled volume: element centers (relative to the region offset) and
    /// the volume carried by each element.
    PointCloud {
        points: Vec<[f64; 3]>,
        volumes: Vec<f64>,
    },
}

impl Shape {
    fn volume(&self) -> f64 {
        match self {
            Shape::Sphere { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            Shape::Box { extents } => extents.iter().product(),
            Shape::PointCloud { volumes, .. } => volumes.iter().sum(),
        }
    }

    /// Largest linear dimension: diameter, box diagonal, or bounding-box
    /// diagonal of a point cloud.
    pub fn linear_dimension(&self) -> f64 {
        match self {
            Shape::Sphere { radius } => 2.0 * radius,
            Shape::Box { extents } => extents.iter().map(|e| e * e).sum::<f64>().sqrt(),
            Shape::PointCloud { points, .. } => {
                let mut lo = [f64::INFINITY; 3];
                let mut hi = [f64::NEG_INFINITY; 3];
                for p in points {
                    for a in 0..3 {
                        lo[a] = lo[a].min(p[a]);
                        hi[a] = hi[a].max(p[a]);
                    }
                }
                (0..3).map(|a| (hi[a] - lo[a]).powi(2)).sum::<f64>().sqrt()
            }
        }
    }
}

/// A homogeneous scatterer: shape, relative refractive index and offset of
/// its local origin from the particle origin.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousRegion {
    shape: Shape,
    rri: Complex64,
    offset: [f64; 3],
    volume: f64,
}

impl HomogeneousRegion {
    pub fn new(shape: Shape, rri: Complex64) -> Result<Self> {
        match &shape {
            Shape::Sphere { radius } if !(*radius > 0.0 && radius.is_finite()) => {
                return Err(Error::domain(format!("sphere radius must be > 0, got {radius}")));
            }
            Shape::Box { extents } if !extents.iter().all(|e| *e > 0.0 && e.is_finite()) => {
                return Err(Error::domain(format!("box extents must be > 0, got {extents:?}")));
            }
            Shape::PointCloud { points, volumes } => {
                if points.is_empty() || points.len() != volumes.len() {
                    return Err(Error::domain(
                        "point cloud needs one positive volume per point and at least one point",
                    ));
                }
                if !volumes.iter().all(|v| *v > 0.0 && v.is_finite()) {
                    return Err(Error::domain("point-cloud element volumes must be > 0"));
                }
            }
            _ => {}
        }
        if !rri.re.is_finite() || !rri.im.is_finite() {
            return Err(Error::domain(format!("non-finite refractive index {rri}")));
        }
        let volume = shape.volume();
        Ok(HomogeneousRegion {
            shape,
            rri,
            offset: [0.0; 3],
            volume,
        })
    }

    pub fn sphere(radius: f64, rri: Complex64) -> Result<Self> {
        Self::new(Shape::Sphere { radius }, rri)
    }

    pub fn cuboid(extents: [f64; 3], rri: Complex64) -> Result<Self> {
        Self::new(Shape::Box { extents }, rri)
    }

    pub fn with_offset(mut self, offset: [f64; 3]) -> Self {
        self.offset = offset;
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rri(&self) -> Complex64 {
        self.rri
    }

    pub fn offset(&self) -> [f64; 3] {
        self.offset
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn linear_dimension(&self) -> f64 {
        self.shape.linear_dimension()
    }
}

/// Homogeneous-sphere form factor `3 (sin u - u cos u) / u^3`, with `f(0) = 1`.
pub fn sphere_form_factor(u: f64) -> f64 {
    if u < 0.1 {
        let u2 = u * u;
        // 1 - u^2/10 + u^4/280 - u^6/15120 + u^8/1330560
        1.0 - u2 / 10.0 * (1.0 - u2 / 28.0 * (1.0 - u2 / 54.0 * (1.0 - u2 / 88.0)))
    } else {
        3.0 * (u.sin() - u * u.cos()) / (u * u * u)
    }
}

/// Scattering vector `q = k (z_hat - s_hat)`.
pub fn scattering_vector(k: f64, theta: f64) -> [f64; 3] {
    let half = (0.5 * theta).sin();
    [-k * theta.sin(), 0.0, 2.0 * k * half * half]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Cells per axis of the first lattice.
    pub min_cells: usize,
    /// Refinement stops with an error past this many cells per axis.
    pub max_cells: usize,
    /// Target absolute error on the form factor.
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            min_cells: 64,
            max_cells: 512,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactorEstimate {
    pub value: Complex64,
    /// Cells per axis of the finest lattice used (element count for point clouds).
    pub cells: usize,
    /// Estimated absolute error.
    pub achieved_tolerance: f64,
}

/// Numeric form factor `(1/V) int_V exp(i delta) dV` with default quadrature options.
pub fn form_factor_numeric(region: &HomogeneousRegion, k: f64, theta: f64) -> Result<Complex64> {
    Ok(form_factor_numeric_with(region, k, theta, &QuadratureOptions::default())?.value)
}

/// Numeric form factor by midpoint lattices refined in factor-2 steps.
///
/// Boxes use a Cartesian lattice, spheres a lattice in `(r, theta', phi')`
/// with the `r^2 sin theta'` Jacobian. Each level is normalized by its own
/// quadrature volume so `f = 1` at `q = 0` for every resolution. Successive
/// levels are combined by Romberg extrapolation (the midpoint error is a
/// series in even powers of `h`), and refinement stops once the last
/// extrapolation correction is below the tolerance. Point clouds are summed exactly.
pub fn form_factor_numeric_with(
    region: &HomogeneousRegion,
    k: f64,
    theta: f64,
    options: &QuadratureOptions,
) -> Result<FormFactorEstimate> {
    if !(region.volume > 0.0) {
        return Err(Error::domain("region volume must be > 0"));
    }
    let q = scattering_vector(k, theta);
    let shift = Complex64::from_polar(1.0, dot(q, region.offset));

    let lattice: fn(&Shape, [f64; 3], usize) -> Complex64 = match &region.shape {
        Shape::PointCloud { points, volumes } => {
            let mut acc = ComplexSum::default();
            let mut vol = crate::sum::CompensatedSum::default();
            for (p, &v) in points.iter().zip(volumes) {
                acc.add(v * Complex64::from_polar(1.0, dot(q, *p)));
                vol.add(v);
            }
            return Ok(FormFactorEstimate {
                value: shift * acc.total() / vol.total(),
                cells: points.len(),
                achieved_tolerance: 0.0,
            });
        }
        Shape::Box { .. } => box_lattice,
        Shape::Sphere { .. } => sphere_lattice,
    };

    let mut n = options.min_cells.max(2);
    // Romberg table, one row per lattice level
    let mut prev_row = vec![lattice(&region.shape, q, n)];
    loop {
        let fine_n = 2 * n;
        if fine_n > options.max_cells {
            return Err(Error::numerical(format!(
                "form-factor quadrature did not reach tolerance {} by {} cells per axis",
                options.tolerance, n
            )));
        }
        let mut row = vec![lattice(&region.shape, q, fine_n)];
        let mut factor = 1.0;
        for j in 0..prev_row.len() {
            factor *= 4.0;
            let next = row[j] + (row[j] - prev_row[j]) / (factor - 1.0);
            row.push(next);
        }
        let last = row.len() - 1;
        let err = (row[last] - row[last - 1]).norm();
        if err < options.tolerance {
            return Ok(FormFactorEstimate {
                value: shift * row[last],
                cells: fine_n,
                achieved_tolerance: err,
            });
        }
        prev_row = row;
        n = fine_n;
    }
}

/// Midpoint rule over an `n^3` Cartesian lattice; separable in the three axes.
fn box_lattice(shape: &Shape, q: [f64; 3], n: usize) -> Complex64 {
    let Shape::Box { extents } = shape else {
        unreachable!("box lattice on non-box shape")
    };
    let mut f = Complex64::new(1.0, 0.0);
    for axis in 0..3 {
        let h = extents[axis] / n as f64;
        let mut acc = ComplexSum::default();
        for i in 0..n {
            let x = -0.5 * extents[axis] + (i as f64 + 0.5) * h;
            acc.add(Complex64::from_polar(1.0, q[axis] * x));
        }
        f *= acc.total() / n as f64;
    }
    f
}

/// Midpoint rule over an `n^3` lattice in spherical coordinates.
fn sphere_lattice(shape: &Shape, q: [f64; 3], n: usize) -> Complex64 {
    let Shape::Sphere { radius } = *shape else {
        unreachable!("sphere lattice on non-sphere shape")
    };
    let nf = n as f64;
    let (dr, dt, dp) = (radius / nf, PI / nf, 2.0 * PI / nf);
    let azimuth: Vec<(f64, f64)> = (0..n)
        .map(|k| ((k as f64 + 0.5) * dp).sin_cos())
        .collect();
    let polar: Vec<(f64, f64)> = (0..n)
        .map(|j| ((j as f64 + 0.5) * dt).sin_cos())
        .collect();
    // slab sums collected in order, then reduced sequentially
    let slabs: Vec<(Complex64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = (i as f64 + 0.5) * dr;
            let mut acc = ComplexSum::default();
            let mut vol = crate::sum::CompensatedSum::default();
            for &(st, ct) in &polar {
                let w = r * r * st;
                let mut ring = ComplexSum::default();
                for &(sp, cp) in &azimuth {
                    let phase = r * (q[0] * st * cp + q[1] * st * sp + q[2] * ct);
                    ring.add(Complex64::from_polar(1.0, phase));
                }
                acc.add(w * ring.total());
                vol.add(w * nf);
            }
            (acc.total(), vol.total())
        })
        .collect();
    let mut acc = ComplexSum::default();
    let mut vol = crate::sum::CompensatedSum::default();
    for (s, v) in slabs {
        acc.add(s);
        vol.add(v);
    }
    acc.total() / vol.total()
}

/// Form factor used by the amplitude routines: closed form for spheres,
/// lattice quadrature otherwise.
pub fn form_factor(region: &HomogeneousRegion, k: f64, theta: f64) -> Result<Complex64> {
    match region.shape {
        Shape::Sphere { radius } => {
            let q = scattering_vector(k, theta);
            let u = 2.0 * k * radius * (0.5 * theta).sin();
            Ok(sphere_form_factor(u) * Complex64::from_polar(1.0, dot(q, region.offset)))
        }
        _ => form_factor_numeric(region, k, theta),
    }
}

fn scattering_cosine(theta: f64) -> f64 {
    if theta == FRAC_PI_2 {
        0.0
    } else {
        theta.cos()
    }
}

/// `S1 = -(i k^3 / 2 pi) (m - 1) V f(theta)`, `S2 = S1 cos(theta)`.
pub fn rgd_amplitudes(
    particle: &HomogeneousRegion,
    medium_index: f64,
    wavelength_vacuum: f64,
    theta: f64,
) -> Result<(Complex64, Complex64)> {
    if !(medium_index > 0.0 && wavelength_vacuum > 0.0) {
        return Err(Error::domain("medium index and wavelength must be > 0"));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
    }
    let k = 2.0 * PI * medium_index / wavelength_vacuum;
    let f = form_factor(particle, k, theta)?;
    let s1 = -(I * k.powi(3) / (2.0 * PI)) * (particle.rri - 1.0) * particle.volume * f;
    Ok((s1, s1 * scattering_cosine(theta)))
}

/// Amplitudes of a particle made of several homogeneous regions, summed
/// region by region with phases referenced to the common origin.
pub fn heterogeneous_amplitudes(
    regions: &[HomogeneousRegion],
    medium_index: f64,
    wavelength_vacuum: f64,
    theta: f64,
) -> Result<(Complex64, Complex64)> {
    if regions.is_empty() {
        return Err(Error::domain("heterogeneous particle needs at least one region"));
    }
    let mut s1 = ComplexSum::default();
    let mut s2 = ComplexSum::default();
    for region in regions {
        let (a, b) = rgd_amplitudes(region, medium_index, wavelength_vacuum, theta)?;
        s1.add(a);
        s2.add(b);
    }
    Ok((s1.total(), s2.total()))
}

/// Differential scattered intensity over an angle grid. Patterns evaluated
/// outside the default validity limits carry a warning.
pub fn rgd_intensity_pattern(
    particle: &HomogeneousRegion,
    medium_index: f64,
    wavelength_vacuum: f64,
    theta_grid: &[f64],
    polarization: Polarization,
) -> Result<ScatteringPattern> {
    validate_angle_grid(theta_grid)?;
    let intensities = theta_grid
        .iter()
        .map(|&theta| {
            let (s1, s2) = rgd_amplitudes(particle, medium_index, wavelength_vacuum, theta)?;
            Ok(polarization.intensity(s1.norm_sqr(), s2.norm_sqr()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let k = 2.0 * PI * medium_index / wavelength_vacuum;
    let validity = validity_check_default(particle.rri, k, particle.linear_dimension());
    let mut warnings = Vec::new();
    if !validity.valid {
        warnings.push(format!(
            "outside RGD validity: |m-1| = {:.4}, k d |m-1| = {:.4} (limits {}, {})",
            validity.contrast, validity.phase_shift, validity.contrast_limit, validity.phase_limit
        ));
    }
    Ok(ScatteringPattern {
        thetas: theta_grid.to_vec(),
        intensities,
        model: ScatteringModel::Rgd,
        wavelength_vacuum,
        medium_index,
        polarization,
        warnings,
    })
}
