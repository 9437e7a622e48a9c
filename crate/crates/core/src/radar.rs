//! Scene description, echo patterns and threshold detection.
//!
//! The echo at range `R` is the far-field scattered intensity `|S|^2`
//! divided by `k^2 R^2`, i.e. the scattered irradiance per unit incident
//! irradiance. Range budgeting happens only here; the scattering modules
//! stay far-field normalized.
//!
//! A dipole emitter is treated as a distant source: its frequency fixes the
//! wavelength and the particle sees a locally plane, unpolarized wave.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::medium::Medium;
use crate::mie::{mie_intensity_pattern, DipoleSource, Sphere};
use crate::pattern::{Polarization, ScatteringModel, ScatteringPattern};
use crate::photodetector::{photocurrent_series, PhotocurrentTrace, RcePdParams};
use crate::rgd::{rgd_intensity_pattern, validity_check_default, HomogeneousRegion, RgdValidity};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Illumination {
    PlaneWave {
        wavelength_vacuum: f64,
        polarization: Polarization,
    },
    Dipole(DipoleSource),
}

impl Illumination {
    pub fn wavelength_vacuum(&self) -> f64 {
        match self {
            Illumination::PlaneWave { wavelength_vacuum, .. } => *wavelength_vacuum,
            Illumination::Dipole(d) => d.wavelength_vacuum(),
        }
    }

    pub fn polarization(&self) -> Polarization {
        match self {
            Illumination::PlaneWave { polarization, .. } => *polarization,
            Illumination::Dipole(_) => Polarization::Unpolarized,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Sphere(Sphere),
    Region(HomogeneousRegion),
}

impl Target {
    pub fn rri(&self) -> Complex64 {
        match self {
            Target::Sphere(s) => s.rri,
            Target::Region(r) => r.rri(),
        }
    }

    pub fn linear_dimension(&self) -> f64 {
        match self {
            Target::Sphere(s) => 2.0 * s.radius,
            Target::Region(r) => r.linear_dimension(),
        }
    }

    fn center(&self) -> [f64; 3] {
        match self {
            Target::Sphere(s) => s.center,
            Target::Region(r) => r.offset(),
        }
    }

    fn as_region(&self) -> Result<HomogeneousRegion> {
        match self {
            Target::Sphere(s) => Ok(HomogeneousRegion::sphere(s.radius, s.rri)?.with_offset(s.center)),
            Target::Region(r) => Ok(r.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadarScene {
    illumination: Illumination,
    target: Target,
    medium: Medium,
    range: f64,
}

impl RadarScene {
    pub fn new(illumination: Illumination, target: Target, medium: Medium, range: f64) -> Result<Self> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::domain(format!("range must be > 0, got {range}")));
        }
        let wl = illumination.wavelength_vacuum();
        if !(wl > 0.0 && wl.is_finite()) {
            return Err(Error::domain(format!("wavelength must be > 0, got {wl}")));
        }
        if let Illumination::Dipole(d) = &illumination {
            let c = target.center();
            let dist = (0..3).map(|i| (d.position[i] - c[i]).powi(2)).sum::<f64>().sqrt();
            if dist <= 0.5 * target.linear_dimension() {
                return Err(Error::domain("emitter lies inside the particle"));
            }
        }
        Ok(RadarScene {
            illumination,
            target,
            medium,
            range,
        })
    }

    pub fn illumination(&self) -> &Illumination {
        &self.illumination
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn range(&self) -> f64 {
        self.range
    }

    /// Wavenumber in the medium.
    pub fn wavenumber(&self) -> f64 {
        self.medium.wavenumber(self.illumination.wavelength_vacuum())
    }

    /// Same scene at another range.
    pub fn with_range(&self, range: f64) -> Result<Self> {
        Self::new(self.illumination, self.target.clone(), self.medium, range)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSelection {
    pub model: ScatteringModel,
    pub validity: RgdValidity,
    /// `1 - |m-1|/limit`; positive when the contrast condition holds.
    pub contrast_margin: f64,
    /// `1 - k d |m-1|/limit`; positive when the phase condition holds.
    pub phase_margin: f64,
    pub rationale: String,
}

/// RGD when both validity conditions hold, Mie otherwise. Mie needs a sphere.
pub fn select_model(scene: &RadarScene) -> Result<ModelSelection> {
    let k = scene.wavenumber();
    let d = scene.target.linear_dimension();
    let validity = validity_check_default(scene.target.rri(), k, d);
    let contrast_margin = 1.0 - validity.contrast / validity.contrast_limit;
    let phase_margin = 1.0 - validity.phase_shift / validity.phase_limit;
    let model = if validity.valid {
        ScatteringModel::Rgd
    } else if matches!(scene.target, Target::Sphere(_)) {
        ScatteringModel::Mie
    } else {
        return Err(Error::Unsupported(format!(
            "non-spherical particle outside RGD validity (|m-1| = {:.4}, k d |m-1| = {:.4}); Mie needs a sphere",
            validity.contrast, validity.phase_shift
        )));
    };
    let rationale = format!(
        "|m-1| = {:.4} (limit {}), k d |m-1| = {:.4} (limit {}): {}",
        validity.contrast,
        validity.contrast_limit,
        validity.phase_shift,
        validity.phase_limit,
        if validity.valid { "RGD valid" } else { "RGD invalid, using Mie" }
    );
    Ok(ModelSelection {
        model,
        validity,
        contrast_margin,
        phase_margin,
        rationale,
    })
}

fn range_factor(scene: &RadarScene) -> f64 {
    let k = scene.wavenumber();
    1.0 / (k * k * scene.range * scene.range)
}

/// Received echo pattern with the model chosen by [`select_model`].
pub fn echo_pattern(
    scene: &RadarScene,
    theta_grid: &[f64],
    polarization: Polarization,
) -> Result<ScatteringPattern> {
    let model = select_model(scene)?.model;
    echo_pattern_with_model(scene, theta_grid, polarization, model)
}

/// Received echo pattern with an explicitly chosen model.
pub fn echo_pattern_with_model(
    scene: &RadarScene,
    theta_grid: &[f64],
    polarization: Polarization,
    model: ScatteringModel,
) -> Result<ScatteringPattern> {
    let wl = scene.illumination.wavelength_vacuum();
    let n = scene.medium.refractive_index();
    let pattern = match (model, &scene.target) {
        (ScatteringModel::Mie, Target::Sphere(s)) => mie_intensity_pattern(s, n, wl, theta_grid, polarization)?,
        (ScatteringModel::Mie, Target::Region(_)) => {
            return Err(Error::Unsupported("Mie scattering needs a spherical particle".into()));
        }
        (ScatteringModel::Rgd, target) => {
            rgd_intensity_pattern(&target.as_region()?, n, wl, theta_grid, polarization)?
        }
    };
    Ok(pattern.scaled(range_factor(scene)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseModel {
    #[default]
    None,
    ConstantFloor { level: f64 },
    /// Seeded i.i.d. zero-mean Gaussian samples, results clipped at zero.
    Gaussian { sigma: f64, seed: u64 },
}

pub fn apply_noise(pattern: &ScatteringPattern, noise: &NoiseModel) -> Result<ScatteringPattern> {
    let mut out = pattern.clone();
    match *noise {
        NoiseModel::None => {}
        NoiseModel::ConstantFloor { level } => {
            if !(level >= 0.0 && level.is_finite()) {
                return Err(Error::domain(format!("noise floor must be >= 0, got {level}")));
            }
            for v in &mut out.intensities {
                *v += level;
            }
        }
        NoiseModel::Gaussian { sigma, seed } => {
            if !(sigma >= 0.0) {
                return Err(Error::domain(format!("noise sigma must be >= 0, got {sigma}")));
            }
            let normal = Normal::new(0.0, sigma)
                .map_err(|_| Error::domain(format!("noise sigma must be >= 0, got {sigma}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for v in &mut out.intensities {
                *v = (*v + normal.sample(&mut rng)).max(0.0);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Threshold {
    /// Intensity in the units of the pattern.
    Absolute(f64),
    /// Fraction in `(0, 1]` of the pattern maximum.
    Relative(f64),
}

impl Threshold {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Threshold::Absolute(v) if !(v >= 0.0 && v.is_finite()) => {
                Err(Error::domain(format!("absolute threshold must be >= 0, got {v}")))
            }
            Threshold::Relative(f) if !(f > 0.0 && f <= 1.0) => {
                Err(Error::domain(format!("relative threshold must lie in (0, 1], got {f}")))
            }
            _ => Ok(()),
        }
    }

    pub fn resolve(&self, pattern: &ScatteringPattern) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Threshold::Absolute(v) => v,
            Threshold::Relative(f) => f * pattern.max_intensity(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub threshold: f64,
    /// Disjoint, sorted `(theta_lo, theta_hi)` ranges with intensity at or above threshold.
    pub intervals: Vec<(f64, f64)>,
    pub look_direction: f64,
    /// Half-width of the interval containing the look direction, 0 if none.
    pub delta: f64,
    pub detected: bool,
}

fn crossing(t0: f64, t1: f64, y0: f64, y1: f64, level: f64) -> f64 {
    t0 + (level - y0) / (y1 - y0) * (t1 - t0)
}

/// Maximal runs of grid nodes at or above `threshold`, with run ends moved
/// to the linearly interpolated crossing with the neighbouring node below
/// threshold.
pub fn threshold_detect(
    pattern: &ScatteringPattern,
    threshold: f64,
    look_direction: f64,
) -> Result<DetectionReport> {
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(Error::domain(format!("threshold must be >= 0, got {threshold}")));
    }
    let (t, y) = (&pattern.thetas, &pattern.intensities);
    let mut intervals = Vec::new();
    let mut i = 0;
    while i < y.len() {
        if y[i] < threshold {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < y.len() && y[i + 1] >= threshold {
            i += 1;
        }
        let lo = if start == 0 {
            t[0]
        } else {
            crossing(t[start - 1], t[start], y[start - 1], y[start], threshold)
        };
        let hi = if i + 1 == y.len() {
            t[i]
        } else {
            crossing(t[i], t[i + 1], y[i], y[i + 1], threshold)
        };
        intervals.push((lo, hi));
        i += 1;
    }
    let containing = intervals
        .iter()
        .find(|(lo, hi)| *lo <= look_direction && look_direction <= *hi);
    Ok(DetectionReport {
        threshold,
        look_direction,
        delta: containing.map_or(0.0, |(lo, hi)| 0.5 * (hi - lo)),
        detected: containing.is_some(),
        intervals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub selection: ModelSelection,
    /// Echo before noise.
    pub echo: ScatteringPattern,
    /// Echo after noise; the input to detection.
    pub pattern: ScatteringPattern,
    pub report: DetectionReport,
}

/// Echo, noise and detection in sequence. Errors carry the failing stage.
pub fn run_pipeline(
    scene: &RadarScene,
    theta_grid: &[f64],
    noise: &NoiseModel,
    threshold: &Threshold,
    look_direction: f64,
) -> Result<PipelineOutput> {
    let selection = select_model(scene).map_err(|e| e.in_stage("model selection"))?;
    let echo = echo_pattern_with_model(
        scene,
        theta_grid,
        scene.illumination.polarization(),
        selection.model,
    )
    .map_err(|e| e.in_stage("echo"))?;
    let pattern = apply_noise(&echo, noise).map_err(|e| e.in_stage("noise"))?;
    let report = threshold
        .resolve(&pattern)
        .and_then(|level| threshold_detect(&pattern, level, look_direction))
        .map_err(|e| e.in_stage("detection"))?;
    Ok(PipelineOutput {
        selection,
        echo,
        pattern,
        report,
    })
}

/// Serialized detection result; angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionDocument {
    pub model: ScatteringModel,
    pub threshold: f64,
    pub intervals_degrees: Vec<[f64; 2]>,
    pub look_direction_degrees: f64,
    pub delta_degrees: f64,
    pub detected: bool,
    pub contrast_margin: f64,
    pub phase_margin: f64,
    pub warnings: Vec<String>,
}

impl PipelineOutput {
    pub fn document(&self) -> DetectionDocument {
        let r = &self.report;
        DetectionDocument {
            model: self.selection.model,
            threshold: r.threshold,
            intervals_degrees: r.intervals.iter().map(|(a, b)| [a.to_degrees(), b.to_degrees()]).collect(),
            look_direction_degrees: r.look_direction.to_degrees(),
            delta_degrees: r.delta.to_degrees(),
            detected: r.detected,
            contrast_margin: self.selection.contrast_margin,
            phase_margin: self.selection.phase_margin,
            warnings: self.pattern.warnings.clone(),
        }
    }
}

/// Photocurrent from the echo collected over a small aperture.
///
/// The pattern intensity is read as power per steradian at the aperture
/// center and multiplied by the aperture solid angle; that power is switched
/// on at `t = 0` in the photodiode model.
pub fn echo_to_photocurrent(
    pattern: &ScatteringPattern,
    collection_solid_angle: f64,
    aperture_center: f64,
    pd: &RcePdParams,
    t_grid: &[f64],
) -> Result<PhotocurrentTrace> {
    if !(collection_solid_angle > 0.0 && collection_solid_angle <= 4.0 * PI) {
        return Err(Error::domain(format!(
            "collection solid angle must lie in (0, 4 pi], got {collection_solid_angle}"
        )));
    }
    let density = pattern.interpolate(aperture_center).ok_or_else(|| {
        Error::domain(format!("aperture center {aperture_center} outside the angle grid"))
    })?;
    photocurrent_series(t_grid, density * collection_solid_angle, pd)
}
