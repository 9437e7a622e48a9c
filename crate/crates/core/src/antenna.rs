//! Antenna figures of merit and uniform linear arrays.
//!
//! Power densities are functions of `(theta, phi)` on the unit sphere with
//! `theta` measured from the array or dipole axis.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{FREE_SPACE_IMPEDANCE, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::sum::{CompensatedSum, ComplexSum};
use crate::{Error, Result};

/// Relative change between successive quadrature refinements that ends the
/// refinement. Kept a decade below the accuracy promised to callers.
const QUADRATURE_RTOL: f64 = 1e-10;
const QUADRATURE_MAX_NODES: usize = 2048;

type Sampler = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Power density `p(theta, phi) >= 0` per steradian.
#[derive(Clone)]
pub struct RadiationPattern {
    sampler: Arc<Sampler>,
}

impl fmt::Debug for RadiationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RadiationPattern { .. }")
    }
}

impl RadiationPattern {
    pub fn new(sampler: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        RadiationPattern {
            sampler: Arc::new(sampler),
        }
    }

    /// `p = 1/(4 pi)`.
    pub fn isotropic() -> Self {
        Self::new(|_, _| 1.0 / (4.0 * PI))
    }

    /// Samples the pattern, rejecting negative or non-finite densities.
    pub fn sample(&self, theta: f64, phi: f64) -> Result<f64> {
        let p = (self.sampler)(theta, phi);
        if p >= 0.0 && p.is_finite() {
            Ok(p)
        } else {
            Err(Error::domain(format!(
                "power density {p} at theta = {theta}, phi = {phi} is not a finite nonnegative value"
            )))
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre in `theta`, trapezoid in `phi`, on an `n x 2n` grid.
fn sphere_integral(pattern: &RadiationPattern, n: usize) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(n);
    let n_phi = 2 * n;
    let dphi = 2.0 * PI / n_phi as f64;
    // the substitution theta = pi (1 + x) / 2 makes dtheta = pi/2 dx
    let rows = nodes
        .par_iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let theta = 0.5 * PI * (1.0 + x);
            let mut ring = CompensatedSum::default();
            for j in 0..n_phi {
                ring.add(pattern.sample(theta, j as f64 * dphi)?);
            }
            Ok(w * 0.5 * PI * theta.sin() * ring.total() * dphi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut total = CompensatedSum::default();
    for r in rows {
        total.add(r);
    }
    Ok(total.total())
}

/// `P_rad = int int p(theta, phi) sin(theta) dphi dtheta`, refined by node
/// doubling to a relative tolerance of 1e-9.
pub fn integrate_radiated_power(pattern: &RadiationPattern) -> Result<f64> {
    let mut n = 16;
    let mut prev = sphere_integral(pattern, n)?;
    loop {
        n *= 2;
        if n > QUADRATURE_MAX_NODES {
            return Err(Error::numerical(format!(
                "radiated-power quadrature not converged at {} polar nodes",
                n / 2
            )));
        }
        let next = sphere_integral(pattern, n)?;
        if (next - prev).abs() <= QUADRATURE_RTOL * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
}

/// `D = 4 pi p(theta, phi) / P_rad`.
pub fn directivity(pattern: &RadiationPattern, theta: f64, phi: f64) -> Result<f64> {
    let p_rad = integrate_radiated_power(pattern)?;
    directivity_with_power(pattern, p_rad, theta, phi)
}

fn directivity_with_power(pattern: &RadiationPattern, p_rad: f64, theta: f64, phi: f64) -> Result<f64> {
    if p_rad <= 0.0 {
        return Err(Error::domain("pattern radiates no power"));
    }
    Ok(4.0 * PI * pattern.sample(theta, phi)? / p_rad)
}

/// The directivity as a pattern in its own right; `P_rad` is integrated once.
pub fn directivity_pattern(pattern: &RadiationPattern) -> Result<RadiationPattern> {
    let p_rad = integrate_radiated_power(pattern)?;
    if p_rad <= 0.0 {
        return Err(Error::domain("pattern radiates no power"));
    }
    let inner = pattern.clone();
    Ok(RadiationPattern::new(move |t, p| {
        4.0 * PI * (inner.sampler)(t, p) / p_rad
    }))
}

/// `eta = P_rad / (P_rad + P_loss)`.
pub fn radiation_efficiency(p_rad: f64, p_loss: f64) -> Result<f64> {
    if !(p_rad >= 0.0 && p_loss >= 0.0) {
        return Err(Error::domain("radiated and lost power must be >= 0"));
    }
    if p_rad == 0.0 && p_loss == 0.0 {
        return Err(Error::domain("efficiency undefined when no power is supplied"));
    }
    Ok(p_rad / (p_rad + p_loss))
}

/// `G = 4 pi p(theta, phi) / P_total`.
pub fn gain(pattern: &RadiationPattern, p_total: f64, theta: f64, phi: f64) -> Result<f64> {
    if !(p_total > 0.0) {
        return Err(Error::domain("total input power must be > 0"));
    }
    Ok(4.0 * PI * pattern.sample(theta, phi)? / p_total)
}

/// `G = eta D`, the second route to the gain.
pub fn gain_from_efficiency(efficiency: f64, directivity: f64) -> f64 {
    efficiency * directivity
}

/// Power radiated by an oscillating point dipole,
/// `P = |p|^2 / (4 pi eps0 eps) * n^3 omega^4 / (3 c^3)`.
/// In vacuum use `eps_rel = refractive_index = 1`.
pub fn dipole_radiated_power(
    moment: f64,
    omega: f64,
    eps_rel: f64,
    refractive_index: f64,
) -> Result<f64> {
    if !(moment >= 0.0 && omega > 0.0 && eps_rel > 0.0 && refractive_index > 0.0) {
        return Err(Error::domain(
            "dipole power needs |p| >= 0 and positive omega, permittivity and index",
        ));
    }
    let c = SPEED_OF_LIGHT;
    Ok(moment * moment / (4.0 * PI * VACUUM_PERMITTIVITY * eps_rel)
        * (refractive_index.powi(3) * omega.powi(4) / (3.0 * c * c * c)))
}

/// Normalized short-dipole pattern `3 sin^2(theta) / (8 pi)`.
pub fn dipole_normalized_pattern() -> RadiationPattern {
    RadiationPattern::new(|theta, _| {
        let s = theta.sin();
        3.0 * s * s / (8.0 * PI)
    })
}

/// Partial local density of states `12 eps0 / (pi omega^2) * P / |p|^2`.
pub fn ldos(power: f64, moment: f64, omega: f64) -> Result<f64> {
    if !(moment > 0.0 && omega > 0.0) {
        return Err(Error::domain("LDOS needs |p| > 0 and omega > 0"));
    }
    Ok(12.0 * VACUUM_PERMITTIVITY / (PI * omega * omega) * power / (moment * moment))
}

/// `R = P_rad / (I_max^2 / 2)`.
pub fn radiation_resistance(p_rad: f64, i_max: f64) -> Result<f64> {
    if !(i_max > 0.0) {
        return Err(Error::domain("current amplitude must be > 0"));
    }
    Ok(p_rad / (0.5 * i_max * i_max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DipoleResistance {
    pub ohms: f64,
    /// Set when the element is longer than a tenth of the wavelength, where
    /// the short-dipole formula degrades.
    pub warning: Option<String>,
}

/// Short-dipole radiation resistance `(2 pi / 3) Z0 (dl / lambda)^2`.
pub fn dipole_radiation_resistance(delta_l: f64, wavelength: f64) -> Result<DipoleResistance> {
    if !(delta_l >= 0.0 && wavelength > 0.0) {
        return Err(Error::domain("dipole length must be >= 0 and wavelength > 0"));
    }
    let ratio = delta_l / wavelength;
    let warning = (ratio > 0.1).then(|| {
        format!("dipole length {ratio:.3} lambda exceeds 0.1 lambda; short-dipole formula inaccurate")
    });
    Ok(DipoleResistance {
        ohms: 2.0 * PI / 3.0 * FREE_SPACE_IMPEDANCE * ratio * ratio,
        warning,
    })
}

/// `lambda_eff = n1 + n2 lambda / lambda_p`. `n1` and `n2` depend on the
/// antenna geometry; both carry length units so the sum is a length.
pub fn effective_wavelength(n1: f64, n2: f64, wavelength: f64, plasma_wavelength: f64) -> Result<f64> {
    if !(plasma_wavelength > 0.0) {
        return Err(Error::domain("plasma wavelength must be > 0"));
    }
    Ok(n1 + n2 * (wavelength / plasma_wavelength))
}

/// `SR = lambda_eff lambda1 / lambda2`. The result carries the length unit of
/// `lambda_eff`; no normalization is applied.
pub fn scaling_ratio(lambda_eff: f64, lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(lambda2 > 0.0) {
        return Err(Error::domain("lambda2 must be > 0"));
    }
    Ok(lambda_eff * lambda1 / lambda2)
}

/// Uniform linear array along the `theta = 0` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArraySpec {
    element_count: usize,
    spacing: f64,
    progressive_phase: f64,
    wavelength: f64,
}

impl ArraySpec {
    pub fn new(element_count: usize, spacing: f64, progressive_phase: f64, wavelength: f64) -> Result<Self> {
        if element_count == 0 {
            return Err(Error::domain("array needs at least one element"));
        }
        if !(spacing > 0.0 && wavelength > 0.0) {
            return Err(Error::domain("element spacing and wavelength must be > 0"));
        }
        if !progressive_phase.is_finite() {
            return Err(Error::domain("progressive phase must be finite"));
        }
        Ok(ArraySpec {
            element_count,
            spacing,
            progressive_phase,
            wavelength,
        })
    }

    /// Ordinary end-fire array, `beta = -k d`, main beam at `theta = 0`.
    pub fn end_fire(element_count: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        let k = 2.0 * PI / wavelength;
        Self::new(element_count, spacing, -k * spacing, wavelength)
    }

    pub fn element_count(&self) -> usize {
        self.element_count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn progressive_phase(&self) -> f64 {
        self.progressive_phase
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

/// Hansen-Woodyard spacing `d = (N - 1)/N * lambda/4`.
pub fn hansen_woodyard_spacing(element_count: usize, wavelength: f64) -> Result<f64> {
    if element_count == 0 || !(wavelength > 0.0) {
        return Err(Error::domain("need N >= 1 and wavelength > 0"));
    }
    let n = element_count as f64;
    Ok((n - 1.0) / n * wavelength / 4.0)
}

/// `AF(theta) = sum_m exp(i m (k d cos(theta) + beta))`, `m = 0..N-1`.
pub fn array_factor(spec: &ArraySpec, theta: f64) -> Complex64 {
    let psi = spec.wavenumber() * spec.spacing * theta.cos() + spec.progressive_phase;
    let mut acc = ComplexSum::default();
    for m in 0..spec.element_count {
        acc.add(Complex64::from_polar(1.0, m as f64 * psi));
    }
    acc.total()
}

/// `element(theta, phi) |AF(theta)|^2 / N^2`.
pub fn uniform_array_pattern(spec: &ArraySpec, element: &RadiationPattern) -> RadiationPattern {
    let spec = *spec;
    let element = element.clone();
    let n2 = (spec.element_count * spec.element_count) as f64;
    RadiationPattern::new(move |theta, phi| {
        (element.sampler)(theta, phi) * array_factor(&spec, theta).norm_sqr() / n2
    })
}
