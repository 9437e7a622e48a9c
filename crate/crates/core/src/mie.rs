//! Lorenz-Mie scattering by a single homogeneous sphere.
//!
//! Conventions: `exp(-i omega t)` time dependence, so absorbing particles
//! have `Im(m) >= 0`; `m` is the particle index relative to the medium and
//! wavenumbers are taken in the medium, `k = 2 pi n_med / lambda0`.
//! Scattering amplitudes follow the Bohren-Huffman normalization, with
//! `theta = 0` the forward direction.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::SPEED_OF_LIGHT;
use crate::medium::Medium;
use crate::pattern::{validate_angle_grid, Polarization, ScatteringModel, ScatteringPattern};
use crate::specfun::{
    angular_functions, associated_legendre_table, riccati_bessel, spherical_hankel1_array,
    MAX_LEGENDRE_DEGREE,
};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Homogeneous sphere: radius in meters, relative refractive index, center in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub radius: f64,
    pub rri: Complex64,
    pub center: [f64; 3],
}

impl Sphere {
    pub fn new(radius: f64, rri: Complex64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::domain(format!("sphere radius must be > 0, got {radius}")));
        }
        if !rri.re.is_finite() || !rri.im.is_finite() || rri.im < 0.0 {
            return Err(Error::domain(format!(
                "relative refractive index must be finite with Im >= 0, got {rri}"
            )));
        }
        Ok(Sphere {
            radius,
            rri,
            center: [0.0; 3],
        })
    }

    pub fn centered_at(mut self, center: [f64; 3]) -> Self {
        self.center = center;
        self
    }
}

/// Size parameter `x = 2 pi n_med r / lambda0`.
pub fn size_parameter(radius: f64, wavelength_vacuum: f64, medium_index: f64) -> Result<f64> {
    if !(radius > 0.0 && wavelength_vacuum > 0.0 && medium_index > 0.0) {
        return Err(Error::domain(format!(
            "size_parameter needs positive inputs (r={radius}, lambda={wavelength_vacuum}, n={medium_index})"
        )));
    }
    Ok(2.0 * std::f64::consts::PI * medium_index * radius / wavelength_vacuum)
}

/// Series cutoff `ceil(x + 4 x^(1/3) + 2)`.
pub fn truncation_order(x: f64) -> usize {
    (x + 4.0 * x.cbrt() + 2.0).ceil() as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct MieCoefficients {
    pub order_max: usize,
    /// `a[n - 1]` holds `a_n` (electric multipoles).
    pub a: Vec<Complex64>,
    /// `b[n - 1]` holds `b_n` (magnetic multipoles).
    pub b: Vec<Complex64>,
    pub size_parameter: f64,
    pub rri: Complex64,
}

impl MieCoefficients {
    pub fn a(&self, n: usize) -> Complex64 {
        self.a[n - 1]
    }

    pub fn b(&self, n: usize) -> Complex64 {
        self.b[n - 1]
    }
}

/// Lorenz-Mie coefficients `a_n`, `b_n` for `n = 1..=order_max`.
///
/// Evaluated through the logarithmic derivative `D_n(mx) = psi_n'(mx)/psi_n(mx)`,
/// which is algebraically the ratio form in `psi_n(mx)`, `psi_n'(mx)` but does
/// not overflow for absorbing spheres.
pub fn lorenz_mie_coefficients(x: f64, m: Complex64, order_max: usize) -> Result<MieCoefficients> {
    if x > 0.0 && order_max < truncation_order(x) {
        return Err(Error::domain(format!(
            "order_max {order_max} below the truncation order {} for x = {x}",
            truncation_order(x)
        )));
    }
    coefficients_unchecked(x, m, order_max)
}

fn coefficients_unchecked(x: f64, m: Complex64, order_max: usize) -> Result<MieCoefficients> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("size parameter must be > 0, got {x}")));
    }
    if m.norm() == 0.0 {
        return Err(Error::domain("relative refractive index m = 0"));
    }
    if order_max < 1 {
        return Err(Error::domain("order_max must be >= 1"));
    }
    let mut coeffs = MieCoefficients {
        order_max,
        a: vec![ZERO; order_max],
        b: vec![ZERO; order_max],
        size_parameter: x,
        rri: m,
    };
    if m == Complex64::new(1.0, 0.0) {
        return Ok(coeffs);
    }

    let mx = m * x;
    let rb = riccati_bessel(order_max, Complex64::new(x, 0.0))?;

    // D_(n-1) = n/z - 1/(D_n + n/z), started well above order_max
    let start = order_max.max(mx.norm().ceil() as usize) + 16;
    let mut d = vec![ZERO; start + 1];
    for n in (1..=start).rev() {
        let nz = n as f64 / mx;
        d[n - 1] = nz - 1.0 / (d[n] + nz);
    }

    for n in 1..=order_max {
        let nx = n as f64 / x;
        let ta = d[n] / m + nx;
        let tb = d[n] * m + nx;
        let num_a = ta * rb.psi[n] - rb.psi[n - 1];
        let den_a = ta * rb.xi[n] - rb.xi[n - 1];
        let num_b = tb * rb.psi[n] - rb.psi[n - 1];
        let den_b = tb * rb.xi[n] - rb.xi[n - 1];
        for den in [den_a, den_b] {
            if den.norm() == 0.0 || !den.re.is_finite() || !den.im.is_finite() {
                return Err(Error::numerical(format!(
                    "Mie coefficient denominator underflow/overflow at order {n}"
                )));
            }
        }
        coeffs.a[n - 1] = num_a / den_a;
        coeffs.b[n - 1] = num_b / den_b;
    }
    Ok(coeffs)
}

/// Far-field amplitudes `(S1, S2)` at scattering angle `theta`.
pub fn scattering_amplitudes(coeffs: &MieCoefficients, theta: f64) -> Result<(Complex64, Complex64)> {
    let ang = angular_functions(coeffs.order_max, theta)?;
    let (mut s1, mut s2) = (ZERO, ZERO);
    for n in 1..=coeffs.order_max {
        let nf = n as f64;
        let w = (2.0 * nf + 1.0) / (nf * (nf + 1.0));
        let (a, b) = (coeffs.a(n), coeffs.b(n));
        let (p, t) = (ang.pi(n), ang.tau(n));
        s1 += w * (a * p + b * t);
        s2 += w * (a * t + b * p);
    }
    Ok((s1, s2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Efficiencies {
    pub q_sca: f64,
    pub q_ext: f64,
}

impl Efficiencies {
    pub fn q_abs(&self) -> f64 {
        self.q_ext - self.q_sca
    }
}

pub fn efficiencies(coeffs: &MieCoefficients) -> Efficiencies {
    let x = coeffs.size_parameter;
    let (mut sca, mut ext) = (0.0, 0.0);
    for n in 1..=coeffs.order_max {
        let w = (2 * n + 1) as f64;
        let (a, b) = (coeffs.a(n), coeffs.b(n));
        sca += w * (a.norm_sqr() + b.norm_sqr());
        ext += w * (a + b).re;
    }
    let f = 2.0 / (x * x);
    Efficiencies {
        q_sca: f * sca,
        q_ext: f * ext,
    }
}

/// Mie coefficients for a sphere in a medium at the given vacuum wavelength,
/// truncated at [`truncation_order`].
pub fn sphere_coefficients(
    sphere: &Sphere,
    medium_index: f64,
    wavelength_vacuum: f64,
) -> Result<MieCoefficients> {
    let x = size_parameter(sphere.radius, wavelength_vacuum, medium_index)?;
    lorenz_mie_coefficients(x, sphere.rri, truncation_order(x))
}

/// Differential scattered intensity `|S|^2` over an angle grid (radians).
pub fn mie_intensity_pattern(
    sphere: &Sphere,
    medium_index: f64,
    wavelength_vacuum: f64,
    theta_grid: &[f64],
    polarization: Polarization,
) -> Result<ScatteringPattern> {
    validate_angle_grid(theta_grid)?;
    let coeffs = sphere_coefficients(sphere, medium_index, wavelength_vacuum)?;
    let intensities = theta_grid
        .par_iter()
        .map(|&theta| {
            let (s1, s2) = scattering_amplitudes(&coeffs, theta)?;
            Ok(polarization.intensity(s1.norm_sqr(), s2.norm_sqr()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ScatteringPattern {
        thetas: theta_grid.to_vec(),
        intensities,
        model: ScatteringModel::Mie,
        wavelength_vacuum,
        medium_index,
        polarization,
        warnings: Vec::new(),
    })
}

/// Oscillating point dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    /// Dipole moment, C m.
    pub moment: [Complex64; 3],
    /// Position, m.
    pub position: [f64; 3],
    /// Angular frequency, rad/s.
    pub omega: f64,
}

impl DipoleSource {
    pub fn new(moment: [Complex64; 3], position: [f64; 3], omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!("dipole frequency must be > 0, got {omega}")));
        }
        Ok(DipoleSource {
            moment,
            position,
            omega,
        })
    }

    /// Vacuum wavelength `2 pi c / omega`.
    pub fn wavelength_vacuum(&self) -> f64 {
        2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / self.omega
    }
}

/// Outgoing vector spherical wave functions `M^(3)_lm`, `N^(3)_lm` at one
/// point, in Cartesian components.
///
/// Unnormalized form:
///
/// ```text
/// M_lm = h_l(kr) [ i pi_l^m theta_hat - tau_l^m phi_hat ] e^{i m phi}
/// N_lm = [ l(l+1) h_l(kr)/(kr) P_l^m r_hat + xi_l'(kr)/(kr) (tau_l^m theta_hat + i pi_l^m phi_hat) ] e^{i m phi}
/// ```
///
/// with `pi_l^m = m P_l^m(cos theta)/sin theta`, `tau_l^m = dP_l^m/d theta`
/// (Condon-Shortley phase), so that `curl M = k N`. The `l = 1, m = 0` member
/// has the spatial structure of the field of a z-oriented point dipole.
#[derive(Debug, Clone)]
pub struct OutgoingWaves {
    pub l_max: usize,
    /// Indexed `[l - 1][m + l]`.
    pub m_waves: Vec<Vec<[Complex64; 3]>>,
    pub n_waves: Vec<Vec<[Complex64; 3]>>,
}

impl OutgoingWaves {
    pub fn m(&self, l: usize, m: i64) -> [Complex64; 3] {
        self.m_waves[l - 1][(m + l as i64) as usize]
    }

    pub fn n(&self, l: usize, m: i64) -> [Complex64; 3] {
        self.n_waves[l - 1][(m + l as i64) as usize]
    }
}

pub fn outgoing_waves(l_max: usize, k: f64, r: [f64; 3]) -> Result<OutgoingWaves> {
    if l_max < 1 || l_max + 1 > MAX_LEGENDRE_DEGREE {
        return Err(Error::domain(format!(
            "l_max must lie in 1..={}, got {l_max}",
            MAX_LEGENDRE_DEGREE - 1
        )));
    }
    let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if !(dist > 0.0) || !(k > 0.0) {
        return Err(Error::domain("outgoing waves are singular at the origin"));
    }
    let rho = k * dist;
    let cos_t = (r[2] / dist).clamp(-1.0, 1.0);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = r[1].atan2(r[0]);
    let (sin_p, cos_p) = phi.sin_cos();
    let r_hat = [sin_t * cos_p, sin_t * sin_p, cos_t];
    let t_hat = [cos_t * cos_p, cos_t * sin_p, -sin_t];
    let p_hat = [-sin_p, cos_p, 0.0];

    let h = spherical_hankel1_array(l_max, rho)?;
    let leg = associated_legendre_table(l_max + 1, cos_t)?;
    let p = |l: usize, m: usize| if m <= l { leg[l][m] } else { 0.0 };

    let mut m_waves = Vec::with_capacity(l_max);
    let mut n_waves = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let lf = l as f64;
        let radial = lf * (lf + 1.0) * h[l] / rho;
        let dxi = h[l - 1] - lf * h[l] / rho;
        let mut row_m = vec![[ZERO; 3]; 2 * l + 1];
        let mut row_n = vec![[ZERO; 3]; 2 * l + 1];
        // ratio (l - mu)!/(l + mu)!, updated as mu grows
        let mut fact_ratio = 1.0;
        for mu in 0..=l {
            let muf = mu as f64;
            if mu > 0 {
                fact_ratio /= (lf + muf) * (lf - muf + 1.0);
            }
            let leg_p = p(l, mu);
            let tau = if mu == 0 {
                p(l, 1)
            } else {
                0.5 * (p(l, mu + 1) - (lf + muf) * (lf - muf + 1.0) * p(l, mu - 1))
            };
            let pi = if mu == 0 {
                0.0
            } else {
                -0.5 * (p(l + 1, mu + 1) + (lf - muf + 1.0) * (lf - muf + 2.0) * p(l + 1, mu - 1))
            };
            let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
            let variants: &[(i64, f64, f64, f64)] = if mu == 0 {
                &[(0, leg_p, tau, pi)]
            } else {
                let c = sign * fact_ratio;
                &[
                    (mu as i64, leg_p, tau, pi),
                    (-(mu as i64), c * leg_p, c * tau, -c * pi),
                ]
            };
            for &(m, leg_p, tau, pi) in variants {
                let phase = Complex64::from_polar(1.0, m as f64 * phi);
                let idx = (m + l as i64) as usize;
                let mut mv = [ZERO; 3];
                let mut nv = [ZERO; 3];
                for c in 0..3 {
                    mv[c] = h[l] * (I * pi * t_hat[c] - tau * p_hat[c]) * phase;
                    nv[c] = (radial * leg_p * r_hat[c]
                        + dxi * (tau * t_hat[c] + I * pi * p_hat[c]))
                        * phase;
                }
                row_m[idx] = mv;
                row_n[idx] = nv;
            }
        }
        m_waves.push(row_m);
        n_waves.push(row_n);
    }
    Ok(OutgoingWaves {
        l_max,
        m_waves,
        n_waves,
    })
}

/// Scattering coefficients of a sphere excited by a point dipole, indexed by
/// `l = 1..=l_max` and `n = -l..=l`.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleScatterCoefficients {
    pub l_max: usize,
    /// `(a_ln, b_ln)` indexed `[l - 1][n + l]`.
    pub entries: Vec<Vec<(Complex64, Complex64)>>,
    /// False when the last shell still carries more than `1e-8` of the peak
    /// magnitude, i.e. `l_max` is too small.
    pub converged: bool,
}

impl DipoleScatterCoefficients {
    pub fn a(&self, l: usize, n: i64) -> Complex64 {
        self.entries[l - 1][(n + l as i64) as usize].0
    }

    pub fn b(&self, l: usize, n: i64) -> Complex64 {
        self.entries[l - 1][(n + l as i64) as usize].1
    }

    /// Largest `|a_ln|` over `n` for shell `l`.
    pub fn shell_max_a(&self, l: usize) -> f64 {
        self.entries[l - 1].iter().map(|e| e.0.norm()).fold(0.0, f64::max)
    }

    pub fn shell_max_b(&self, l: usize) -> f64 {
        self.entries[l - 1].iter().map(|e| e.1.norm()).fold(0.0, f64::max)
    }
}

/// Partial-wave scattering coefficients for dipole excitation:
///
/// ```text
/// a_ln = (-1)^n (i alpha_l k^3 / eps) (2l+1)/(l(l+1)) N^(3)_{l,-n}(k r0) . p
/// b_ln = (-1)^n (i beta_l  k^3 / eps) (2l+1)/(l(l+1)) M^(3)_{l,-n}(k r0) . p
/// ```
///
/// `alpha_l`, `beta_l` are the Lorenz-Mie coefficients of the sphere, `r0` the
/// dipole position relative to the sphere center and `eps` the relative
/// permittivity of the medium. The dot product is bilinear (no conjugation).
pub fn dipole_excitation_coefficients(
    source: &DipoleSource,
    sphere: &Sphere,
    medium: &Medium,
    l_max: usize,
) -> Result<DipoleScatterCoefficients> {
    if l_max < 1 {
        return Err(Error::domain("l_max must be >= 1"));
    }
    let r0 = [
        source.position[0] - sphere.center[0],
        source.position[1] - sphere.center[1],
        source.position[2] - sphere.center[2],
    ];
    let dist = (r0[0] * r0[0] + r0[1] * r0[1] + r0[2] * r0[2]).sqrt();
    if dist <= sphere.radius {
        return Err(Error::domain(format!(
            "dipole at distance {dist} m lies inside the sphere of radius {} m",
            sphere.radius
        )));
    }
    let k = source.omega * medium.refractive_index() / SPEED_OF_LIGHT;
    let eps = medium.relative_permittivity();
    let mie = coefficients_unchecked(k * sphere.radius, sphere.rri, l_max)?;
    let waves = outgoing_waves(l_max, k, r0)?;

    let dot = |v: [Complex64; 3]| -> Complex64 {
        v.iter().zip(&source.moment).map(|(a, b)| a * b).sum()
    };

    let mut entries = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let lf = l as f64;
        let pref = I * k.powi(3) / eps * (2.0 * lf + 1.0) / (lf * (lf + 1.0));
        let row = (-(l as i64)..=l as i64)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let a = sign * pref * mie.a(l) * dot(waves.n(l, -n));
                let b = sign * pref * mie.b(l) * dot(waves.m(l, -n));
                (a, b)
            })
            .collect();
        entries.push(row);
    }
    let mut coeffs = DipoleScatterCoefficients {
        l_max,
        entries,
        converged: true,
    };
    let peak = (1..=l_max)
        .map(|l| coeffs.shell_max_a(l).max(coeffs.shell_max_b(l)))
        .fold(0.0, f64::max);
    let last = coeffs.shell_max_a(l_max).max(coeffs.shell_max_b(l_max));
    coeffs.converged = peak == 0.0 || last <= 1e-8 * peak;
    Ok(coeffs)
}
