//! Surface plasmon polaritons at a planar metal/dielectric interface.
//!
//! Region 1 is the metal (`z < 0`), region 2 the dielectric (`z >= 0`), and
//! the mode propagates along `+x`.
//!
//! The TM field expressions use the engineering convention: complex
//! amplitudes multiply `exp(j omega t)` and `j` is the imaginary unit. The
//! physical field is `Re{F exp(j omega t)}`. The scattering modules use
//! `exp(-i omega t)`; a phasor moves between the two by complex conjugation,
//! `F_scattering = conj(F_engineering)`, see [`TmFields::conjugate`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::{Error, Result};

const J: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrudeMetal {
    plasma_frequency: f64,
    damping: f64,
    eps_inf: f64,
}

impl DrudeMetal {
    /// Free-electron metal with `eps_inf = 1`.
    pub fn new(plasma_frequency: f64, damping: f64) -> Result<Self> {
        Self::with_background(plasma_frequency, damping, 1.0)
    }

    pub fn with_background(plasma_frequency: f64, damping: f64, eps_inf: f64) -> Result<Self> {
        if !(plasma_frequency > 0.0 && plasma_frequency.is_finite()) {
            return Err(Error::domain(format!("plasma frequency must be > 0, got {plasma_frequency}")));
        }
        if !(damping >= 0.0 && damping.is_finite()) {
            return Err(Error::domain(format!("damping must be >= 0, got {damping}")));
        }
        if !eps_inf.is_finite() {
            return Err(Error::domain("background permittivity must be finite"));
        }
        Ok(DrudeMetal {
            plasma_frequency,
            damping,
            eps_inf,
        })
    }

    pub fn plasma_frequency(&self) -> f64 {
        self.plasma_frequency
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }
}

/// `eps(omega) = eps_inf - omega_p^2 / (omega^2 + i gamma omega)`.
pub fn drude_permittivity(metal: &DrudeMetal, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::domain(format!("omega must be > 0, got {omega}")));
    }
    let wp2 = metal.plasma_frequency * metal.plasma_frequency;
    Ok(metal.eps_inf - wp2 / Complex64::new(omega * omega, metal.damping * omega))
}

/// True when the metal behaves as a conductor, `Re(eps) < 0`.
pub fn metallic_condition_check(eps1: Complex64) -> bool {
    eps1.re < 0.0
}

/// `omega_spp = omega_p / sqrt(1 + eps2)`.
pub fn spp_frequency(omega_p: f64, eps2: f64) -> Result<f64> {
    if !(eps2 > 0.0) {
        return Err(Error::domain(format!("dielectric permittivity must be > 0, got {eps2}")));
    }
    Ok(omega_p / (1.0 + eps2).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    metal: DrudeMetal,
    eps2: f64,
}

impl Interface {
    pub fn new(metal: DrudeMetal, eps2: f64) -> Result<Self> {
        if !(eps2 > 0.0 && eps2.is_finite()) {
            return Err(Error::domain(format!("dielectric permittivity must be > 0, got {eps2}")));
        }
        Ok(Interface { metal, eps2 })
    }

    pub fn metal(&self) -> &DrudeMetal {
        &self.metal
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    /// Surface-plasmon frequency of a free-electron metal against this dielectric.
    pub fn spp_frequency(&self) -> Result<f64> {
        spp_frequency(self.metal.plasma_frequency, self.eps2)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionForm {
    /// `(omega/c) sqrt(eps1 eps2 / (eps1 + eps2))`.
    #[default]
    Standard,
    /// `(omega/c) sqrt(eps1 eps2 / eps1 + eps1)`, which reduces to
    /// `(omega/c) sqrt(eps1 + eps2)` and has no surface-plasmon pole. Kept
    /// only for comparison.
    AsPrinted,
}

fn decaying_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 { -s } else { s }
}

/// SPP propagation constant at the running frequency `omega`, on the square
/// root branch with `Im(k) >= 0`.
pub fn spp_wavevector(interface: &Interface, omega: f64, form: DispersionForm) -> Result<Complex64> {
    let eps1 = drude_permittivity(&interface.metal, omega)?;
    let eps2 = interface.eps2;
    let k0 = omega / SPEED_OF_LIGHT;
    let radicand = match form {
        DispersionForm::Standard => {
            let denom = eps1 + eps2;
            if denom == Complex64::new(0.0, 0.0) {
                return Err(Error::numerical(format!(
                    "surface-plasmon pole: eps1 + eps2 = 0 at omega = {omega}"
                )));
            }
            eps1 * eps2 / denom
        }
        DispersionForm::AsPrinted => eps1 * eps2 / eps1 + eps1,
    };
    Ok(k0 * decaying_sqrt(radicand))
}

/// A bound TM mode: `H_y = A_i exp(j beta x) exp(-k_i |z|)` in each region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmModeField {
    a1: Complex64,
    a2: Complex64,
    beta: Complex64,
    k1: Complex64,
    k2: Complex64,
    omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmFields {
    pub e_x: Complex64,
    pub e_z: Complex64,
    pub h_y: Complex64,
}

impl TmFields {
    /// Phasors for the `exp(-i omega t)` convention.
    pub fn conjugate(&self) -> TmFields {
        TmFields {
            e_x: self.e_x.conj(),
            e_z: self.e_z.conj(),
            h_y: self.h_y.conj(),
        }
    }
}

impl TmModeField {
    /// Mode parameters supplied directly. Tangential `H` continuity needs
    /// `A1 = A2`, and confinement needs `Re(k_i) > 0`.
    pub fn new(
        a1: Complex64,
        a2: Complex64,
        beta: Complex64,
        k1: Complex64,
        k2: Complex64,
        omega: f64,
    ) -> Result<Self> {
        if a1 != a2 {
            return Err(Error::domain("H_y continuity requires A1 = A2"));
        }
        if !(k1.re > 0.0 && k2.re > 0.0) {
            return Err(Error::domain(format!(
                "mode is not confined: k1 = {k1}, k2 = {k2}"
            )));
        }
        if !(omega > 0.0) {
            return Err(Error::domain("omega must be > 0"));
        }
        Ok(TmModeField { a1, a2, beta, k1, k2, omega })
    }

    /// Bound mode of `interface` at `omega`, with `beta` from the standard
    /// dispersion relation and `k_i^2 = beta^2 - k0^2 eps_i` written as
    /// `k1 = -eps1 k0 / s`, `k2 = eps2 k0 / s`, `s = sqrt(-(eps1 + eps2))`.
    pub fn solve(interface: &Interface, omega: f64, amplitude: Complex64) -> Result<Self> {
        let eps1 = drude_permittivity(&interface.metal, omega)?;
        let eps2 = interface.eps2;
        if !metallic_condition_check(eps1) {
            return Err(Error::domain(format!(
                "Re(eps1) = {} is not metallic at omega = {omega}",
                eps1.re
            )));
        }
        let beta = spp_wavevector(interface, omega, DispersionForm::Standard)?;
        let k0 = omega / SPEED_OF_LIGHT;
        let s = (-(eps1 + eps2)).sqrt();
        let k1 = -eps1 * k0 / s;
        let k2 = eps2 * k0 / s;
        Self::new(amplitude, amplitude, beta, k1, k2, omega)
    }

    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        (self.a1, self.a2)
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn decay_constants(&self) -> (Complex64, Complex64) {
        (self.k1, self.k2)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// 1/e field penetration depths `1/Re(k_i)` into metal and dielectric.
    pub fn penetration_depths(&self) -> (f64, f64) {
        (1.0 / self.k1.re, 1.0 / self.k2.re)
    }

    /// Propagation length `1/(2 Im beta)` of the mode intensity.
    pub fn propagation_length(&self) -> f64 {
        1.0 / (2.0 * self.beta.im)
    }

    /// Fields at `(x, z)`, region chosen by the sign of `z`.
    pub fn fields(&self, interface: &Interface, x: f64, z: f64) -> Result<TmFields> {
        let region = if z < 0.0 { 1 } else { 2 };
        self.fields_in_region(interface, region, x, z)
    }

    /// Fields of region 1 or 2 evaluated at `(x, z)` whatever the sign of `z`;
    /// used for one-sided limits at the interface.
    ///
    /// `E_x = (-1)^i j A_i k_i/(omega eps0 eps_i) e^{j beta x} e^{(-1)^{i+1} k_i z}`,
    /// `E_z = -A_i beta/(omega eps0 eps_i) e^{j beta x} e^{(-1)^{i+1} k_i z}`,
    /// `H_y = A_i e^{j beta x} e^{(-1)^{i+1} k_i z}`.
    pub fn fields_in_region(
        &self,
        interface: &Interface,
        region: u8,
        x: f64,
        z: f64,
    ) -> Result<TmFields> {
        let eps1 = drude_permittivity(&interface.metal, self.omega)?;
        let (a, k, eps, sign) = match region {
            1 => (self.a1, self.k1, eps1, -1.0),
            2 => (self.a2, self.k2, Complex64::new(interface.eps2, 0.0), 1.0),
            _ => return Err(Error::domain(format!("region must be 1 or 2, got {region}"))),
        };
        // sign = (-1)^i; the exponent (-1)^{i+1} k_i z decays away from z = 0 in both regions
        let h_y = a * (J * self.beta * x).exp() * (-sign * k * z).exp();
        let scale = 1.0 / (self.omega * VACUUM_PERMITTIVITY * eps);
        Ok(TmFields {
            e_x: sign * J * k * scale * h_y,
            e_z: -self.beta * scale * h_y,
            h_y,
        })
    }
}

/// Free-space wavelength of angular frequency `omega`.
pub fn vacuum_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

#[cfg(test)]
mod tests {
    use super::*;

    const WP: f64 = 1.37e16;

    fn lossless(eps2: f64) -> Interface {
        Interface::new(DrudeMetal::new(WP, 0.0).unwrap(), eps2).unwrap()
    }

    fn lossy(eps2: f64) -> Interface {
        Interface::new(DrudeMetal::new(WP, 1e14).unwrap(), eps2).unwrap()
    }

    #[test]
    fn drude_values() {
        let m = DrudeMetal::new(WP, 0.0).unwrap();
        assert!(drude_permittivity(&m, WP).unwrap().norm() < 1e-15);
        let e = drude_permittivity(&m, WP / 2f64.sqrt()).unwrap();
        assert!((e - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        let damped = DrudeMetal::new(WP, 1e14).unwrap();
        for f in [0.01, 0.3, 1.0, 5.0] {
            assert!(drude_permittivity(&damped, f * WP).unwrap().im > 0.0);
        }
        assert!(drude_permittivity(&m, 0.0).is_err());
        assert!(DrudeMetal::new(-1.0, 0.0).is_err());
        assert!(DrudeMetal::new(1.0, -1.0).is_err());
    }

    #[test]
    fn metallic_condition() {
        assert!(metallic_condition_check(Complex64::new(-1.0, 0.1)));
        assert!(!metallic_condition_check(Complex64::new(0.5, 0.0)));
        let m = DrudeMetal::new(WP, 1e14).unwrap();
        // 1 - 1/0.09 is about -10.1
        assert!(metallic_condition_check(drude_permittivity(&m, 0.3 * WP).unwrap()));
    }

    #[test]
    fn surface_plasmon_frequency() {
        assert_eq!(spp_frequency(WP, 1.0).unwrap(), WP / 2f64.sqrt());
        assert_eq!(spp_frequency(WP, 3.0).unwrap(), WP / 2.0);
        let w: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&e| spp_frequency(WP, e).unwrap())
            .collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]));
        assert!(spp_frequency(WP, 0.0).is_err());
    }

    #[test]
    fn pole_matches_surface_plasmon_frequency() {
        for eps2 in [1.0, 2.25, 4.0] {
            let metal = DrudeMetal::new(WP, 0.0).unwrap();
            // bisection on Re(eps1) + eps2 = 0
            let (mut lo, mut hi) = (0.1 * WP, WP);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if drude_permittivity(&metal, mid).unwrap().re + eps2 < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let expected = spp_frequency(WP, eps2).unwrap();
            assert!((lo / expected - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn wavevector_diverges_near_pole() {
        let iface = lossless(1.0);
        let wspp = iface.spp_frequency().unwrap();
        let a = spp_wavevector(&iface, 0.99 * wspp, DispersionForm::Standard).unwrap();
        let b = spp_wavevector(&iface, 0.999 * wspp, DispersionForm::Standard).unwrap();
        assert!(b.norm() > 3.0 * a.norm());
    }

    #[test]
    fn wavevector_approaches_light_line_from_above() {
        let iface = lossless(1.0);
        let omega = 0.05 * WP;
        let k = spp_wavevector(&iface, omega, DispersionForm::Standard).unwrap();
        let light = omega / SPEED_OF_LIGHT;
        assert!(k.re >= light);
        assert!(k.re / light - 1.0 < 0.01);
    }

    #[test]
    fn as_printed_form_reduces_to_sum() {
        // eps1 = -2 at omega = wp/sqrt(3)
        let iface = lossless(1.0);
        let omega = WP / 3f64.sqrt();
        let eps1 = drude_permittivity(iface.metal(), omega).unwrap();
        assert!((eps1.re + 2.0).abs() < 1e-14);
        let k = spp_wavevector(&iface, omega, DispersionForm::AsPrinted).unwrap();
        let expected = Complex64::new(0.0, omega / SPEED_OF_LIGHT);
        assert!((k - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn exact_pole_is_reported() {
        // eps_inf = 0 and gamma = 0 give eps1 = -wp^2/omega^2 = -1 exactly at omega = wp
        let metal = DrudeMetal::with_background(WP, 0.0, 0.0).unwrap();
        let iface = Interface::new(metal, 1.0).unwrap();
        assert!(spp_wavevector(&iface, WP, DispersionForm::Standard).is_err());
    }

    #[test]
    fn solved_mode_is_continuous_at_the_interface() {
        for iface in [lossless(1.0), lossy(1.0), lossy(2.25)] {
            let wspp = iface.spp_frequency().unwrap();
            for f in [0.2, 0.5, 0.9] {
                let mode = TmModeField::solve(&iface, f * wspp, Complex64::new(1.0, 0.5)).unwrap();
                let eps1 = drude_permittivity(iface.metal(), f * wspp).unwrap();
                let x = 3.7e-7;
                let below = mode.fields_in_region(&iface, 1, x, 0.0).unwrap();
                let above = mode.fields_in_region(&iface, 2, x, 0.0).unwrap();
                assert_eq!(below.h_y, above.h_y);
                let ex = (below.e_x - above.e_x).norm() / above.e_x.norm();
                assert!(ex < 1e-12, "E_x residual {ex}");
                let dz = (eps1 * below.e_z - iface.eps2() * above.e_z).norm()
                    / (iface.eps2() * above.e_z).norm();
                assert!(dz < 1e-12, "D_z residual {dz}");
                let (k1, k2) = mode.decay_constants();
                let ratio = k2 / k1 + iface.eps2() / eps1;
                assert!(ratio.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn solved_mode_satisfies_wave_equation() {
        let iface = lossy(1.0);
        let omega = 0.6 * iface.spp_frequency().unwrap();
        let mode = TmModeField::solve(&iface, omega, Complex64::new(1.0, 0.0)).unwrap();
        let eps1 = drude_permittivity(iface.metal(), omega).unwrap();
        let k0 = omega / SPEED_OF_LIGHT;
        let (k1, k2) = mode.decay_constants();
        let b2 = mode.beta() * mode.beta();
        assert!((k1 * k1 - (b2 - k0 * k0 * eps1)).norm() < 1e-10 * b2.norm());
        assert!((k2 * k2 - (b2 - k0 * k0 * iface.eps2())).norm() < 1e-10 * b2.norm());
    }

    #[test]
    fn fields_decay_exponentially() {
        let iface = lossless(1.0);
        let omega = 0.7 * iface.spp_frequency().unwrap();
        let mode = TmModeField::solve(&iface, omega, Complex64::new(1.0, 0.0)).unwrap();
        let (k1, k2) = mode.decay_constants();
        let z0 = 20e-9;
        for (z, k) in [(z0, k2), (-z0, k1)] {
            let one = mode.fields(&iface, 0.0, z).unwrap().h_y.norm();
            let two = mode.fields(&iface, 0.0, 2.0 * z).unwrap().h_y.norm();
            assert!((two / one - (-k.re * z0).exp()).abs() < 1e-12);
        }
        for sign in [-1.0, 1.0] {
            let mut last = f64::INFINITY;
            for i in 0..50 {
                let f = mode.fields(&iface, 1e-7, sign * i as f64 * 5e-9).unwrap();
                let mag = f.e_x.norm() + f.e_z.norm() + f.h_y.norm();
                assert!(mag < last);
                last = mag;
            }
        }
    }

    #[test]
    fn unbound_modes_are_rejected() {
        let iface = lossless(1.0);
        // above omega_spp and below omega_p the metal is metallic but eps1 + eps2 > 0
        let omega = 0.9 * WP;
        assert!(TmModeField::solve(&iface, omega, Complex64::new(1.0, 0.0)).is_err());
        assert!(TmModeField::solve(&iface, 1.1 * WP, Complex64::new(1.0, 0.0)).is_err());
        let one = Complex64::new(1.0, 0.0);
        assert!(TmModeField::new(one, 2.0 * one, one, one, one, 1.0).is_err());
    }

    #[test]
    fn conjugation_preserves_the_physical_field() {
        let iface = lossy(1.0);
        let omega = 0.5 * iface.spp_frequency().unwrap();
        let mode = TmModeField::solve(&iface, omega, Complex64::new(0.3, -0.8)).unwrap();
        let eng = mode.fields(&iface, 2e-7, 1e-8).unwrap();
        let sci = eng.conjugate();
        for t in [0.0, 1.3e-16, 4.4e-16] {
            let phase_j = (J * omega * t).exp();
            let phase_i = (-J * omega * t).exp();
            for (a, b) in [(eng.e_x, sci.e_x), (eng.e_z, sci.e_z), (eng.h_y, sci.h_y)] {
                let (ra, rb) = ((a * phase_j).re, (b * phase_i).re);
                assert!((ra - rb).abs() <= 1e-12 * a.norm());
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bound_below_light_line(f in 0.001f64..0.95, eps2 in 1.0f64..4.0) {
                let iface = lossless(eps2);
                let omega = f * iface.spp_frequency().unwrap();
                let k = spp_wavevector(&iface, omega, DispersionForm::Standard).unwrap();
                prop_assert!(k.re >= omega / SPEED_OF_LIGHT * eps2.sqrt());
            }

            #[test]
            fn lossy_metal_attenuates(f in 0.001f64..0.95, eps2 in 1.0f64..4.0) {
                let iface = lossy(eps2);
                let omega = f * iface.spp_frequency().unwrap();
                let k = spp_wavevector(&iface, omega, DispersionForm::Standard).unwrap();
                prop_assert!(k.im > 0.0);
            }
        }
    }
}
