//! Transient photocurrent of a resonant-cavity-enhanced photodiode.
//!
//! Illumination is a constant power `P_i` switched on at `t = 0`; other
//! pulse shapes follow by superposition. Unit steps use `u(0) = 1`, so each
//! transit window is closed on the left and open on the right.
//!
//! `N_ph` and `P_ph` are carrier counts driven by the photon flux
//! `P_i/(h nu)`; their unit is not fixed by the model, and the current
//! `q/(x_a + w_n + w_p) (v_n N_ph + v_p P_ph)` inherits that choice.

use serde::{Deserialize, Serialize};

use crate::constants::{ELEMENTARY_CHARGE, PLANCK};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Placement of the `-alpha w` term in the first exponential of the
/// second transit window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentGrouping {
    /// `1 - exp(-alpha x_a + alpha v t - alpha w)`, matching the second exponential.
    #[default]
    Inside,
    /// `1 - exp(-alpha x_a + alpha v t) - alpha w`.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RcePdParams {
    #[serde(default = "default_charge")]
    pub q: f64,
    /// Active (absorbing) region width, m.
    pub x_a: f64,
    /// Drift region widths, m.
    pub w_n: f64,
    pub w_p: f64,
    /// Saturation velocities, m/s.
    pub v_n: f64,
    pub v_p: f64,
    /// Effective absorption coefficient, 1/m.
    pub alpha_eff: f64,
    /// Forward and backward quantum efficiencies.
    pub mu_f: f64,
    pub mu_b: f64,
    /// Optical frequency, Hz.
    pub nu: f64,
    #[serde(default)]
    pub grouping: ExponentGrouping,
}

fn default_charge() -> f64 {
    ELEMENTARY_CHARGE
}

impl RcePdParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("q", self.q),
            ("x_a", self.x_a),
            ("w_n", self.w_n),
            ("w_p", self.w_p),
            ("v_n", self.v_n),
            ("v_p", self.v_p),
            ("alpha_eff", self.alpha_eff),
            ("nu", self.nu),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.mu_f >= 0.0 && self.mu_b >= 0.0 && self.mu_f + self.mu_b <= 1.0) {
            return Err(Error::domain(format!(
                "quantum efficiencies need mu_f, mu_b >= 0 and mu_f + mu_b <= 1, got {} and {}",
                self.mu_f, self.mu_b
            )));
        }
        Ok(())
    }

    /// Times at which the transit windows of each carrier open and close:
    /// `w_n/v_n, (w_n + x_a)/v_n, w_p/v_p, (w_p + x_a)/v_p`.
    pub fn window_boundaries(&self) -> [f64; 4] {
        [
            self.w_n / self.v_n,
            (self.w_n + self.x_a) / self.v_n,
            self.w_p / self.v_p,
            (self.w_p + self.x_a) / self.v_p,
        ]
    }

    /// Time after which the current is identically zero.
    pub fn response_end(&self) -> f64 {
        let b = self.window_boundaries();
        b[1].max(b[3])
    }
}

/// `mu* = mu / (1 - exp(-alpha_eff x_a))` for the forward and backward efficiencies.
pub fn quantum_efficiency_factors(params: &RcePdParams) -> Result<(f64, f64)> {
    let absorbed = -(-params.alpha_eff * params.x_a).exp_m1();
    if !(absorbed > 0.0) {
        return Err(Error::domain(format!(
            "alpha_eff x_a = {} leaves no absorption",
            params.alpha_eff * params.x_a
        )));
    }
    Ok((params.mu_f / absorbed, params.mu_b / absorbed))
}

fn step(t: f64) -> f64 {
    if t >= 0.0 { 1.0 } else { 0.0 }
}

/// Count of one carrier species drifting with velocity `v` across a region of width `w`.
fn carrier_count(t: f64, w: f64, v: f64, params: &RcePdParams, mu: (f64, f64)) -> f64 {
    let (mf, mb) = mu;
    let a = params.alpha_eff;
    let xa = params.x_a;
    let t1 = w / v;
    let t2 = (w + xa) / v;
    let first = step(t) - step(t - t1);
    let second = step(t - t1) - step(t - t2);
    let mut total = 0.0;
    if first != 0.0 {
        total += (mf + mb) * (-(-a * xa).exp_m1()) * first;
    }
    if second != 0.0 {
        let forward = match params.grouping {
            ExponentGrouping::Inside => 1.0 - (-a * xa + a * v * t - a * w).exp(),
            ExponentGrouping::Outside => 1.0 - (-a * xa + a * v * t).exp() - a * w,
        };
        let backward = -(-a * xa).exp() + (a * v * t - a * w).exp();
        total += (mf * forward + mb * backward) * second;
    }
    total
}

/// Counts per unit incident power, `(N_ph, P_ph) / P_i`.
fn unit_counts(t: f64, params: &RcePdParams) -> Result<(f64, f64)> {
    params.validate()?;
    let mu = quantum_efficiency_factors(params)?;
    let per_watt = 1.0 / (PLANCK * params.nu);
    Ok((
        per_watt * carrier_count(t, params.w_n, params.v_n, params, mu),
        per_watt * carrier_count(t, params.w_p, params.v_p, params, mu),
    ))
}

fn check_power(p_i: f64) -> Result<()> {
    if p_i >= 0.0 && p_i.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("incident power must be >= 0, got {p_i}")))
    }
}

/// Photo-generated electron and hole counts `(N_ph, P_ph)` at time `t`.
/// `P_i` multiplies last, so scaling the power scales the result exactly
/// whenever the scale factor is a power of two.
pub fn photo_carrier_concentrations(t: f64, p_i: f64, params: &RcePdParams) -> Result<(f64, f64)> {
    check_power(p_i)?;
    let (n, p) = unit_counts(t, params)?;
    Ok((p_i * n, p_i * p))
}

/// `I_ph(t) = q/(x_a + w_n + w_p) (v_n N_ph + v_p P_ph)`.
pub fn photocurrent(t: f64, p_i: f64, params: &RcePdParams) -> Result<f64> {
    check_power(p_i)?;
    let (n, p) = unit_counts(t, params)?;
    Ok(p_i * (params.q / (params.x_a + params.w_n + params.w_p) * (params.v_n * n + params.v_p * p)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotocurrentTrace {
    pub times: Vec<f64>,
    pub currents: Vec<f64>,
    /// See [`RcePdParams::window_boundaries`].
    pub window_boundaries: [f64; 4],
}

impl PhotocurrentTrace {
    /// Collected charge by the trapezoid rule.
    pub fn charge(&self) -> f64 {
        let mut acc = CompensatedSum::default();
        for i in 1..self.times.len() {
            let dt = self.times[i] - self.times[i - 1];
            acc.add(0.5 * dt * (self.currents[i] + self.currents[i - 1]));
        }
        acc.total()
    }

    /// Optional first-order RC low-pass with time constant `R_tot C_d`.
    /// Not part of the transit model: the circuit elements enter only here.
    /// The input is treated as piecewise constant over each step.
    pub fn rc_lowpass(&self, tau: f64) -> Result<PhotocurrentTrace> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!("RC time constant must be > 0, got {tau}")));
        }
        let mut out = Vec::with_capacity(self.currents.len());
        let mut y = 0.0;
        for i in 0..self.currents.len() {
            if i > 0 {
                let dt = self.times[i] - self.times[i - 1];
                let decay = (-dt / tau).exp();
                y = self.currents[i - 1] + (y - self.currents[i - 1]) * decay;
            }
            out.push(y);
        }
        Ok(PhotocurrentTrace {
            times: self.times.clone(),
            currents: out,
            window_boundaries: self.window_boundaries,
        })
    }
}

/// Photocurrent sampled on a nondecreasing time grid.
pub fn photocurrent_series(t_grid: &[f64], p_i: f64, params: &RcePdParams) -> Result<PhotocurrentTrace> {
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::domain("time grid must be finite and nondecreasing"));
    }
    params.validate()?;
    let currents = t_grid
        .iter()
        .map(|&t| photocurrent(t, p_i, params))
        .collect::<Result<Vec<f64>>>()?;
    Ok(PhotocurrentTrace {
        times: t_grid.to_vec(),
        currents,
        window_boundaries: params.window_boundaries(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(super) fn params() -> RcePdParams {
        RcePdParams {
            q: ELEMENTARY_CHARGE,
            x_a: 0.5e-6,
            w_n: 0.2e-6,
            w_p: 0.3e-6,
            v_n: 1.0e5,
            v_p: 0.8e5,
            alpha_eff: 1.0e6,
            mu_f: 0.5,
            mu_b: 0.3,
            nu: 700e12,
            grouping: ExponentGrouping::Inside,
        }
    }

    #[test]
    fn efficiency_factors() {
        let mut p = params();
        p.alpha_eff = 2f64.ln() / p.x_a;
        let (f, b) = quantum_efficiency_factors(&p).unwrap();
        assert!((f - 1.0).abs() < 1e-14 && (b - 0.6).abs() < 1e-14);

        p.alpha_eff = 1e9;
        let (f, _) = quantum_efficiency_factors(&p).unwrap();
        assert_eq!(f, p.mu_f);

        p.mu_f = 0.0;
        assert_eq!(quantum_efficiency_factors(&p).unwrap().0, 0.0);

        p.alpha_eff = 1e-320;
        assert!(quantum_efficiency_factors(&p).is_err());
    }

    #[test]
    fn validation() {
        let mut p = params();
        p.mu_f = 0.8;
        assert!(p.validate().is_err());
        let mut p = params();
        p.v_n = 0.0;
        assert!(photocurrent(1e-12, 1e-6, &p).is_err());
        assert!(photocurrent(1e-12, -1.0, &params()).is_err());
    }

    #[test]
    fn causal_and_linear() {
        let p = params();
        for t in [-1e-9, -1e-15, -f64::MIN_POSITIVE] {
            assert_eq!(photo_carrier_concentrations(t, 1e-6, &p).unwrap(), (0.0, 0.0));
            assert_eq!(photocurrent(t, 1e-6, &p).unwrap(), 0.0);
        }
        for t in [0.0, 1e-12, 3e-12, 5e-12, 9e-12] {
            assert_eq!(photocurrent(t, 0.0, &p).unwrap(), 0.0);
            let one = photocurrent(t, 1e-6, &p).unwrap();
            let two = photocurrent(t, 2e-6, &p).unwrap();
            assert_eq!(two, 2.0 * one);
        }
    }

    #[test]
    fn plateau_value() {
        let p = params();
        let p_i = 1e-6;
        let (mf, mb) = quantum_efficiency_factors(&p).unwrap();
        let absorbed = 1.0 - (-p.alpha_eff * p.x_a).exp();
        let plateau = p.q / (p.x_a + p.w_n + p.w_p) * (p_i / (PLANCK * p.nu))
            * (mf + mb)
            * absorbed
            * (p.v_n + p.v_p);
        let end = (p.w_n / p.v_n).min(p.w_p / p.v_p);
        for f in [0.0, 0.1, 0.5, 0.99] {
            let i = photocurrent(f * end, p_i, &p).unwrap();
            assert!((i / plateau - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn second_window_is_continuous_at_its_start() {
        let p = params();
        let t1 = p.w_n / p.v_n;
        let (before, _) = photo_carrier_concentrations(t1 * (1.0 - 1e-12), 1e-6, &p).unwrap();
        let (after, _) = photo_carrier_concentrations(t1, 1e-6, &p).unwrap();
        assert!((before - after).abs() < 1e-9 * before);
    }

    #[test]
    fn finite_support() {
        for grouping in [ExponentGrouping::Inside, ExponentGrouping::Outside] {
            let p = RcePdParams { grouping, ..params() };
            let end = p.response_end();
            for f in [1.0, 1.0001, 2.0, 1e3] {
                assert_eq!(photocurrent(f * end, 1e-6, &p).unwrap(), 0.0);
            }
            assert!(photocurrent(0.999 * end, 1e-6, &p).unwrap() != 0.0);
        }
    }

    #[test]
    fn groupings_differ_only_in_second_window() {
        let inside = params();
        let outside = RcePdParams { grouping: ExponentGrouping::Outside, ..params() };
        let t = 0.5 * inside.w_n / inside.v_n;
        assert_eq!(photocurrent(t, 1e-6, &inside).unwrap(), photocurrent(t, 1e-6, &outside).unwrap());
        let t = 0.5 * (inside.window_boundaries()[0] + inside.window_boundaries()[1]);
        assert!(photocurrent(t, 1e-6, &inside).unwrap() != photocurrent(t, 1e-6, &outside).unwrap());
    }

    #[test]
    fn series_matches_pointwise() {
        let p = params();
        let grid = crate::pattern::linspace(-1e-12, 1.2 * p.response_end(), 101);
        let trace = photocurrent_series(&grid, 1e-6, &p).unwrap();
        for (t, i) in trace.times.iter().zip(&trace.currents) {
            assert_eq!(*i, photocurrent(*t, 1e-6, &p).unwrap());
        }
        assert_eq!(trace.window_boundaries, p.window_boundaries());
        assert!(photocurrent_series(&[], 1e-6, &p).unwrap().times.is_empty());
        assert!(photocurrent_series(&[1.0, 0.0], 1e-6, &p).is_err());
    }

    #[test]
    fn charge_of_symmetric_device() {
        let p = RcePdParams {
            w_p: 0.2e-6,
            v_p: 1.0e5,
            ..params()
        };
        let p_i = 1e-6;
        let (mf, mb) = quantum_efficiency_factors(&p).unwrap();
        let (a, xa, w, v) = (p.alpha_eff, p.x_a, p.w_n, p.v_n);
        // integral of the piecewise count over both windows, one carrier
        let ea = (a * xa).exp();
        let window1 = (mf + mb) * (1.0 - 1.0 / ea) * (w / v);
        let window2 = (mf * (xa - (ea - 1.0) / (a * ea)) + mb * ((ea - 1.0) / a - xa / ea)) / v;
        let flux = p_i / (PLANCK * p.nu);
        let expected = 2.0 * p.q / (xa + p.w_n + p.w_p) * v * flux * (window1 + window2);

        let grid = crate::pattern::linspace(0.0, 1.1 * p.response_end(), 4_000_001);
        let trace = photocurrent_series(&grid, p_i, &p).unwrap();
        let q = trace.charge();
        assert!((q / expected - 1.0).abs() < 1e-6, "{q} vs {expected}");
    }

    #[test]
    fn rc_filter_settles_to_input() {
        let p = params();
        let end = p.window_boundaries()[0].min(p.window_boundaries()[2]);
        let grid = crate::pattern::linspace(0.0, 0.9 * end, 2001);
        let trace = photocurrent_series(&grid, 1e-6, &p).unwrap();
        let filtered = trace.rc_lowpass(end / 200.0).unwrap();
        let last = *trace.currents.last().unwrap();
        assert!((filtered.currents.last().unwrap() / last - 1.0).abs() < 1e-12);
        assert_eq!(filtered.currents[0], 0.0);
        assert!(trace.rc_lowpass(0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn plateau_nonnegative(
                mu_f in 0.0f64..0.5, mu_b in 0.0f64..0.5, alpha in 1e4f64..1e8,
                x_a in 1e-8f64..1e-5, frac in 0.0f64..1.0,
            ) {
                let p = RcePdParams { mu_f, mu_b, alpha_eff: alpha, x_a, ..params() };
                let t = frac * (p.w_n / p.v_n).min(p.w_p / p.v_p);
                prop_assert!(photocurrent(t, 1e-6, &p).unwrap() >= 0.0);
            }

            #[test]
            fn linear_in_power(a in 0.0f64..1e3, t in -1e-11f64..2e-11) {
                let p = params();
                let base = photocurrent(t, 1e-6, &p).unwrap();
                let scaled = photocurrent(t, a * 1e-6, &p).unwrap();
                prop_assert!((scaled - a * base).abs() <= 4.0 * f64::EPSILON * scaled.abs());
                let (n1, h1) = photo_carrier_concentrations(t, 1e-6, &p).unwrap();
                let (n2, h2) = photo_carrier_concentrations(t, 8e-6, &p).unwrap();
                prop_assert_eq!((n2, h2), (8.0 * n1, 8.0 * h1));
            }
        }
    }
}
