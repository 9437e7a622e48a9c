use std::f64::consts::PI;
use std::time::Instant;

use nanoradar::antenna::{
    dipole_normalized_pattern, directivity_pattern, hansen_woodyard_spacing, integrate_radiated_power,
    uniform_array_pattern, ArraySpec, RadiationPattern,
};
use nanoradar::medium::Medium;
use nanoradar::mie::{mie_intensity_pattern, Sphere};
use nanoradar::photodetector::{photocurrent_series, ExponentGrouping, RcePdParams};
use nanoradar::radar::{
    echo_pattern_with_model, run_pipeline, select_model, Illumination, NoiseModel, RadarScene, Target,
};
use nanoradar::rgd::{rgd_intensity_pattern, HomogeneousRegion};
use nanoradar::spp::{spp_wavevector, DispersionForm, DrudeMetal, Interface};
use nanoradar::{constants::ELEMENTARY_CHARGE, Complex64, Polarization, ScatteringModel, ScatteringPattern};
use serde::Serialize;

use crate::config::{parse_config, Format, GridConfig, RunConfig};
use crate::error::CliError;
use crate::output::{csv, emit, num, structured};
use crate::{
    AntennaArgs, CompareArgs, Dispersion, Element, Fig4Args, Grouping, OutputArgs, PdArgs, Pol, RadarArgs,
    ScatterArgs, SppArgs,
};

const DEFAULT_GRID: GridConfig = GridConfig {
    start_deg: 0.0,
    stop_deg: 180.0,
    count: 181,
};

fn load_config(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text)
}

fn write(output: &OutputArgs, default: Format, csv_text: impl FnOnce() -> String, doc: impl FnOnce() -> String) -> Result<(), CliError> {
    let text = match output.format.unwrap_or(default) {
        Format::Csv => csv_text(),
        Format::Structured => doc(),
    };
    emit(&text, output.out.as_deref())
}

impl From<Pol> for Polarization {
    fn from(p: Pol) -> Self {
        match p {
            Pol::Unpolarized => Polarization::Unpolarized,
            Pol::Parallel => Polarization::Parallel,
            Pol::Perpendicular => Polarization::Perpendicular,
        }
    }
}

#[derive(Serialize)]
struct PatternDocument<'a> {
    model: ScatteringModel,
    wavelength_m: f64,
    medium_index: f64,
    polarization: Polarization,
    warnings: &'a [String],
    angle_deg: Vec<f64>,
    intensity: &'a [f64],
}

fn pattern_csv(p: &ScatteringPattern) -> String {
    csv(
        &["angle_deg", "intensity"],
        p.thetas
            .iter()
            .zip(&p.intensities)
            .map(|(t, i)| vec![num(t.to_degrees()), num(*i)]),
    )
}

fn pattern_document(p: &ScatteringPattern) -> String {
    structured(&PatternDocument {
        model: p.model,
        wavelength_m: p.wavelength_vacuum,
        medium_index: p.medium_index,
        polarization: p.polarization,
        warnings: &p.warnings,
        angle_deg: p.thetas.iter().map(|t| t.to_degrees()).collect(),
        intensity: &p.intensities,
    })
}

/// Scene, grid and polarization from a config file or from the flags.
fn scatter_inputs(a: &ScatterArgs) -> Result<(Target, Medium, f64, Vec<f64>, Polarization), CliError> {
    if let Some(path) = &a.config {
        let c = load_config(path)?;
        let grid = a.grid.unwrap_or(c.grid).radians();
        let target = c.scene.particle.target()?;
        return Ok((target, c.scene.medium()?, c.scene.wavelength(), grid, c.scene.polarization));
    }
    let rri = Complex64::new(a.rri, a.rri_imag);
    let target = match &a.extents_nm {
        Some(e) => {
            let [ex, ey, ez] = e[..] else {
                return Err(CliError::validation(format!("--extents-nm needs 3 values, got {}", e.len())));
            };
            Target::Region(HomogeneousRegion::cuboid([ex / 1e9, ey / 1e9, ez / 1e9], rri)?)
        }
        None => Target::Sphere(Sphere::new(a.radius_nm / 1e9, rri)?),
    };
    let grid = a.grid.unwrap_or(DEFAULT_GRID).radians();
    Ok((target, Medium::new(a.medium_index)?, a.wavelength_nm / 1e9, grid, a.polarization.into()))
}

pub fn mie(a: &ScatterArgs) -> Result<(), CliError> {
    let (target, medium, wl, grid, pol) = scatter_inputs(a)?;
    let Target::Sphere(sphere) = target else {
        return Err(CliError::validation("mie needs a spherical particle"));
    };
    let p = mie_intensity_pattern(&sphere, medium.refractive_index(), wl, &grid, pol)?;
    write(&a.output, Format::Csv, || pattern_csv(&p), || pattern_document(&p))
}

pub fn rgd(a: &ScatterArgs) -> Result<(), CliError> {
    let (target, medium, wl, grid, pol) = scatter_inputs(a)?;
    let region = match target {
        Target::Sphere(s) => HomogeneousRegion::sphere(s.radius, s.rri)?,
        Target::Region(r) => r,
    };
    let p = rgd_intensity_pattern(&region, medium.refractive_index(), wl, &grid, pol)?;
    for w in &p.warnings {
        eprintln!("warning: {w}");
    }
    write(&a.output, Format::Csv, || pattern_csv(&p), || pattern_document(&p))
}

#[derive(Serialize)]
struct RadarDocument<'a> {
    scenario: &'a str,
    rationale: &'a str,
    #[serde(flatten)]
    detection: nanoradar::radar::DetectionDocument,
}

pub fn radar(a: &RadarArgs) -> Result<(), CliError> {
    let mut c = load_config(&a.config)?;
    if let (Some(seed), NoiseModel::Gaussian { sigma, .. }) = (a.seed, c.noise) {
        c.noise = NoiseModel::Gaussian { sigma, seed };
    }
    let grid = a.grid.unwrap_or(c.grid).radians();
    let scene = c.scene.build()?;
    let out = run_pipeline(&scene, &grid, &c.noise, &c.threshold, c.look_direction())?;
    let csv_text = || pattern_csv(&out.pattern);
    let doc_text = || {
        structured(&RadarDocument {
            scenario: &c.scenario,
            rationale: &out.selection.rationale,
            detection: out.document(),
        })
    };
    for spec in &c.outputs {
        let text = match spec.format {
            Format::Csv => csv_text(),
            Format::Structured => doc_text(),
        };
        emit(&text, Some(&spec.path))?;
    }
    if a.output.out.is_some() || a.output.format.is_some() || c.outputs.is_empty() {
        write(&a.output, Format::Structured, csv_text, doc_text)?;
    }
    Ok(())
}

pub fn spp(a: &SppArgs) -> Result<(), CliError> {
    let metal = DrudeMetal::with_background(a.plasma_frequency, a.damping, a.eps_inf)?;
    let iface = Interface::new(metal, a.eps2)?;
    if a.count < 2 || !(0.0 < a.start_frac && a.start_frac < a.stop_frac) {
        return Err(CliError::validation("need count >= 2 and 0 < start-frac < stop-frac"));
    }
    let form = match a.form {
        Dispersion::Standard => DispersionForm::Standard,
        Dispersion::AsPrinted => DispersionForm::AsPrinted,
    };
    let wspp = iface.spp_frequency()?;
    let omegas = nanoradar::pattern::linspace(a.start_frac * wspp, a.stop_frac * wspp, a.count);
    let ks = omegas
        .iter()
        .map(|&w| spp_wavevector(&iface, w, form))
        .collect::<nanoradar::Result<Vec<Complex64>>>()?;
    #[derive(Serialize)]
    struct Doc {
        omega_spp: f64,
        omega: Vec<f64>,
        re_k: Vec<f64>,
        im_k: Vec<f64>,
    }
    write(
        &a.output,
        Format::Csv,
        || {
            csv(
                &["omega", "re_k", "im_k"],
                omegas.iter().zip(&ks).map(|(w, k)| vec![num(*w), num(k.re), num(k.im)]),
            )
        },
        || {
            structured(&Doc {
                omega_spp: wspp,
                omega: omegas.clone(),
                re_k: ks.iter().map(|k| k.re).collect(),
                im_k: ks.iter().map(|k| k.im).collect(),
            })
        },
    )
}

pub fn antenna(a: &AntennaArgs) -> Result<(), CliError> {
    let wl = a.wavelength_nm / 1e9;
    let spacing = if a.hansen_woodyard {
        hansen_woodyard_spacing(a.elements, wl)?
    } else {
        a.spacing_wavelengths * wl
    };
    let spec = match a.phase_rad {
        Some(beta) => ArraySpec::new(a.elements, spacing, beta, wl)?,
        None => ArraySpec::end_fire(a.elements, spacing, wl)?,
    };
    let element = match a.element {
        Element::Isotropic => RadiationPattern::isotropic(),
        Element::Dipole => dipole_normalized_pattern(),
    };
    let pattern = uniform_array_pattern(&spec, &element);
    let grid = a.grid.unwrap_or(DEFAULT_GRID).radians();
    let values = grid
        .iter()
        .map(|&t| pattern.sample(t, 0.0))
        .collect::<nanoradar::Result<Vec<f64>>>()?;
    let p_rad = integrate_radiated_power(&pattern)?;
    let directivity = directivity_pattern(&pattern)?;
    let d = grid
        .iter()
        .map(|&t| directivity.sample(t, 0.0))
        .collect::<nanoradar::Result<Vec<f64>>>()?;
    #[derive(Serialize)]
    struct Doc {
        elements: usize,
        spacing_m: f64,
        progressive_phase_rad: f64,
        radiated_power: f64,
        peak_directivity: f64,
        angle_deg: Vec<f64>,
        intensity: Vec<f64>,
        directivity: Vec<f64>,
    }
    write(
        &a.output,
        Format::Csv,
        || {
            csv(
                &["angle_deg", "intensity"],
                grid.iter().zip(&values).map(|(t, v)| vec![num(t.to_degrees()), num(*v)]),
            )
        },
        || {
            structured(&Doc {
                elements: spec.element_count(),
                spacing_m: spec.spacing(),
                progressive_phase_rad: spec.progressive_phase(),
                radiated_power: p_rad,
                peak_directivity: d.iter().copied().fold(0.0, f64::max),
                angle_deg: grid.iter().map(|t| t.to_degrees()).collect(),
                intensity: values.clone(),
                directivity: d.clone(),
            })
        },
    )
}

pub fn pd(a: &PdArgs) -> Result<(), CliError> {
    let params = RcePdParams {
        q: ELEMENTARY_CHARGE,
        x_a: a.x_a,
        w_n: a.w_n,
        w_p: a.w_p,
        v_n: a.v_n,
        v_p: a.v_p,
        alpha_eff: a.alpha_eff,
        mu_f: a.mu_f,
        mu_b: a.mu_b,
        nu: a.nu,
        grouping: match a.grouping {
            Grouping::Inside => ExponentGrouping::Inside,
            Grouping::Outside => ExponentGrouping::Outside,
        },
    };
    params.validate()?;
    if a.count < 2 {
        return Err(CliError::validation("count must be >= 2"));
    }
    let stop = a.t_stop.unwrap_or(1.2 * params.response_end());
    if !(stop > 0.0) {
        return Err(CliError::validation("t-stop must be > 0"));
    }
    let times = nanoradar::pattern::linspace(0.0, stop, a.count);
    let mut trace = photocurrent_series(&times, a.power_w, &params)?;
    if let Some(tau) = a.rc_tau {
        trace = trace.rc_lowpass(tau)?;
    }
    write(
        &a.output,
        Format::Csv,
        || {
            csv(
                &["t_s", "i_a"],
                trace.times.iter().zip(&trace.currents).map(|(t, i)| vec![num(*t), num(*i)]),
            )
        },
        || structured(&trace),
    )
}

#[derive(Serialize)]
struct CompareRow {
    x: f64,
    radius_m: f64,
    max_rel_error: f64,
    mie_seconds: f64,
    rgd_seconds: f64,
}

/// Largest `|I_rgd - I_mie| / I_mie` over angles where Mie is nonzero.
pub fn max_relative_error(rgd: &ScatteringPattern, mie: &ScatteringPattern) -> f64 {
    rgd.intensities
        .iter()
        .zip(&mie.intensities)
        .filter(|(_, m)| **m > 0.0)
        .map(|(r, m)| (r - m).abs() / m)
        .fold(0.0, f64::max)
}

pub fn compare(a: &CompareArgs) -> Result<(), CliError> {
    let wl = a.wavelength_nm / 1e9;
    let grid = a.grid.unwrap_or(DEFAULT_GRID).radians();
    let rri = Complex64::new(a.rri, 0.0);
    let mut rows = Vec::new();
    for &x in &a.x {
        if !(x > 0.0) {
            return Err(CliError::validation(format!("size parameter must be > 0, got {x}")));
        }
        let radius = x * wl / (2.0 * PI);
        let start = Instant::now();
        let mie = mie_intensity_pattern(&Sphere::new(radius, rri)?, 1.0, wl, &grid, Polarization::Unpolarized)?;
        let mie_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let region = HomogeneousRegion::sphere(radius, rri)?;
        let rgd = rgd_intensity_pattern(&region, 1.0, wl, &grid, Polarization::Unpolarized)?;
        let rgd_seconds = start.elapsed().as_secs_f64();
        rows.push(CompareRow {
            x,
            radius_m: radius,
            max_rel_error: max_relative_error(&rgd, &mie),
            mie_seconds,
            rgd_seconds,
        });
    }
    // timings vary between runs, so only the structured document carries them
    write(
        &a.output,
        Format::Csv,
        || {
            csv(
                &["x", "max_rel_error"],
                rows.iter().map(|r| vec![num(r.x), num(r.max_rel_error)]),
            )
        },
        || structured(&rows),
    )
}

pub const FIG4_RRI: [f64; 4] = [1.05, 1.10, 1.15, 1.20];

#[derive(Serialize)]
struct Fig4Series {
    panel: &'static str,
    radius_m: f64,
    model: ScatteringModel,
    rri: f64,
    angle_deg: Vec<f64>,
    intensity: Vec<f64>,
}

pub fn reproduce_fig4(a: &Fig4Args) -> Result<(), CliError> {
    let wl = 428e-9;
    let grid = a.grid.unwrap_or(GridConfig { count: 361, ..DEFAULT_GRID }).radians();
    let mut series = Vec::new();
    for (panel, radius) in [("a", 500e-9), ("b", 50e-9)] {
        for rri in FIG4_RRI {
            let sphere = Sphere::new(radius, Complex64::new(rri, 0.0))?;
            // unit range: the far-field pattern scaled by 1/k^2, then undone
            let scene = RadarScene::new(
                Illumination::PlaneWave {
                    wavelength_vacuum: wl,
                    polarization: Polarization::Unpolarized,
                },
                Target::Sphere(sphere),
                Medium::AIR,
                1.0,
            )?;
            let model = select_model(&scene)?.model;
            let k = scene.wavenumber();
            let p = echo_pattern_with_model(&scene, &grid, Polarization::Unpolarized, model)?.scaled(k * k);
            series.push(Fig4Series {
                panel,
                radius_m: radius,
                model,
                rri,
                angle_deg: grid.iter().map(|t| t.to_degrees()).collect(),
                intensity: p.intensities,
            });
        }
    }
    write(
        &a.output,
        Format::Csv,
        || {
            csv(
                &["panel", "model", "rri", "angle_deg", "intensity"],
                series.iter().flat_map(|s| {
                    s.angle_deg.iter().zip(&s.intensity).map(move |(t, i)| {
                        vec![s.panel.to_string(), s.model.to_string(), num(s.rri), num(*t), num(*i)]
                    })
                }),
            )
        },
        || structured(&series),
    )
}
