//! `nanoradar` command-line front end.
//!
//! Angles are degrees at this boundary and radians inside the library.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Format, GridConfig};

#[derive(Parser)]
#[command(name = "nanoradar", version, about = "Optical nanoscale radar simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lorenz-Mie intensity pattern of a sphere.
    Mie(ScatterArgs),
    /// Rayleigh-Gans-Debye intensity pattern of a sphere or box.
    Rgd(ScatterArgs),
    /// Full detection pipeline on a configured scene.
    Radar(RadarArgs),
    /// Surface-plasmon dispersion curve (omega, Re k, Im k).
    Spp(SppArgs),
    /// Uniform linear array pattern and directivity.
    Antenna(AntennaArgs),
    /// Photodiode transient current (t, I).
    Pd(PdArgs),
    /// RGD versus Mie accuracy and timing over size parameters.
    Compare(CompareArgs),
    /// Mie (r = 500 nm) and RGD (r = 50 nm) patterns at 428 nm for several contrasts.
    #[command(name = "reproduce-fig4")]
    ReproduceFig4(Fig4Args),
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Clone)]
pub struct ScatterArgs {
    /// Run configuration; its scene overrides the geometry flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Angle grid in degrees, start:stop:count.
    #[arg(long)]
    pub grid: Option<GridConfig>,
    #[arg(long, default_value_t = 50.0)]
    pub radius_nm: f64,
    /// Box edge lengths a,b,c in nm (rgd only); replaces the sphere.
    #[arg(long, value_delimiter = ',')]
    pub extents_nm: Option<Vec<f64>>,
    /// Relative refractive index, real part.
    #[arg(long, default_value_t = 1.05)]
    pub rri: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rri_imag: f64,
    #[arg(long, default_value_t = 428.0)]
    pub wavelength_nm: f64,
    #[arg(long, default_value_t = 1.0)]
    pub medium_index: f64,
    #[arg(long, value_enum, default_value_t = Pol::Unpolarized)]
    pub polarization: Pol,
}

#[derive(Args, Clone)]
pub struct RadarArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Replaces the seed of gaussian noise.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid: Option<GridConfig>,
}

#[derive(Args, Clone)]
pub struct SppArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Plasma frequency, rad/s.
    #[arg(long, default_value_t = 1.37e16)]
    pub plasma_frequency: f64,
    /// Drude damping, rad/s.
    #[arg(long, default_value_t = 0.0)]
    pub damping: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps_inf: f64,
    /// Dielectric permittivity.
    #[arg(long, default_value_t = 1.0)]
    pub eps2: f64,
    /// Sweep start as a fraction of the surface-plasmon frequency.
    #[arg(long, default_value_t = 0.01)]
    pub start_frac: f64,
    #[arg(long, default_value_t = 0.95)]
    pub stop_frac: f64,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Dispersion::Standard)]
    pub form: Dispersion,
}

#[derive(Args, Clone)]
pub struct AntennaArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub grid: Option<GridConfig>,
    #[arg(long, default_value_t = 4)]
    pub elements: usize,
    /// Element spacing in wavelengths.
    #[arg(long, default_value_t = 0.25)]
    pub spacing_wavelengths: f64,
    /// Use the Hansen-Woodyard spacing (N-1)/N * lambda/4 instead.
    #[arg(long)]
    pub hansen_woodyard: bool,
    /// Progressive phase in radians; end-fire (-k d) when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub phase_rad: Option<f64>,
    #[arg(long, value_enum, default_value_t = Element::Isotropic)]
    pub element: Element,
    #[arg(long, default_value_t = 428.0)]
    pub wavelength_nm: f64,
}

#[derive(Args, Clone)]
pub struct PdArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// Incident optical power, W.
    #[arg(long, default_value_t = 1e-6)]
    pub power_w: f64,
    #[arg(long, default_value_t = 0.5e-6)]
    pub x_a: f64,
    #[arg(long, default_value_t = 0.2e-6)]
    pub w_n: f64,
    #[arg(long, default_value_t = 0.3e-6)]
    pub w_p: f64,
    #[arg(long, default_value_t = 1.0e5)]
    pub v_n: f64,
    #[arg(long, default_value_t = 0.8e5)]
    pub v_p: f64,
    #[arg(long, default_value_t = 1.0e6)]
    pub alpha_eff: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mu_f: f64,
    #[arg(long, default_value_t = 0.3)]
    pub mu_b: f64,
    /// Optical frequency, Hz.
    #[arg(long, default_value_t = 700e12)]
    pub nu: f64,
    #[arg(long, value_enum, default_value_t = Grouping::Inside)]
    pub grouping: Grouping,
    /// End of the time grid, s; 1.2 times the response end when omitted.
    #[arg(long)]
    pub t_stop: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub count: usize,
    /// Optional RC low-pass time constant, s.
    #[arg(long)]
    pub rc_tau: Option<f64>,
}

#[derive(Args, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub grid: Option<GridConfig>,
    /// Size parameters.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.5, 1.0])]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 1.05)]
    pub rri: f64,
    #[arg(long, default_value_t = 428.0)]
    pub wavelength_nm: f64,
}

#[derive(Args, Clone)]
pub struct Fig4Args {
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub grid: Option<GridConfig>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Pol {
    Unpolarized,
    Parallel,
    Perpendicular,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Dispersion {
    Standard,
    AsPrinted,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Element {
    Isotropic,
    Dipole,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Grouping {
    Inside,
    Outside,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mie(a) => commands::mie(&a),
        Command::Rgd(a) => commands::rgd(&a),
        Command::Radar(a) => commands::radar(&a),
        Command::Spp(a) => commands::spp(&a),
        Command::Antenna(a) => commands::antenna(&a),
        Command::Pd(a) => commands::pd(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::ReproduceFig4(a) => commands::reproduce_fig4(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
