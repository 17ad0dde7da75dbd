mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status 1: bad or empty data. Exit status 2: bad invocation or parameters.
#[derive(Debug)]
pub enum Failure {
    Data(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl From<patchnoise::Error> for Failure {
    fn from(e: patchnoise::Error) -> Self {
        match e {
            patchnoise::Error::Dataset { .. } | patchnoise::Error::Io(_) => Failure::Data(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<patchnoise_mc::Error> for Failure {
    fn from(e: patchnoise_mc::Error) -> Self {
        match e {
            patchnoise_mc::Error::Core(core) => core.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "patchnoise", version, about = "Electric-field noise above patchy conductor surfaces")]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct Cli {
    /// TOML file of flag values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Progress messages on standard error.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Noise density S_E against distance, or the normalized curve s(ρ).
    Curve(CurveArgs),
    /// Monte Carlo field variance above random patch tilings.
    Mc(McArgs),
    /// Fit N·S_V and ζ to a dataset.
    Fit(FitArgs),
    /// Rescale a noise density to the reference frequency.
    Rescale(RescaleArgs),
    /// Convert between noise density and heating or damping rates.
    #[command(subcommand)]
    Rates(RatesCommand),
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct CurveArgs {
    /// Correlation length ζ, m.
    #[arg(long)]
    pub zeta: Option<f64>,
    /// N·S_V at the reference frequency, V²/Hz.
    #[arg(long)]
    pub nsv: Option<f64>,
    /// Smallest distance, m.
    #[arg(long)]
    pub dmin: Option<f64>,
    /// Largest distance, m.
    #[arg(long)]
    pub dmax: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Evaluation frequency, Hz (default: the reference frequency).
    #[arg(long)]
    pub f: Option<f64>,
    /// Reference frequency, Hz.
    #[arg(long, default_value_t = 1e6)]
    pub f0: f64,
    /// Frequency exponent α in S ∝ ω^(−α).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Emit s(ρ) = S_E·ζ²/(N·S_V) against ρ = d/ζ.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long, default_value_t = 0.01)]
    pub dmin_rho: f64,
    #[arg(long, default_value_t = 100.0)]
    pub dmax_rho: f64,
    /// Add the short- and long-range asymptotes (normalized curve only).
    #[arg(long)]
    pub asymptotes: bool,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct McArgs {
    /// Seed intensity λ, m⁻².
    #[arg(long, default_value_t = 1e12)]
    pub lambda: f64,
    /// Standard deviation of the patch potentials, V.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Side of the periodic square, m.
    #[arg(long, default_value_t = 32e-6)]
    pub side: f64,
    /// Grid nodes per side.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Heights, m, comma separated (default: 9 log-spaced from 2h to L/8).
    #[arg(long, value_delimiter = ',')]
    pub heights: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    pub configs: usize,
    /// Master seed, or `auto` to draw one and report it.
    #[arg(long)]
    pub seed: Option<String>,
    /// Largest correlation offset, m (default: min(L/4, 5/√λ)).
    #[arg(long)]
    pub max_r: Option<f64>,
    /// Also write the first configuration's boundary as CSV.
    #[arg(long, value_name = "PATH")]
    pub dump_boundary: Option<PathBuf>,
    /// Also write the measured and fitted correlation as CSV.
    #[arg(long, value_name = "PATH")]
    pub dump_correlation: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct FitArgs {
    /// CSV dataset with header source,kind,d_um,f_MHz,s_e_si.
    #[arg(long, value_name = "PATH", conflicts_with = "builtin", required_unless_present = "builtin")]
    pub data: Option<PathBuf>,
    /// Use the built-in gold-surface measurements.
    #[arg(long = "builtin-table1")]
    pub builtin: bool,
    /// Static patch size ζ₀, m.
    #[arg(long, default_value_t = patchnoise::experiments::DEFAULT_ZETA0_M)]
    pub zeta0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Emit the reference curves ζ = 0.65, 1.6, 4.6 ζ₀ instead of the fit table.
    #[arg(long = "fig2")]
    pub reference_curves: bool,
    /// Distance range and sample count of the reference curves.
    #[arg(long, default_value_t = 1e-8)]
    pub dmin: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dmax: f64,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct RescaleArgs {
    /// Measured S_E, V²m⁻²Hz⁻¹.
    #[arg(long)]
    pub se: f64,
    /// Measurement frequency, Hz.
    #[arg(long)]
    pub f: f64,
    #[arg(long, default_value_t = 1e6)]
    pub f0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Subcommand, Debug)]
pub enum RatesCommand {
    /// Ion heating rate Γ = q²S_E/(4mħω), or S_E from a measured Γ.
    Ion(IonArgs),
    /// Cantilever damping rate Γ = q²S_E/(4k_B T).
    Cantilever(CantileverArgs),
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct IonArgs {
    #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
    pub se: Option<f64>,
    /// Heating rate, quanta/s; prints the implied S_E.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Ion mass in atomic mass units.
    #[arg(long)]
    pub mass_u: f64,
    /// Secular frequency, Hz.
    #[arg(long)]
    pub f: f64,
    /// Charge in elementary charges.
    #[arg(long, default_value_t = 1.0)]
    pub charge_e: f64,
}

#[derive(Args, Debug)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct CantileverArgs {
    #[arg(long)]
    pub se: f64,
    /// Tip charge, C.
    #[arg(long, conflicts_with = "q_e", required_unless_present = "q_e")]
    pub q: Option<f64>,
    /// Tip charge in elementary charges.
    #[arg(long)]
    pub q_e: Option<f64>,
    /// Temperature, K.
    #[arg(long, default_value_t = 300.0)]
    pub temperature: f64,
    /// Resonance frequency, Hz; S_E is understood to be taken there.
    #[arg(long, default_value_t = 1e6)]
    pub f: f64,
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("PATCHNOISE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("PATCHNOISE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot start {threads} threads: {e}")))
}

fn run() -> Result<(), Failure> {
    let args = config::merge(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version also arrive here.
            return if e.exit_code() == 0 { Ok(()) } else { Err(Failure::Usage(String::new())) };
        }
    };
    configure_threads()?;
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let message = match &f {
                Failure::Data(m) | Failure::Usage(m) => m,
            };
            if !message.is_empty() {
                eprintln!("error: {message}");
            }
            ExitCode::from(f.code())
        }
    }
}
