use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tisr::oracle::OracleCutoffs;
use tisr::spectrum::{SeparationGrid, SweepOptions};
use tisr::trap_basis::BasisSpec;

#[derive(Debug, Parser)]
#[command(name = "tisr", version, about = "Two atoms in separated harmonic traps: spectra and shape resonances")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy-dependent scattering length of a step well
    Aeff(AeffArgs),
    /// Zero-separation s-wave levels for a fixed scattering length
    Busch(BuschArgs),
    /// Fixed scattering length spectrum against separation
    Spectrum(SpectrumArgs),
    /// Self-consistent energy-dependent pseudopotential spectrum
    Selfconsistent(SelfConsistentArgs),
    /// Finite-range reference spectrum in an oscillator basis
    Oracle(OracleArgs),
    /// Locate the avoided crossing for each scattering length
    Crossing(CrossingArgs),
    /// Two-state variational levels
    Variational(VariationalArgs),
    /// First-order shift of the trap ground state
    Perturbation(PerturbationArgs),
    /// Rabi-cycle gate time for a given splitting
    Gate(GateArgs),
    /// Fixed-length spectrum with the first-order comparison column
    Fig2(Fig2Args),
    /// Reference, self-consistent and constant-length spectra of one well
    Fig3(Fig3Args),
    /// Repeat a run recorded in a manifest
    Rerun(RerunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Aeff(_) => "aeff",
            Command::Busch(_) => "busch",
            Command::Spectrum(_) => "spectrum",
            Command::Selfconsistent(_) => "selfconsistent",
            Command::Oracle(_) => "oracle",
            Command::Crossing(_) => "crossing",
            Command::Variational(_) => "variational",
            Command::Perturbation(_) => "perturbation",
            Command::Gate(_) => "gate",
            Command::Fig2(_) => "fig2",
            Command::Fig3(_) => "fig3",
            Command::Rerun(_) => "rerun",
        }
    }

    pub fn output_mut(&mut self) -> Option<&mut OutputArgs> {
        Some(match self {
            Command::Aeff(a) => &mut a.output,
            Command::Busch(a) => &mut a.output,
            Command::Spectrum(a) => &mut a.output,
            Command::Selfconsistent(a) => &mut a.output,
            Command::Oracle(a) => &mut a.output,
            Command::Crossing(a) => &mut a.output,
            Command::Variational(a) => &mut a.output,
            Command::Perturbation(a) => &mut a.output,
            Command::Gate(a) => &mut a.output,
            Command::Fig2(a) => &mut a.output,
            Command::Fig3(a) => &mut a.output,
            Command::Rerun(_) => return None,
        })
    }
}

/// `start:stop:step` or a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.start == self.stop {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn grid(&self) -> tisr::Result<SeparationGrid> {
        if self.start == self.stop {
            SeparationGrid::new(vec![self.start])
        } else {
            SeparationGrid::from_range(self.start, self.stop, self.step)
        }
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    let r = match parts.as_slice() {
        [x] => {
            let x = num(x)?;
            Range { start: x, stop: x, step: 1.0 }
        }
        [a, b, c] => Range { start: num(a)?, stop: num(b)?, step: num(c)? },
        _ => return Err("expected START:STOP:STEP or a single value".into()),
    };
    if ![r.start, r.stop, r.step].iter().all(|v| v.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    if r.start != r.stop && (!(r.step > 0.0) || r.stop < r.start) {
        return Err("range needs STOP >= START and STEP > 0".into());
    }
    if r.start != r.stop && (r.stop - r.start) / r.step > 1e7 {
        return Err("range has more than 1e7 points".into());
    }
    Ok(r)
}

/// `shells:N` or `N_S,L_MAX,N_MAX`.
pub fn parse_basis(s: &str) -> Result<BasisSpec, String> {
    let int = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
    let spec = if let Some(cap) = s.strip_prefix("shells:") {
        BasisSpec::shells(int(cap)?)
    } else {
        match s.split(',').collect::<Vec<_>>().as_slice() {
            [n_s, l_max, n_max] => BasisSpec::new(int(n_s)?, int(l_max)?, int(n_max)?),
            _ => return Err("expected shells:N or N_S,L_MAX,N_MAX".into()),
        }
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// CSV destination, `-` for stdout [default: <command>.csv]
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Manifest destination [default: CSV path with .manifest.json]
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Skip the manifest
    #[arg(long)]
    pub no_manifest: bool,
    /// Also write the full result as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Atom mass in u, recorded with --omega as the SI conversion
    #[arg(long, requires = "omega")]
    pub atom_mass: Option<f64>,
    /// Trap angular frequency in rad/s
    #[arg(long, requires = "atom_mass")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct WellArgs {
    /// Well depth in units of hbar omega
    #[arg(long, default_value_t = 36.79, allow_negative_numbers = true)]
    pub v0: f64,
    /// Well radius in units of z0
    #[arg(long, default_value_t = 0.2)]
    pub radius: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    /// Zero-separation basis: shells:N or N_S,L_MAX,N_MAX
    #[arg(long, default_value = "shells:24", value_parser = parse_basis)]
    pub basis: BasisSpec,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Number of branches
    #[arg(long, default_value_t = 2)]
    pub branches: usize,
    /// Skip the enlarged-basis convergence check
    #[arg(long)]
    pub no_check: bool,
    /// Bisect the grid around sharp gap minima
    #[arg(long)]
    pub refine: bool,
    /// Record diabatic labels in the JSON output
    #[arg(long)]
    pub diabatic: bool,
}

impl SweepArgs {
    pub fn options(&self) -> SweepOptions {
        SweepOptions {
            check_convergence: !self.no_check,
            refine: self.refine,
            track_diabatic: self.diabatic,
            ..SweepOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OracleCutoffArgs {
    /// Highest radial quantum number per partial wave
    #[arg(long, default_value_t = 400)]
    pub n_max: usize,
    /// Highest partial wave
    #[arg(long, default_value_t = 20)]
    pub l_max: usize,
    /// Oscillator length of the expansion, in z0
    #[arg(long, default_value_t = 0.2)]
    pub length: f64,
    /// Eigenvectors kept per partial wave, 0 for all
    #[arg(long, default_value_t = 20)]
    pub keep: usize,
}

impl OracleCutoffArgs {
    pub fn cutoffs(&self) -> OracleCutoffs {
        OracleCutoffs {
            n_max: self.n_max,
            l_max: self.l_max,
            length: self.length,
            keep: (self.keep > 0).then_some(self.keep),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AeffArgs {
    #[command(flatten)]
    pub well: WellArgs,
    /// Collision energies
    #[arg(long, default_value = "-5:10:0.25", value_parser = parse_range, allow_hyphen_values = true)]
    pub energies: Range,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BuschArgs {
    /// Scattering length in z0
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Number of levels
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// Scattering length in z0
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Separations
    #[arg(long, default_value = "0:3:0.02", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelfConsistentArgs {
    #[command(flatten)]
    pub well: WellArgs,
    /// Separations
    #[arg(long, default_value = "0:4:0.05", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Energy step of the root bracketing scan
    #[arg(long, default_value_t = 0.05)]
    pub scan_step: f64,
    /// Half-width of the root search window
    #[arg(long, default_value_t = 2.0)]
    pub window: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub well: WellArgs,
    /// Separations
    #[arg(long, default_value = "0:4:0.05", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub cutoffs: OracleCutoffArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CrossingArgs {
    /// Scattering lengths, comma separated
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub a: Vec<f64>,
    /// Separations [default: 0 to 1.5x the estimate, step 0.02]
    #[arg(long, value_parser = parse_range)]
    pub dz: Option<Range>,
    /// Lower branch of the pair
    #[arg(long, default_value_t = 0)]
    pub branch: usize,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Location tolerance in dz
    #[arg(long, default_value_t = 1e-6)]
    pub dz_tol: f64,
    /// Gap tolerance
    #[arg(long, default_value_t = 1e-8)]
    pub gap_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VariationalArgs {
    /// Scattering length in z0
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Separations
    #[arg(long, default_value = "0.5:4:0.05", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PerturbationArgs {
    /// Scattering length in z0
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Separations
    #[arg(long, default_value = "0:3:0.02", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GateArgs {
    /// Splitting at the avoided crossing, in hbar omega
    #[arg(long, allow_negative_numbers = true)]
    pub gap: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sign {
    Negative,
    Positive,
}

#[derive(Debug, Clone, Args)]
pub struct Fig2Args {
    /// Sign of the scattering length
    #[arg(long, value_enum, default_value_t = Sign::Negative)]
    pub sign: Sign,
    /// Magnitude of the scattering length
    #[arg(long, default_value_t = 0.5)]
    pub magnitude: f64,
    /// Separations
    #[arg(long, default_value = "0:3:0.02", value_parser = parse_range)]
    pub dz: Range,
    /// Number of branches
    #[arg(long, default_value_t = 6)]
    pub branches: usize,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Skip the enlarged-basis convergence check
    #[arg(long)]
    pub no_check: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig3Args {
    #[command(flatten)]
    pub well: WellArgs,
    /// Separations
    #[arg(long, default_value = "0:4:0.05", value_parser = parse_range)]
    pub dz: Range,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub cutoffs: OracleCutoffArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RerunArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
    /// CSV destination, `-` for stdout
    #[arg(short, long, default_value = "-")]
    pub out: PathBuf,
    /// Manifest destination for the repeated run
    #[arg(long)]
    pub write_manifest: Option<PathBuf>,
    /// Also write the full result as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}
