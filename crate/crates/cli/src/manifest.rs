use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tisr::output::{write_csv, SIG_DIGITS};
use tisr::trap_basis::units::AMU_SI;
use tisr::trap_basis::TrapUnits;
use tisr::{Error, Result};

use crate::args::OutputArgs;
use crate::commands::Outcome;

pub const TOOL: &str = "tisr";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SI conversion recorded when the atom mass and trap frequency are given.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnitsRecord {
    pub atom_mass_u: f64,
    pub trap: TrapUnits,
    pub hbar_omega_joule: f64,
    pub z0_metre: f64,
}

impl UnitsRecord {
    pub fn new(atom_mass_u: f64, omega: f64) -> Result<Self> {
        if !(atom_mass_u > 0.0 && atom_mass_u.is_finite()) || !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Invalid(format!("atom mass {atom_mass_u} u and omega {omega} must be positive")));
        }
        let trap = TrapUnits::for_identical_atoms(atom_mass_u * AMU_SI, omega);
        Ok(UnitsRecord { atom_mass_u, trap, hbar_omega_joule: trap.hbar_omega(), z0_metre: trap.z0() })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub rows: usize,
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    pub threads: usize,
    pub sig_digits: usize,
    pub units: Option<UnitsRecord>,
    pub parameters: Value,
    pub tolerances: Value,
    pub outputs: Outputs,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        if m.tool != TOOL {
            return Err(Error::Invalid(format!("{}: not a {TOOL} manifest", path.display())));
        }
        if m.version != VERSION {
            log::warn!("manifest written by version {}, running {VERSION}", m.version);
        }
        Ok(m)
    }
}

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Writes the CSV, the optional JSON result and the manifest.
pub fn emit(command: &str, argv: Vec<String>, output: &OutputArgs, outcome: Outcome) -> Result<()> {
    let units = match (output.atom_mass, output.omega) {
        (Some(m), Some(w)) => Some(UnitsRecord::new(m, w)?),
        _ => None,
    };
    let csv_path = output.out.clone().unwrap_or_else(|| PathBuf::from(format!("{command}.csv")));
    let header: Vec<&str> = outcome.header.iter().map(String::as_str).collect();
    let rows = outcome.rows.len();
    if is_stdout(&csv_path) {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        write_csv(&mut lock, &header, outcome.rows)?;
        lock.flush().map_err(|e| Error::Io(e.to_string()))?;
    } else {
        let mut buf = Vec::new();
        write_csv(&mut buf, &header, outcome.rows)?;
        write_file(&csv_path, &buf)?;
    }
    if let Some(path) = &output.json {
        let text = serde_json::to_string_pretty(&outcome.result).map_err(|e| io_err(path, e))?;
        write_file(path, text.as_bytes())?;
    }
    let manifest_path = match (&output.manifest, output.no_manifest) {
        (_, true) => None,
        (Some(p), false) => Some(p.clone()),
        (None, false) if is_stdout(&csv_path) => None,
        (None, false) => Some(csv_path.with_extension("manifest.json")),
    };
    if let Some(path) = manifest_path {
        let manifest = Manifest {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            argv,
            threads: rayon::current_num_threads(),
            sig_digits: SIG_DIGITS,
            units,
            parameters: outcome.parameters,
            tolerances: outcome.tolerances,
            outputs: Outputs { csv: (!is_stdout(&csv_path)).then_some(csv_path), json: output.json.clone(), rows },
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| io_err(&path, e))?;
        write_file(&path, text.as_bytes())?;
    }
    Ok(())
}
