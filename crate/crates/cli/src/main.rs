mod args;
mod commands;
mod manifest;

use std::process::ExitCode;

use clap::Parser;
use tisr::Error;

use args::{Cli, Command, RerunArgs};
use manifest::Manifest;

const THREADS_VAR: &str = "TISR_THREADS";

/// Argument and domain errors map to 2, numerical failures to 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::Domain(_) => 2,
        _ => 1,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Invalid(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))
}

fn rerun(r: RerunArgs) -> Result<(), Error> {
    let m = Manifest::load(&r.manifest)?;
    let mut cli = Cli::try_parse_from(std::iter::once("tisr".to_string()).chain(m.argv.iter().cloned()))
        .map_err(|e| Error::Invalid(format!("manifest arguments do not parse: {e}")))?;
    if cli.command.name() != m.command {
        return Err(Error::Invalid(format!("manifest command {} does not match its arguments", m.command)));
    }
    let output = cli
        .command
        .output_mut()
        .ok_or_else(|| Error::Invalid("a rerun manifest cannot be rerun".into()))?;
    output.out = Some(r.out);
    output.no_manifest = r.write_manifest.is_none();
    output.manifest = r.write_manifest;
    output.json = r.json;
    execute(cli.command, m.argv)
}

fn execute(mut command: Command, argv: Vec<String>) -> Result<(), Error> {
    if let Command::Rerun(r) = command {
        return rerun(r);
    }
    let outcome = commands::run(&command)?;
    let name = command.name();
    let output = command.output_mut().expect("non-rerun command has output options");
    manifest::emit(name, argv, output, outcome)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match configure_threads().and_then(|_| execute(cli.command, argv)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tisr: {e}");
            if let Error::NoRoot { scan, .. } = &e {
                for (energy, residual) in scan {
                    eprintln!("  scan E = {energy}: g = {residual:e}");
                }
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
