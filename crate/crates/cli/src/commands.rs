use std::sync::Arc;

use serde_json::{json, Value};
use tisr::analysis::{
    estimate_resonance_dz, gate_phase_time, locate_avoided_crossing, perturbative_shift, variational_gap,
    variational_gap_minimum, CrossingOptions, ANALYSIS_CSV_HEADER,
};
use tisr::oracle::ExactModel;
use tisr::output::fmt;
use tisr::scattering::{aeff_table, StepWell};
use tisr::selfconsistent::{SelfConsistent, SolverOptions};
use tisr::spectrum::{
    sweep, FixedA, LevelModel, SeparationGrid, SpectrumResult, SweepOptions, CONVERGENCE_TOL, CSV_HEADER,
    ENLARGEMENT_STEP,
};
use tisr::trap_basis::{busch_energies, BasisSpec, StateKind};
use tisr::{Error, Result};

use crate::args::*;

/// Everything a subcommand produces before it is written out.
pub struct Outcome {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub parameters: Value,
    pub tolerances: Value,
    pub result: Value,
}

impl Outcome {
    fn new(header: &[&str], rows: Vec<Vec<String>>, parameters: Value, tolerances: Value, result: Value) -> Self {
        Outcome { header: header.iter().map(|s| s.to_string()).collect(), rows, parameters, tolerances, result }
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Aeff(a) => aeff(a),
        Command::Busch(a) => busch(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Selfconsistent(a) => selfconsistent(a),
        Command::Oracle(a) => oracle(a),
        Command::Crossing(a) => crossing(a),
        Command::Variational(a) => variational(a),
        Command::Perturbation(a) => perturbation(a),
        Command::Gate(a) => gate(a),
        Command::Fig2(a) => fig2(a),
        Command::Fig3(a) => fig3(a),
        Command::Rerun(_) => Err(Error::Invalid("rerun is handled before dispatch".into())),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn well(w: &WellArgs) -> Result<StepWell> {
    StepWell::new(w.v0, w.radius)
}

fn well_parameters(w: &StepWell) -> Value {
    json!({
        "v0": w.v0,
        "radius": w.radius,
        "scattering_length": w.scattering_length().ok(),
        "valid_contact_model": w.is_valid_contact_model(),
        "bound_states": to_value(&w.bound_states()),
    })
}

fn sweep_tolerances(opts: &SweepOptions) -> Value {
    json!({
        "convergence_tol": CONVERGENCE_TOL,
        "enlargement_step": ENLARGEMENT_STEP,
        "sweep": to_value(opts),
    })
}

fn spectrum_outcome(model: &dyn LevelModel, r: SpectrumResult, opts: &SweepOptions) -> Outcome {
    Outcome::new(&CSV_HEADER, r.csv_rows(), model.describe(), sweep_tolerances(opts), to_value(&r))
}

fn aeff(args: &AeffArgs) -> Result<Outcome> {
    let w = well(&args.well)?;
    let table = aeff_table(&w, &args.energies.values())?;
    let rows = table.iter().map(|r| vec![fmt(r.e_k), fmt(r.a_eff), r.pole.to_string()]).collect();
    Ok(Outcome::new(&["E_K", "a_eff", "pole_flag"], rows, well_parameters(&w), json!({}), to_value(&table)))
}

fn busch(args: &BuschArgs) -> Result<Outcome> {
    if args.a.is_nan() {
        return Err(Error::Invalid("scattering length is NaN".into()));
    }
    let states = busch_energies(1.0 / args.a, args.count)?;
    let rows = states
        .iter()
        .map(|s| {
            let kind = match s.kind {
                StateKind::Bound => "bound",
                StateKind::TrapLike => "trap_like",
            };
            vec![s.index.to_string(), "0".into(), fmt(s.energy), kind.into()]
        })
        .collect();
    let parameters = json!({ "a": args.a, "inverse_a": 1.0 / args.a, "count": args.count });
    Ok(Outcome::new(&["index", "l", "E", "kind"], rows, parameters, json!({}), to_value(&states)))
}

fn spectrum(args: &SpectrumArgs) -> Result<Outcome> {
    let model = FixedA::from_length(args.a, args.basis.basis)?;
    let opts = args.sweep.options();
    let r = sweep(&model, &args.dz.grid()?, args.sweep.branches, &opts)?;
    Ok(spectrum_outcome(&model, r, &opts))
}

fn selfconsistent(args: &SelfConsistentArgs) -> Result<Outcome> {
    let solver = SolverOptions { scan_step: args.scan_step, window: args.window, ..SolverOptions::default() };
    let model = SelfConsistent::new(Arc::new(well(&args.well)?), args.basis.basis, solver)?;
    let opts = args.sweep.options();
    let r = sweep(&model, &args.dz.grid()?, args.sweep.branches, &opts)?;
    let mut out = spectrum_outcome(&model, r, &opts);
    out.tolerances["solver"] = to_value(&solver);
    Ok(out)
}

fn oracle(args: &OracleArgs) -> Result<Outcome> {
    let model = ExactModel::new(well(&args.well)?, args.cutoffs.cutoffs())?;
    let opts = args.sweep.options();
    let r = sweep(&model, &args.dz.grid()?, args.sweep.branches, &opts)?;
    Ok(spectrum_outcome(&model, r, &opts))
}

fn crossing(args: &CrossingArgs) -> Result<Outcome> {
    let opts = CrossingOptions { dz_tol: args.dz_tol, gap_tol: args.gap_tol };
    if !(opts.dz_tol > 0.0) || !(opts.gap_tol > 0.0) {
        return Err(Error::Invalid("tolerances must be positive".into()));
    }
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &a in &args.a {
        let model = FixedA::from_length(a, args.basis.basis)?;
        let estimate = estimate_resonance_dz(a).ok();
        let grid = match (args.dz, estimate) {
            (Some(r), _) => r.grid()?,
            (None, Some(est)) => SeparationGrid::from_range(0.0, (1.5 * est).max(3.0), 0.02)?,
            (None, None) => SeparationGrid::from_range(0.0, 4.0, 0.02)?,
        };
        let r = sweep(&model, &grid, args.branch + 2, &SweepOptions::fast())?;
        let info = match locate_avoided_crossing(&model, &r, args.branch, opts) {
            Ok(c) => Some(c),
            Err(Error::NoCrossing { .. }) => {
                log::info!("no avoided crossing for a = {a}");
                None
            }
            Err(e) => return Err(e),
        };
        let variational = match estimate {
            Some(est) if args.branch == 0 => match variational_gap_minimum(a, 0.5 * est, 1.5 * est, 1e-6) {
                Ok(v) => Some(v),
                Err(e) => {
                    log::warn!("variational gap for a = {a}: {e}");
                    None
                }
            },
            _ => None,
        };
        rows.push(vec![
            fmt(a),
            opt(estimate),
            opt(info.map(|c| c.dz_res)),
            opt(info.map(|c| c.gap)),
            opt(variational.map(|v| v.gap)),
        ]);
        records.push(json!({
            "a": a,
            "dz_res_estimate": estimate,
            "crossing": info,
            "variational": variational,
            "grid": [grid.values()[0], grid.values()[grid.len() - 1], grid.len()],
        }));
    }
    let parameters = json!({ "a": args.a, "branch": args.branch, "basis": args.basis.basis, "dz": args.dz.map(|r| [r.start, r.stop, r.step]) });
    let tolerances = json!({ "dz_tol": opts.dz_tol, "gap_tol": opts.gap_tol, "variational_xtol": 1e-6 });
    Ok(Outcome::new(&ANALYSIS_CSV_HEADER, rows, parameters, tolerances, Value::Array(records)))
}

fn variational(args: &VariationalArgs) -> Result<Outcome> {
    let gaps = args.dz.values().iter().map(|&dz| variational_gap(args.a, dz)).collect::<Result<Vec<_>>>()?;
    let rows = gaps.iter().map(|v| vec![fmt(v.dz), fmt(v.lower), fmt(v.upper), fmt(v.gap), fmt(v.overlap)]).collect();
    Ok(Outcome::new(
        &["dz", "lower", "upper", "gap", "overlap"],
        rows,
        json!({ "a": args.a }),
        json!({}),
        to_value(&gaps),
    ))
}

fn perturbation(args: &PerturbationArgs) -> Result<Outcome> {
    let rows = args
        .dz
        .values()
        .iter()
        .map(|&dz| {
            let s = perturbative_shift(args.a, dz);
            vec![fmt(dz), fmt(s), fmt(1.5 + s)]
        })
        .collect();
    Ok(Outcome::new(&["dz", "shift", "energy"], rows, json!({ "a": args.a }), json!({}), Value::Null))
}

fn gate(args: &GateArgs) -> Result<Outcome> {
    let t = gate_phase_time(args.gap)?;
    Ok(Outcome::new(
        &["gap", "period", "phase"],
        vec![vec![fmt(args.gap), fmt(t.period), fmt(t.phase)]],
        json!({ "gap": args.gap }),
        json!({}),
        to_value(&t),
    ))
}

fn fig2(args: &Fig2Args) -> Result<Outcome> {
    if !(args.magnitude > 0.0) {
        return Err(Error::Invalid(format!("magnitude must be positive, got {}", args.magnitude)));
    }
    let a = match args.sign {
        Sign::Negative => -args.magnitude,
        Sign::Positive => args.magnitude,
    };
    let model = FixedA::from_length(a, args.basis.basis)?;
    let opts = SweepOptions { check_convergence: !args.no_check, ..SweepOptions::default() };
    let r = sweep(&model, &args.dz.grid()?, args.branches, &opts)?;
    let mut out = spectrum_outcome(&model, r, &opts);
    out.header.push("perturbative".into());
    for row in &mut out.rows {
        let dz: f64 = row[0].parse().expect("formatted separation");
        row.push(fmt(1.5 + perturbative_shift(a, dz)));
    }
    Ok(out)
}

fn fig3(args: &Fig3Args) -> Result<Outcome> {
    let w = well(&args.well)?;
    let a0 = w.scattering_length()?;
    let grid = args.dz.grid()?;
    let opts = args.sweep.options();
    let branches = args.sweep.branches;
    let spec: BasisSpec = args.basis.basis;
    let exact = ExactModel::new(w, args.cutoffs.cutoffs())?;
    let sc = SelfConsistent::new(Arc::new(w), spec, SolverOptions::default())?;
    let constant = FixedA::from_length(a0, spec)?;
    let models: [(&str, &dyn LevelModel); 3] = [("oracle", &exact), ("self_consistent", &sc), ("constant_a", &constant)];
    let mut rows = Vec::new();
    let mut parameters = json!({ "well": well_parameters(&w) });
    let mut result = json!({});
    for (name, model) in models {
        let r = sweep(model, &grid, branches, &opts)?;
        rows.extend(r.csv_rows());
        parameters[name] = model.describe();
        result[name] = to_value(&r);
    }
    let mut tolerances = sweep_tolerances(&opts);
    tolerances["solver"] = to_value(&SolverOptions::default());
    Ok(Outcome::new(&CSV_HEADER, rows, parameters, tolerances, result))
}
