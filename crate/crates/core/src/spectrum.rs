//! Spectra of the displaced-trap Hamiltonian as functions of the trap
//! separation, with adiabatic (energy-sorted) branch labels.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::numerics::eigen::{sym_eig, sym_eigenvalues};
use crate::output::{csv_string, fmt};
use crate::trap_basis::{BasisSpec, TrapBasis};
use crate::{Error, Result};

/// Energy shift under the standard basis enlargement above which a point
/// is reported as unconverged.
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// Cutoff increment used for the convergence check.
pub const ENLARGEMENT_STEP: usize = 4;

/// Trap separations, non-negative and strictly ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationGrid {
    dz_values: Vec<f64>,
}

impl SeparationGrid {
    pub fn new(dz_values: Vec<f64>) -> Result<Self> {
        if dz_values.is_empty() {
            return Err(Error::Invalid("separation grid is empty".into()));
        }
        if dz_values.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return Err(Error::Invalid("separations must be finite and >= 0".into()));
        }
        if dz_values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("separations must be strictly ascending".into()));
        }
        Ok(SeparationGrid { dz_values })
    }

    /// `start, start + step, ...` up to and including `stop` (within 1e-9 steps).
    pub fn from_range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(stop >= start) {
            return Err(Error::Invalid(format!("bad range {start}:{stop}:{step}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Self::new((0..count).map(|i| start + i as f64 * step).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.dz_values
    }

    pub fn len(&self) -> usize {
        self.dz_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dz_values.is_empty()
    }
}

/// Which Hamiltonian produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    #[serde(rename = "fixed-a")]
    FixedA,
    #[serde(rename = "self-consistent")]
    SelfConsistent,
    #[serde(rename = "oracle")]
    Oracle,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::FixedA => "fixed-a",
            Model::SelfConsistent => "self-consistent",
            Model::Oracle => "oracle",
        }
    }
}

/// One eigenvalue at one separation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub energy: f64,
    /// Scattering length in effect at this level, when the model has one.
    pub interaction: Option<f64>,
    /// Set when the solver found several candidate roots for this level.
    pub ambiguous: bool,
    /// The other candidates as `(energy, interaction)`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<(f64, Option<f64>)>,
}

impl Level {
    pub fn plain(energy: f64, interaction: Option<f64>) -> Self {
        Level { energy, interaction, ambiguous: false, alternatives: Vec::new() }
    }

    /// Placeholder for a level the solver could not find.
    pub fn missing() -> Self {
        Level::plain(f64::NAN, None)
    }
}

/// Anything that can produce the lowest levels at a given separation.
pub trait LevelModel: Send + Sync {
    fn tag(&self) -> Model;

    /// Parameters recorded alongside the results.
    fn describe(&self) -> serde_json::Value;

    /// Size of the underlying matrix.
    fn dimension(&self) -> usize;

    /// Lowest `count` levels, ascending.
    fn levels(&self, dz: f64, count: usize) -> Result<Vec<Level>>;

    /// The same model with every cutoff raised by the standard increment.
    fn enlarged(&self) -> Result<Option<Box<dyn LevelModel>>> {
        Ok(None)
    }

    /// Eigenvectors of the lowest `count` levels, as columns, in a basis
    /// that does not depend on `dz`.
    fn eigenvectors(&self, _dz: f64, _count: usize) -> Option<Result<DMatrix<f64>>> {
        None
    }
}

/// `H = diag(E_i) + dz^2/2 - dz W` in the zero-separation basis.
pub fn hamiltonian_fixed_a(basis: &TrapBasis, dz: f64) -> DMatrix<f64> {
    let mut h = &basis.dipole * (-dz);
    for (i, e) in basis.energies.iter().enumerate() {
        h[(i, i)] += e + 0.5 * dz * dz;
    }
    h
}

/// Builds the basis for `c = 1/a` and returns the Hamiltonian at `dz`.
pub fn hamiltonian(inverse_a: f64, dz: f64, spec: BasisSpec) -> Result<DMatrix<f64>> {
    Ok(hamiltonian_fixed_a(&TrapBasis::new(inverse_a, spec)?, dz))
}

/// Lowest `count` eigenvalues of the fixed-a Hamiltonian.
pub fn fixed_a_levels(basis: &TrapBasis, dz: f64, count: usize) -> Result<Vec<f64>> {
    let mut v = sym_eigenvalues(&hamiltonian_fixed_a(basis, dz))?;
    v.truncate(count);
    Ok(v)
}

/// Fixed scattering length model.
#[derive(Debug, Clone)]
pub struct FixedA {
    pub basis: Arc<TrapBasis>,
}

impl FixedA {
    pub fn new(inverse_a: f64, spec: BasisSpec) -> Result<Self> {
        Ok(FixedA { basis: Arc::new(TrapBasis::new(inverse_a, spec)?) })
    }

    pub fn from_length(a: f64, spec: BasisSpec) -> Result<Self> {
        if a.is_nan() {
            return Err(Error::Invalid("scattering length is NaN".into()));
        }
        Self::new(1.0 / a, spec)
    }

    pub fn scattering_length(&self) -> f64 {
        1.0 / self.basis.inverse_a
    }
}

impl LevelModel for FixedA {
    fn tag(&self) -> Model {
        Model::FixedA
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.scattering_length(),
            "inverse_a": self.basis.inverse_a,
            "basis": self.basis.spec,
            "dimension": self.basis.dim(),
        })
    }

    fn dimension(&self) -> usize {
        self.basis.dim()
    }

    fn levels(&self, dz: f64, count: usize) -> Result<Vec<Level>> {
        let a = self.scattering_length();
        Ok(fixed_a_levels(&self.basis, dz, count)?.into_iter().map(|e| Level::plain(e, Some(a))).collect())
    }

    fn enlarged(&self) -> Result<Option<Box<dyn LevelModel>>> {
        let spec = self.basis.spec.enlarged(ENLARGEMENT_STEP);
        Ok(Some(Box::new(FixedA::new(self.basis.inverse_a, spec)?)))
    }

    fn eigenvectors(&self, dz: f64, count: usize) -> Option<Result<DMatrix<f64>>> {
        Some(sym_eig(&hamiltonian_fixed_a(&self.basis, dz)).map(|r| r.vectors.columns(0, count).into_owned()))
    }
}

/// Sweep settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Compare every point against the enlarged basis.
    pub check_convergence: bool,
    /// Bisect intervals around sharp gap minima.
    pub refine: bool,
    /// A grid minimum is sharp when `dip_ratio * gap` is below both neighbours.
    pub dip_ratio: f64,
    /// Smallest spacing produced by refinement.
    pub min_step: f64,
    /// Record eigenvector-overlap (diabatic) labels.
    pub track_diabatic: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { check_convergence: true, refine: false, dip_ratio: 1.5, min_step: 1e-4, track_diabatic: false }
    }
}

impl SweepOptions {
    pub fn fast() -> Self {
        SweepOptions { check_convergence: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    pub dz: f64,
    pub energy: f64,
    pub interaction: Option<f64>,
    pub converged: bool,
    pub ambiguous: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alternatives: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub index: usize,
    pub points: Vec<BranchPoint>,
}

/// Grid-level local minimum of the gap between branches `lower` and `lower + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapMinimum {
    pub lower: usize,
    pub dz: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Largest level shift under the standard enlargement, if checked.
    pub max_enlargement_shift: Option<f64>,
    pub tolerance: f64,
    pub converged: bool,
    /// Largest `|dE/d(dz)|` seen between adjacent grid points.
    pub continuity_constant: f64,
    pub refined_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub model: Model,
    pub parameters: serde_json::Value,
    pub grid: Vec<f64>,
    pub branches: Vec<Branch>,
    pub diagnostics: Diagnostics,
    pub gap_minima: Vec<GapMinimum>,
    /// For each grid point after the first, the adiabatic index at the
    /// previous point with the largest eigenvector overlap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diabatic: Option<Vec<Vec<usize>>>,
}

pub const CSV_HEADER: [&str; 6] = ["dz", "branch", "energy", "model", "interaction", "converged"];

impl SpectrumResult {
    pub fn energies(&self, branch: usize) -> Vec<f64> {
        self.branches[branch].points.iter().map(|p| p.energy).collect()
    }

    /// Rows ordered by separation, then branch.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::with_capacity(self.grid.len() * self.branches.len());
        for i in 0..self.grid.len() {
            for b in &self.branches {
                let p = &b.points[i];
                rows.push(vec![
                    fmt(p.dz),
                    b.index.to_string(),
                    fmt(p.energy),
                    self.model.as_str().to_string(),
                    p.interaction.map(fmt).unwrap_or_default(),
                    p.converged.to_string(),
                ]);
            }
        }
        rows
    }

    pub fn to_csv(&self) -> Result<String> {
        csv_string(&CSV_HEADER, self.csv_rows())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}

fn evaluate(model: &dyn LevelModel, dz: &[f64], count: usize) -> Result<Vec<Vec<Level>>> {
    dz.par_iter()
        .map(|&d| {
            let lv = model.levels(d, count)?;
            if lv.len() < count {
                return Err(Error::Invalid(format!("model returned {} of {count} levels at dz = {d}", lv.len())));
            }
            Ok(lv)
        })
        .collect()
}

// Among ambiguous candidates keep the one closest to the linear
// extrapolation of the branch so far.
fn select_by_continuity(dz: &[f64], levels: &mut [Vec<Level>]) {
    let n_branches = levels.first().map_or(0, |l| l.len());
    for b in 0..n_branches {
        for i in 1..dz.len() {
            if !levels[i][b].ambiguous {
                continue;
            }
            let prev = levels[i - 1][b].energy;
            let predicted = if i >= 2 && levels[i - 2][b].energy.is_finite() {
                let slope = (prev - levels[i - 2][b].energy) / (dz[i - 1] - dz[i - 2]);
                prev + slope * (dz[i] - dz[i - 1])
            } else {
                prev
            };
            if !predicted.is_finite() {
                continue;
            }
            let lv = &mut levels[i][b];
            let mut candidates = vec![(lv.energy, lv.interaction)];
            candidates.extend(lv.alternatives.iter().copied());
            let best = candidates
                .iter()
                .enumerate()
                .min_by(|x, y| (x.1 .0 - predicted).abs().total_cmp(&(y.1 .0 - predicted).abs()))
                .map(|(k, _)| k)
                .unwrap_or(0);
            if best != 0 {
                let chosen = candidates.remove(best);
                lv.energy = chosen.0;
                lv.interaction = chosen.1;
                lv.alternatives = candidates;
            }
        }
    }
}

// Interior grid minima of adjacent-branch gaps.
fn gap_minima(grid: &[f64], levels: &[Vec<Level>], n_branches: usize) -> Vec<GapMinimum> {
    let mut out = Vec::new();
    for b in 0..n_branches.saturating_sub(1) {
        let gap: Vec<f64> = levels.iter().map(|l| l[b + 1].energy - l[b].energy).collect();
        for i in 1..gap.len().saturating_sub(1) {
            if gap[i] < gap[i - 1] && gap[i] <= gap[i + 1] {
                out.push(GapMinimum { lower: b, dz: grid[i], gap: gap[i] });
            }
        }
    }
    out
}

// New points bisecting the intervals next to sharp gap minima.
fn refinement_points(grid: &[f64], levels: &[Vec<Level>], n_branches: usize, opts: &SweepOptions) -> Vec<f64> {
    let mut new = Vec::new();
    for b in 0..n_branches.saturating_sub(1) {
        let gap: Vec<f64> = levels.iter().map(|l| l[b + 1].energy - l[b].energy).collect();
        for i in 1..gap.len().saturating_sub(1) {
            let sharp = gap[i] < gap[i - 1] && gap[i] <= gap[i + 1] && opts.dip_ratio * gap[i] < gap[i - 1].min(gap[i + 1]);
            if !sharp {
                continue;
            }
            for (lo, hi) in [(grid[i - 1], grid[i]), (grid[i], grid[i + 1])] {
                if hi - lo >= 2.0 * opts.min_step {
                    new.push(0.5 * (lo + hi));
                }
            }
        }
    }
    new.sort_by(f64::total_cmp);
    new.dedup();
    new
}

/// Lowest `n_branches` levels over the grid, labelled by energy order.
pub fn sweep(model: &dyn LevelModel, grid: &SeparationGrid, n_branches: usize, opts: &SweepOptions) -> Result<SpectrumResult> {
    if n_branches == 0 || 2 * n_branches > model.dimension() {
        return Err(Error::Invalid(format!(
            "n_branches = {n_branches} must be in 1..={} (half the basis dimension)",
            model.dimension() / 2
        )));
    }
    let mut dz: Vec<f64> = grid.values().to_vec();
    let mut levels = evaluate(model, &dz, n_branches)?;
    let mut refined_points = 0;
    if opts.refine {
        for _ in 0..64 {
            let new = refinement_points(&dz, &levels, n_branches, opts);
            if new.is_empty() {
                break;
            }
            let new_levels = evaluate(model, &new, n_branches)?;
            refined_points += new.len();
            let mut merged: Vec<(f64, Vec<Level>)> = dz.into_iter().zip(levels).chain(new.into_iter().zip(new_levels)).collect();
            merged.sort_by(|a, b| a.0.total_cmp(&b.0));
            (dz, levels) = merged.into_iter().unzip();
        }
    }

    select_by_continuity(&dz, &mut levels);

    let mut converged: Vec<bool> = levels.iter().map(|l| l.iter().all(|v| v.energy.is_finite())).collect();
    let mut max_shift = None;
    if opts.check_convergence {
        if let Some(big) = model.enlarged()? {
            let mut reference = evaluate(big.as_ref(), &dz, n_branches)?;
            select_by_continuity(&dz, &mut reference);
            let mut worst: f64 = 0.0;
            for (i, (small, large)) in levels.iter().zip(&reference).enumerate() {
                let shift = small.iter().zip(large).map(|(s, l)| (s.energy - l.energy).abs()).fold(0.0, f64::max);
                if shift.is_finite() {
                    worst = worst.max(shift);
                }
                converged[i] &= shift <= CONVERGENCE_TOL;
            }
            if worst > CONVERGENCE_TOL {
                log::warn!(
                    "{} spectrum moved by {worst:.3e} under basis enlargement (tolerance {CONVERGENCE_TOL:e})",
                    model.tag().as_str()
                );
            }
            max_shift = Some(worst);
        }
    }

    let diabatic = if opts.track_diabatic { diabatic_labels(model, &dz, n_branches)? } else { None };

    let mut continuity: f64 = 0.0;
    for w in 0..dz.len().saturating_sub(1) {
        let h = dz[w + 1] - dz[w];
        for b in 0..n_branches {
            let jump = (levels[w + 1][b].energy - levels[w][b].energy).abs() / h;
            if jump.is_finite() {
                continuity = continuity.max(jump);
            }
        }
    }
    let branches = (0..n_branches)
        .map(|b| Branch {
            index: b,
            points: dz
                .iter()
                .zip(&levels)
                .zip(&converged)
                .map(|((&d, lv), &ok)| BranchPoint {
                    dz: d,
                    energy: lv[b].energy,
                    interaction: lv[b].interaction,
                    converged: ok,
                    ambiguous: lv[b].ambiguous,
                    alternatives: lv[b].alternatives.clone(),
                })
                .collect(),
        })
        .collect();
    Ok(SpectrumResult {
        model: model.tag(),
        parameters: model.describe(),
        gap_minima: gap_minima(&dz, &levels, n_branches),
        grid: dz,
        branches,
        diagnostics: Diagnostics {
            max_enlargement_shift: max_shift,
            tolerance: CONVERGENCE_TOL,
            converged: converged.iter().all(|&c| c),
            continuity_constant: continuity,
            refined_points,
        },
        diabatic,
    })
}

fn diabatic_labels(model: &dyn LevelModel, dz: &[f64], count: usize) -> Result<Option<Vec<Vec<usize>>>> {
    let vecs: Option<Vec<Result<DMatrix<f64>>>> = dz.par_iter().map(|&d| model.eigenvectors(d, count)).collect();
    let Some(vecs) = vecs else { return Ok(None) };
    let vecs: Vec<DMatrix<f64>> = vecs.into_iter().collect::<Result<_>>()?;
    let labels = vecs
        .windows(2)
        .map(|w| {
            let overlap = w[0].transpose() * &w[1];
            (0..count)
                .map(|j| {
                    (0..count)
                        .max_by(|&p, &q| overlap[(p, j)].abs().total_cmp(&overlap[(q, j)].abs()))
                        .unwrap_or(j)
                })
                .collect()
        })
        .collect();
    Ok(Some(labels))
}

/// Fixed-a sweep with the given basis.
pub fn spectrum_sweep(a: f64, grid: &SeparationGrid, spec: BasisSpec, n_branches: usize, opts: &SweepOptions) -> Result<SpectrumResult> {
    sweep(&FixedA::from_length(a, spec)?, grid, n_branches, opts)
}
