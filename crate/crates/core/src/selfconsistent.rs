//! Levels with an energy-dependent scattering length.
//!
//! At separation `dz` a level `E` must satisfy `E = lambda_j(c(E_K), dz)` with
//! `E_K = E - dz^2/2` and `c = 1/a_eff(E_K)`. Roots of
//! `g_j(E) = lambda_j - E` are bracketed on a fixed energy scan around the
//! fixed-`a(0)` levels and polished with Brent's method.

use std::cell::Cell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::numerics::roots::{solve_bracketed_root_with, RootOptions};
use crate::scattering::ScatteringModel;
use crate::spectrum::{fixed_a_levels, FixedA, Level, LevelModel, Model, ENLARGEMENT_STEP};
use crate::trap_basis::{BasisSpec, TrapBasis};
use crate::{Error, Result};

/// Root-search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Energy step of the bracketing scan.
    pub scan_step: f64,
    /// Half-width of the search window around each fixed-`a(0)` level.
    pub window: f64,
    pub xtol: f64,
    /// Largest accepted `|g(E)|`; larger values mark a jump, not a root.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { scan_step: 0.05, window: 2.0, xtol: 1e-12, residual_tol: 1e-8 }
    }
}

/// One root of `g_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfConsistentSolution {
    pub branch: usize,
    pub dz: f64,
    pub energy: f64,
    /// `a_eff(E_K)` at the solution.
    pub a_eff: f64,
    pub e_k: f64,
    pub residual: f64,
    /// Function evaluations spent polishing the bracket.
    pub iterations: usize,
    /// Several roots of `g_j` were found in the window.
    pub ambiguous: bool,
}

const CACHE_CAPACITY: usize = 512;

/// Zero-separation bases keyed on the exact bits of `c`. The basis is a
/// pure function of `(c, spec)`, so hits and evictions never change results.
#[derive(Debug)]
pub struct BasisCache {
    spec: BasisSpec,
    map: Mutex<HashMap<u64, Arc<TrapBasis>>>,
}

impl BasisCache {
    pub fn new(spec: BasisSpec) -> Self {
        BasisCache { spec, map: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, c: f64) -> Result<Arc<TrapBasis>> {
        // +0 and -0 are the same interaction
        let key = if c == 0.0 { 0u64 } else { c.to_bits() };
        if let Some(b) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(TrapBasis::new(c, self.spec)?);
        let mut map = self.map.lock().expect("cache lock");
        if map.len() >= CACHE_CAPACITY {
            map.clear();
        }
        map.insert(key, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Self-consistent pseudopotential model for a given scattering model.
pub struct SelfConsistent {
    pub scattering: Arc<dyn ScatteringModel>,
    pub spec: BasisSpec,
    pub options: SolverOptions,
    /// Fixed-`a(0)` model providing the search windows.
    reference: FixedA,
    cache: BasisCache,
}

impl std::fmt::Debug for SelfConsistent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SelfConsistent").field("spec", &self.spec).field("options", &self.options).finish()
    }
}

impl SelfConsistent {
    pub fn new(scattering: Arc<dyn ScatteringModel>, spec: BasisSpec, options: SolverOptions) -> Result<Self> {
        if !(options.scan_step > 0.0) || !(options.window > 0.0) {
            return Err(Error::Invalid(format!("bad solver options {options:?}")));
        }
        let c0 = scattering.inverse_aeff(0.0)?;
        Ok(SelfConsistent {
            reference: FixedA::new(c0, spec)?,
            cache: BasisCache::new(spec),
            scattering,
            spec,
            options,
        })
    }

    pub fn cache(&self) -> &BasisCache {
        &self.cache
    }

    /// `c(E_K)` and the lowest `count` eigenvalues of the fixed-c Hamiltonian.
    pub fn levels_at_energy(&self, e: f64, dz: f64, count: usize) -> Result<(f64, Vec<f64>)> {
        let c = self.scattering.inverse_aeff(e - 0.5 * dz * dz)?;
        let basis = self.cache.get(c)?;
        Ok((c, fixed_a_levels(&basis, dz, count)?))
    }

    /// The fixed-`a(0)` levels that centre the search windows.
    pub fn seeds(&self, dz: f64, count: usize) -> Result<Vec<f64>> {
        fixed_a_levels(&self.reference.basis, dz, count)
    }

    fn lowest_energy(&self, dz: f64) -> f64 {
        let m = self.scattering.min_energy();
        if m.is_finite() {
            // stay strictly inside the domain, one scan step clear of the edge
            m + 0.5 * dz * dz + self.options.scan_step.min(1e-6)
        } else {
            f64::NEG_INFINITY
        }
    }

    /// All roots of `g_j` for `j < count`, each in its own window.
    pub fn solve_point(&self, dz: f64, count: usize) -> Result<Vec<Vec<SelfConsistentSolution>>> {
        let seeds = self.seeds(dz, count)?;
        let floor = self.lowest_energy(dz);
        let step = self.options.scan_step;
        // shared scan over the union of windows, on a grid anchored at 0
        let lo = (seeds[0] - self.options.window).max(floor);
        let hi = seeds[count - 1] + self.options.window;
        let i0 = (lo / step).ceil() as i64;
        let i1 = (hi / step).floor() as i64;
        let mut scan: Vec<(f64, Vec<f64>)> = Vec::with_capacity((i1 - i0 + 1).max(0) as usize);
        for i in i0..=i1 {
            let e = i as f64 * step;
            let (_, lam) = self.levels_at_energy(e, dz, count)?;
            scan.push((e, lam));
        }
        (0..count).map(|j| self.roots_from_scan(dz, j, seeds[j], &scan)).collect()
    }

    fn roots_from_scan(&self, dz: f64, j: usize, seed: f64, scan: &[(f64, Vec<f64>)]) -> Result<Vec<SelfConsistentSolution>> {
        let (wlo, whi) = (seed - self.options.window, seed + self.options.window);
        let pts: Vec<(f64, f64)> =
            scan.iter().filter(|(e, _)| *e >= wlo && *e <= whi).map(|(e, lam)| (*e, lam[j] - e)).collect();
        let mut roots = Vec::new();
        for w in pts.windows(2) {
            let ((e0, g0), (e1, g1)) = (w[0], w[1]);
            if g0 == 0.0 {
                roots.push(self.finish(dz, j, e0, 0)?);
                continue;
            }
            if g0.signum() == g1.signum() || g1 == 0.0 {
                continue;
            }
            if let Some(sol) = self.polish(dz, j, e0, e1)? {
                roots.push(sol);
            }
        }
        if let Some(&(e, g)) = pts.last() {
            if g == 0.0 {
                roots.push(self.finish(dz, j, e, 0)?);
            }
        }
        let ambiguous = roots.len() > 1;
        for r in &mut roots {
            r.ambiguous = ambiguous;
        }
        if roots.is_empty() {
            return Err(Error::NoRoot { lo: wlo, hi: whi, dz, scan: pts });
        }
        Ok(roots)
    }

    fn polish(&self, dz: f64, j: usize, lo: f64, hi: f64) -> Result<Option<SelfConsistentSolution>> {
        let evals = Cell::new(0usize);
        let failure = Cell::new(None);
        let g = |e: f64| {
            evals.set(evals.get() + 1);
            match self.levels_at_energy(e, dz, j + 1) {
                Ok((_, lam)) => lam[j] - e,
                Err(err) => {
                    failure.set(Some(err.to_string()));
                    f64::NAN
                }
            }
        };
        let root = solve_bracketed_root_with(g, lo, hi, RootOptions { xtol: self.options.xtol, max_iter: 200 });
        if let Some(msg) = failure.take() {
            return Err(Error::Domain(msg));
        }
        let sol = self.finish(dz, j, root?, evals.get())?;
        if sol.residual > self.options.residual_tol {
            // a jump of lambda_j (bound level appearing at a_eff = 0), not a root
            log::debug!("discarding jump of branch {j} at E = {} (dz = {dz})", sol.energy);
            return Ok(None);
        }
        Ok(Some(sol))
    }

    fn finish(&self, dz: f64, j: usize, e: f64, iterations: usize) -> Result<SelfConsistentSolution> {
        let (c, lam) = self.levels_at_energy(e, dz, j + 1)?;
        Ok(SelfConsistentSolution {
            branch: j,
            dz,
            energy: e,
            a_eff: if c == 0.0 { f64::INFINITY } else { 1.0 / c },
            e_k: e - 0.5 * dz * dz,
            residual: (lam[j] - e).abs(),
            iterations,
            ambiguous: false,
        })
    }

    /// Roots of `g_branch` in a window centred on `seed`.
    pub fn solve_branch(&self, dz: f64, branch: usize, seed: f64) -> Result<Vec<SelfConsistentSolution>> {
        let step = self.options.scan_step;
        let lo = (seed - self.options.window).max(self.lowest_energy(dz));
        let hi = seed + self.options.window;
        let mut scan = Vec::new();
        for i in ((lo / step).ceil() as i64)..=((hi / step).floor() as i64) {
            let e = i as f64 * step;
            scan.push((e, self.levels_at_energy(e, dz, branch + 1)?.1));
        }
        self.roots_from_scan(dz, branch, seed, &scan)
    }
}

/// The root of branch `branch` closest to `seed`, flagged when not unique.
pub fn self_consistent_energy(
    scattering: Arc<dyn ScatteringModel>,
    dz: f64,
    branch: usize,
    spec: BasisSpec,
    seed: f64,
) -> Result<SelfConsistentSolution> {
    let model = SelfConsistent::new(scattering, spec, SolverOptions::default())?;
    let roots = model.solve_branch(dz, branch, seed)?;
    Ok(nearest(&roots, seed))
}

fn nearest(roots: &[SelfConsistentSolution], target: f64) -> SelfConsistentSolution {
    *roots
        .iter()
        .min_by(|a, b| (a.energy - target).abs().total_cmp(&(b.energy - target).abs()))
        .expect("non-empty root list")
}

impl LevelModel for SelfConsistent {
    fn tag(&self) -> Model {
        Model::SelfConsistent
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "a0": 1.0 / self.reference.basis.inverse_a,
            "basis": self.spec,
            "dimension": self.spec.dimension(),
            "solver": self.options,
        })
    }

    fn dimension(&self) -> usize {
        self.spec.dimension()
    }

    fn levels(&self, dz: f64, count: usize) -> Result<Vec<Level>> {
        let seeds = self.seeds(dz, count)?;
        let all = self.solve_point_lenient(dz, count)?;
        Ok(all
            .into_iter()
            .zip(seeds)
            .map(|(roots, seed)| {
                if roots.is_empty() {
                    return Level::missing();
                }
                let best = nearest(&roots, seed);
                Level {
                    energy: best.energy,
                    interaction: Some(best.a_eff),
                    ambiguous: best.ambiguous,
                    alternatives: roots
                        .iter()
                        .filter(|r| r.energy != best.energy)
                        .map(|r| (r.energy, Some(r.a_eff)))
                        .collect(),
                }
            })
            .collect())
    }

    fn enlarged(&self) -> Result<Option<Box<dyn LevelModel>>> {
        Ok(Some(Box::new(SelfConsistent::new(
            Arc::clone(&self.scattering),
            self.spec.enlarged(ENLARGEMENT_STEP),
            self.options,
        )?)))
    }
}

impl SelfConsistent {
    // Like solve_point, but a branch without roots yields an empty list.
    fn solve_point_lenient(&self, dz: f64, count: usize) -> Result<Vec<Vec<SelfConsistentSolution>>> {
        match self.solve_point(dz, count) {
            Ok(v) => Ok(v),
            Err(Error::NoRoot { .. }) => {
                let seeds = self.seeds(dz, count)?;
                Ok((0..count)
                    .map(|j| match self.solve_branch(dz, j, seeds[j]) {
                        Ok(r) => r,
                        Err(e) => {
                            log::warn!("self-consistent branch {j} has no root at dz = {dz}: {e}");
                            Vec::new()
                        }
                    })
                    .collect())
            }
            Err(e) => Err(e),
        }
    }
}

/// Self-consistent sweep; same output schema as the fixed-a sweep.
pub fn sweep_self_consistent(
    scattering: Arc<dyn ScatteringModel>,
    grid: &crate::spectrum::SeparationGrid,
    spec: BasisSpec,
    n_branches: usize,
    sweep_options: &crate::spectrum::SweepOptions,
) -> Result<crate::spectrum::SpectrumResult> {
    let model = SelfConsistent::new(scattering, spec, SolverOptions::default())?;
    crate::spectrum::sweep(&model, grid, n_branches, sweep_options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{ConstantScatteringLength, StepWell};

    #[test]
    fn free_limit() {
        let m = SelfConsistent::new(Arc::new(StepWell::new(0.0, 0.2).unwrap()), BasisSpec::default(), SolverOptions::default()).unwrap();
        let free = TrapBasis::new(f64::INFINITY, BasisSpec::default()).unwrap();
        for dz in [0.0, 1.0, 2.0] {
            let lv = m.levels(dz, 1).unwrap();
            assert!((lv[0].energy - 1.5).abs() < 1e-4, "dz={dz}: {}", lv[0].energy);
            assert!((lv[0].energy - fixed_a_levels(&free, dz, 1).unwrap()[0]).abs() < 1e-12);
        }
        let lv = m.levels(0.0, 1).unwrap();
        assert_eq!(lv[0].energy, 1.5);
    }

    #[test]
    fn constant_model_reproduces_fixed_a() {
        let spec = BasisSpec::new(5, 3, 4);
        let c = 0.7;
        let m = SelfConsistent::new(Arc::new(ConstantScatteringLength { inverse: c }), spec, SolverOptions::default()).unwrap();
        let b = TrapBasis::new(c, spec).unwrap();
        for dz in [0.0, 0.8, 1.9] {
            let sc = m.levels(dz, 3).unwrap();
            let fa = fixed_a_levels(&b, dz, 3).unwrap();
            for (s, f) in sc.iter().zip(&fa) {
                assert!((s.energy - f).abs() < 1e-12, "dz={dz}: {} vs {f}", s.energy);
            }
        }
    }

    #[test]
    fn cache_is_bounded_and_keyed_exactly() {
        let cache = BasisCache::new(BasisSpec::new(2, 1, 1));
        let a = cache.get(1.0).unwrap();
        let b = cache.get(1.0).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = cache.get(1.0 + f64::EPSILON).unwrap();
        assert!(!Arc::ptr_eq(&a, &c));
        for i in 0..(CACHE_CAPACITY + 3) {
            cache.get(2.0 + i as f64).unwrap();
        }
        assert!(cache.len() <= CACHE_CAPACITY);
    }
}
