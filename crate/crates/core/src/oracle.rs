//! Reference spectra for a step well in the displaced trap, free of any
//! pseudopotential.
//!
//! Each partial wave `l` is expanded in oscillator functions of length `b`
//! (`R_nl(r/b) / b^{3/2}`), diagonalised exactly at zero separation, and the
//! lowest `keep` eigenvectors per wave form the basis in which the dipole
//! coupling `-dz z` is diagonalised. Numerov shooting gives an independent
//! check of the spherically symmetric problem.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::eigen::{sym_eig, sym_eigenvalues};
use crate::numerics::quadrature::gauss_legendre_nodes;
use crate::scattering::StepWell;
use crate::spectrum::{Level, LevelModel, Model};
use crate::trap_basis::oscillator::dipole_element;
use crate::{Error, Result};

/// Gauss-Legendre order for the well integrals on `[0, R]`.
pub const WELL_QUADRATURE_ORDER: usize = 240;

/// Truncation and scaling of the oracle basis, `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCutoffs {
    /// Radial functions per partial wave are `n = 0..=n_max`.
    pub n_max: usize,
    pub l_max: usize,
    /// Oscillator length of the radial functions, in units of `z0`.
    pub length: f64,
    /// Zero-separation eigenstates kept per partial wave; `None` keeps all.
    #[serde(default)]
    pub keep: Option<usize>,
}

impl Default for OracleCutoffs {
    fn default() -> Self {
        OracleCutoffs { n_max: 400, l_max: 20, length: 0.2, keep: Some(20) }
    }
}

impl OracleCutoffs {
    /// Unscaled, uncontracted basis `n <= n_max`, `l <= l_max`.
    pub fn new(n_max: usize, l_max: usize) -> Self {
        OracleCutoffs { n_max, l_max, length: 1.0, keep: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::Invalid(format!("oscillator length must be positive, got {}", self.length)));
        }
        if self.keep == Some(0) {
            return Err(Error::Invalid("keep must be at least 1".into()));
        }
        Ok(())
    }

    /// States carried per partial wave.
    pub fn per_wave(&self) -> usize {
        self.keep.map_or(self.n_max + 1, |k| k.min(self.n_max + 1))
    }

    pub fn dimension(&self) -> usize {
        self.per_wave() * (self.l_max + 1)
    }

    /// Larger basis in every direction, for the convergence check.
    pub fn enlarged(&self) -> Self {
        OracleCutoffs {
            n_max: self.n_max + self.n_max / 4 + 8,
            l_max: self.l_max + 4,
            keep: self.keep.map(|k| k + 8),
            ..*self
        }
    }
}

/// `R_nl(r)` for `n = 0..=n_max` at once, by the normalized Laguerre
/// recurrence.
pub fn ho_radial_all(n_max: usize, l: usize, r: f64) -> Vec<f64> {
    let alpha = l as f64 + 0.5;
    let x = r * r;
    let mut out = Vec::with_capacity(n_max + 1);
    // N_0^2 = 2 / Gamma(l + 3/2)
    let ln_n0 = 0.5 * (2f64.ln() - crate::numerics::gamma::ln_gamma(alpha + 1.0).expect("positive"));
    let p0 = (ln_n0 - 0.5 * x).exp() * r.powi(l as i32);
    out.push(p0);
    if n_max == 0 {
        return out;
    }
    let p1 = (1.0 + alpha - x) * p0 / (1.0 + alpha).sqrt();
    out.push(p1);
    for n in 2..=n_max {
        let nf = n as f64;
        let a = (2.0 * nf - 1.0 + alpha - x) / (nf * (nf + alpha)).sqrt();
        let b = ((nf - 1.0) * (nf - 1.0 + alpha) / (nf * (nf + alpha))).sqrt();
        let p = a * out[n - 1] - b * out[n - 2];
        out.push(p);
    }
    out
}

/// `-V0 int_0^R R_nl R_n'l r^2 dr`, `n, n' <= n_max`, for radial functions
/// of oscillator length `length`, by a fixed Gauss-Legendre rule.
pub fn well_matrix(well: &StepWell, l: usize, n_max: usize, length: f64, order: usize) -> DMatrix<f64> {
    let (x, w) = gauss_legendre_nodes(order);
    let half = 0.5 * well.radius;
    let scale = length.powf(-1.5);
    let mut phi = DMatrix::zeros(order, n_max + 1);
    for (k, (&xi, &wi)) in x.iter().zip(&w).enumerate() {
        let r = half * (xi + 1.0);
        let f = r * (half * wi).sqrt() * scale;
        for (n, v) in ho_radial_all(n_max, l, r / length).into_iter().enumerate() {
            phi[(k, n)] = v * f;
        }
    }
    (phi.transpose() * &phi) * (-well.v0)
}

/// Trap Hamiltonian of one partial wave in the scaled basis, well included.
pub fn wave_hamiltonian(well: &StepWell, l: usize, n_max: usize, length: f64) -> DMatrix<f64> {
    let mut h = well_matrix(well, l, n_max, length, WELL_QUADRATURE_ORDER);
    let b2 = length * length;
    // kinetic part diag(2n+l+3/2)/(2 b^2) plus the remainder of the trap,
    // (1/2 - 1/(2 b^4)) b^2 <r~^2>
    let c = 0.5 * b2 - 0.5 / b2;
    for n in 0..=n_max {
        let e = (2 * n + l) as f64 + 1.5;
        h[(n, n)] += e / b2 + c * e;
        if n > 0 {
            let off = -c * (n as f64 * (n as f64 + l as f64 + 0.5)).sqrt();
            h[(n, n - 1)] += off;
            h[(n - 1, n)] += off;
        }
    }
    h
}

/// One partial wave after zero-separation diagonalisation.
#[derive(Debug, Clone)]
pub struct Wave {
    pub l: usize,
    /// All eigenvalues of the wave, ascending.
    pub energies: Vec<f64>,
    /// The kept eigenvectors, one per column.
    pub vectors: DMatrix<f64>,
}

/// The separation-independent pieces of the oracle Hamiltonian.
#[derive(Debug, Clone)]
pub struct OracleBasis {
    pub well: StepWell,
    pub cutoffs: OracleCutoffs,
    pub waves: Vec<Wave>,
    /// `(l, k)`: `k`-th zero-separation state of wave `l`.
    pub labels: Vec<(usize, usize)>,
    pub energies: Vec<f64>,
    pub dipole: DMatrix<f64>,
}

impl OracleBasis {
    pub fn new(well: StepWell, cutoffs: OracleCutoffs) -> Result<Self> {
        cutoffs.validate()?;
        let keep = cutoffs.per_wave();
        let waves = (0..=cutoffs.l_max)
            .into_par_iter()
            .map(|l| {
                let eig = sym_eig(&wave_hamiltonian(&well, l, cutoffs.n_max, cutoffs.length))?;
                Ok(Wave { l, vectors: eig.vectors.columns(0, keep).into_owned(), energies: eig.values })
            })
            .collect::<Result<Vec<_>>>()?;
        let dim = keep * waves.len();
        let mut labels = Vec::with_capacity(dim);
        let mut energies = Vec::with_capacity(dim);
        for w in &waves {
            for k in 0..keep {
                labels.push((w.l, k));
                energies.push(w.energies[k]);
            }
        }
        let mut dipole = DMatrix::zeros(dim, dim);
        let n = cutoffs.n_max;
        for l in 0..cutoffs.l_max {
            // z from wave l to wave l + 1 in the radial basis is bidiagonal
            let lower = &waves[l].vectors;
            let mut zu = DMatrix::zeros(n + 1, keep);
            for col in 0..keep {
                for up in 0..=n {
                    let mut s = dipole_element(up, up, l) * lower[(up, col)];
                    if up < n {
                        s += dipole_element(up, up + 1, l) * lower[(up + 1, col)];
                    }
                    zu[(up, col)] = s * cutoffs.length;
                }
            }
            let block = waves[l + 1].vectors.transpose() * zu;
            dipole.view_mut(((l + 1) * keep, l * keep), (keep, keep)).copy_from(&block);
            dipole.view_mut((l * keep, (l + 1) * keep), (keep, keep)).copy_from(&block.transpose());
        }
        Ok(OracleBasis { well, cutoffs, waves, labels, energies, dipole })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn hamiltonian(&self, dz: f64) -> DMatrix<f64> {
        let mut h = &self.dipole * (-dz);
        for (i, e) in self.energies.iter().enumerate() {
            h[(i, i)] += e + 0.5 * dz * dz;
        }
        h
    }

    pub fn levels(&self, dz: f64, count: usize) -> Result<Vec<f64>> {
        let mut v = if dz == 0.0 {
            // the waves decouple; every computed eigenvalue is exact for the basis
            let mut all: Vec<f64> = self.waves.iter().flat_map(|w| w.energies.iter().copied()).collect();
            all.sort_by(f64::total_cmp);
            all
        } else {
            sym_eigenvalues(&self.hamiltonian(dz))?
        };
        v.truncate(count);
        Ok(v)
    }
}
/// Lowest `n_eigen` levels of the exact Hamiltonian at `dz`.
pub fn exact_spectrum(well: StepWell, dz: f64, cutoffs: OracleCutoffs, n_eigen: usize) -> Result<Vec<f64>> {
    OracleBasis::new(well, cutoffs)?.levels(dz, n_eigen)
}

/// Oracle as a sweepable model.
#[derive(Debug, Clone)]
pub struct ExactModel {
    pub basis: Arc<OracleBasis>,
}

impl ExactModel {
    pub fn new(well: StepWell, cutoffs: OracleCutoffs) -> Result<Self> {
        Ok(ExactModel { basis: Arc::new(OracleBasis::new(well, cutoffs)?) })
    }
}

impl LevelModel for ExactModel {
    fn tag(&self) -> Model {
        Model::Oracle
    }

    fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "well": self.basis.well,
            "cutoffs": self.basis.cutoffs,
            "dimension": self.basis.dim(),
            "per_wave_radial": self.basis.cutoffs.n_max + 1,
            "well_quadrature_order": WELL_QUADRATURE_ORDER,
        })
    }

    fn dimension(&self) -> usize {
        self.basis.dim()
    }

    fn levels(&self, dz: f64, count: usize) -> Result<Vec<Level>> {
        Ok(self.basis.levels(dz, count)?.into_iter().map(|e| Level::plain(e, None)).collect())
    }

    fn enlarged(&self) -> Result<Option<Box<dyn LevelModel>>> {
        Ok(Some(Box::new(ExactModel::new(self.basis.well, self.basis.cutoffs.enlarged())?)))
    }

    fn eigenvectors(&self, dz: f64, count: usize) -> Option<Result<DMatrix<f64>>> {
        Some(sym_eig(&self.basis.hamiltonian(dz)).map(|r| r.vectors.columns(0, count).into_owned()))
    }
}

/// Numerov settings for [`radial_numerov`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumerovOptions {
    /// Grid points inside the well on the coarsest grid.
    pub steps_in_well: usize,
    /// Number of grid halvings combined by Richardson extrapolation.
    pub levels: usize,
    pub r_max: f64,
    pub energy_tol: f64,
}

impl Default for NumerovOptions {
    fn default() -> Self {
        NumerovOptions { steps_in_well: 200, levels: 3, r_max: 10.0, energy_tol: 1e-13 }
    }
}

// Nodes of the outward Numerov solution of
// u'' = 2 (V_eff - E) u on (0, r_max), with V at r = R averaged.
fn numerov_nodes(well: &StepWell, l: usize, e: f64, h: f64, n_steps: usize) -> usize {
    let ll = (l * (l + 1)) as f64;
    let r_idx = (well.radius / h).round() as usize;
    let k = |i: usize| -> f64 {
        let r = i as f64 * h;
        let v_well = if i < r_idx {
            -well.v0
        } else if i == r_idx {
            -0.5 * well.v0
        } else {
            0.0
        };
        2.0 * (e - (0.5 * r * r + v_well + 0.5 * ll / (r * r)))
    };
    let c = h * h / 12.0;
    // u(0) = 0 and the regular r^{l+1} start
    let mut u_prev = 0.0_f64;
    let mut u = h.powi(l as i32 + 1);
    let mut k_prev = 0.0;
    let mut k_cur = k(1);
    let mut nodes = 0;
    for i in 1..n_steps {
        let k_next = k(i + 1);
        let prev_term = if i == 1 { 0.0 } else { u_prev * (1.0 + c * k_prev) };
        let u_next = (2.0 * u * (1.0 - 5.0 * c * k_cur) - prev_term) / (1.0 + c * k_next);
        if u_next == 0.0 || u_next.signum() != u.signum() {
            nodes += 1;
        }
        u_prev = u;
        u = u_next;
        k_prev = k_cur;
        k_cur = k_next;
        if u.abs() > 1e250 {
            u_prev *= 1e-250;
            u *= 1e-250;
        }
    }
    nodes
}

fn numerov_level(well: &StepWell, l: usize, index: usize, lo: f64, hi: f64, steps_in_well: usize, opts: &NumerovOptions) -> f64 {
    let h = well.radius / steps_in_well as f64;
    let n_steps = (opts.r_max / h).ceil() as usize;
    let (mut a, mut b) = (lo, hi);
    while b - a > opts.energy_tol * (1.0 + a.abs().max(b.abs())) {
        let m = 0.5 * (a + b);
        if numerov_nodes(well, l, m, h, n_steps) > index {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenvalues of partial wave `l` at zero separation inside
/// `(window.0, window.1)`, by node counting and bisection on Numerov grids
/// with `h, h/2, ...`, Richardson-extrapolated in `h^2`.
pub fn radial_numerov(well: &StepWell, l: usize, window: (f64, f64), opts: &NumerovOptions) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::Invalid(format!("empty energy window ({lo}, {hi})")));
    }
    if well.v0 > 0.0 && lo <= -well.v0 {
        return Err(Error::Invalid(format!("window must start above -V0 = {}", -well.v0)));
    }
    let coarse_h = well.radius / opts.steps_in_well as f64;
    let n_steps = (opts.r_max / coarse_h).ceil() as usize;
    let n_lo = numerov_nodes(well, l, lo, coarse_h, n_steps);
    let n_hi = numerov_nodes(well, l, hi, coarse_h, n_steps);
    if n_hi <= n_lo {
        return Err(Error::Invalid(format!("no l = {l} level in window ({lo}, {hi})")));
    }
    let levels = opts.levels.max(1);
    let mut out = Vec::with_capacity(n_hi - n_lo);
    for index in n_lo..n_hi {
        // widen the bracket slightly so finer grids cannot push the root out
        let span = hi - lo;
        let mut estimates: Vec<f64> = (0..levels)
            .map(|k| numerov_level(well, l, index, lo - 0.05 * span, hi + 0.05 * span, opts.steps_in_well << k, opts))
            .collect();
        // Richardson table for errors in h^2, h^4, ...
        for order in 1..levels {
            let factor = 4f64.powi(order as i32);
            estimates = estimates.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        }
        out.push(estimates[0]);
    }
    Ok(out)
}

/// Sweeps the oracle over separations in parallel.
pub fn exact_levels_over(basis: &OracleBasis, dz: &[f64], count: usize) -> Result<Vec<Vec<f64>>> {
    dz.par_iter().map(|&d| basis.levels(d, count)).collect()
}
