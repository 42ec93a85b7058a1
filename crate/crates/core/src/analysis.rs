//! Resonance characterisation: located avoided crossings, the closed-form
//! resonance estimate, a two-state variational gap, first-order shifts and
//! the two-level gate timing.

use std::f64::consts::PI;

use serde::Serialize;

use crate::numerics::quadrature::QuadratureRule;
use crate::numerics::roots::minimize_golden;
use crate::spectrum::{LevelModel, SpectrumResult};
use crate::trap_basis::{busch_energies, BuschState, StateKind};
use crate::{Error, Result};

/// `sqrt(3 + 1/a^2)`.
pub fn estimate_resonance_dz(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("resonance estimate needs a > 0, got {a}")));
    }
    Ok((3.0 + 1.0 / (a * a)).sqrt())
}

/// A located avoided crossing between branches `lower` and `upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingInfo {
    pub dz_res: f64,
    pub gap: f64,
    pub lower: usize,
    pub upper: usize,
    /// `d^2 gap / d dz^2` at the minimum.
    pub curvature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingOptions {
    pub dz_tol: f64,
    pub gap_tol: f64,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions { dz_tol: 1e-6, gap_tol: 1e-8 }
    }
}

fn gap_at(model: &dyn LevelModel, dz: f64, lower: usize) -> Result<f64> {
    let lv = model.levels(dz, lower + 2)?;
    match (lv.get(lower), lv.get(lower + 1)) {
        (Some(a), Some(b)) if a.energy.is_finite() && b.energy.is_finite() => Ok(b.energy - a.energy),
        _ => Err(Error::Invalid(format!("branches {lower}, {} unavailable at dz = {dz}", lower + 1))),
    }
}

/// Overlap below which a gap minimum is not counted as a crossing.
pub const EXCHANGE_OVERLAP: f64 = 0.5;

// |<lower(dz - w)|upper(dz + w)>|: near one when the two branches swap
// character across the minimum, near zero for a mere dip in the gap.
fn character_exchange(model: &dyn LevelModel, dz: f64, w: f64, lower: usize) -> Option<Result<f64>> {
    let left = model.eigenvectors(dz - w, lower + 2)?;
    let right = model.eigenvectors(dz + w, lower + 2)?;
    Some(left.and_then(|l| right.map(|r| l.column(lower).dot(&r.column(lower + 1)).abs())))
}

/// Refines the smallest interior grid minimum of the gap between `lower`
/// and `lower + 1` by golden section on `model`, then by one parabolic step
/// on `gap^2`, which is exact for a hyperbolic crossing. Minima across
/// which the branches do not exchange character are rejected when the model
/// exposes eigenvectors.
pub fn locate_avoided_crossing(
    model: &dyn LevelModel,
    result: &SpectrumResult,
    lower: usize,
    opts: CrossingOptions,
) -> Result<CrossingInfo> {
    let upper = lower + 1;
    if upper >= result.branches.len() {
        return Err(Error::Invalid(format!("sweep has {} branches, need {}", result.branches.len(), upper + 1)));
    }
    let (lo_e, hi_e) = (result.energies(lower), result.energies(upper));
    let gap: Vec<f64> = lo_e.iter().zip(&hi_e).map(|(a, b)| b - a).collect();
    let grid = &result.grid;
    let mut best: Option<usize> = None;
    for i in 1..grid.len().saturating_sub(1) {
        let (l, m, r) = (gap[i - 1], gap[i], gap[i + 1]);
        if m.is_finite() && l.is_finite() && r.is_finite() && m <= l && m < r && best.is_none_or(|b| m < gap[b]) {
            best = Some(i);
        }
    }
    let Some(i) = best else {
        return Err(Error::NoCrossing { lower, upper });
    };
    let mut failure = None;
    let mut g = |x: f64| match gap_at(model, x, lower) {
        Ok(v) => v * v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::INFINITY
        }
    };
    let (x0, _) = minimize_golden(&mut g, grid[i - 1], grid[i + 1], opts.dz_tol);
    let q0 = g(x0);
    let h = opts.dz_tol.max(1e-3 * q0.sqrt().min(1.0));
    let (qm, qp) = (g(x0 - h), g(x0 + h));
    if let Some(e) = failure {
        return Err(e);
    }
    let a2 = (qp + qm - 2.0 * q0) / (2.0 * h * h);
    let b1 = (qp - qm) / (2.0 * h);
    let shift = if a2 > 0.0 { (-b1 / (2.0 * a2)).clamp(-h, h) } else { 0.0 };
    let polished = x0 + shift;
    let g_polished = gap_at(model, polished, lower)?;
    let (dz_res, gap) = if g_polished <= q0.sqrt() { (polished, g_polished) } else { (x0, q0.sqrt()) };
    let fitted = (q0 - b1 * b1 / (4.0 * a2)).max(0.0).sqrt();
    if a2 > 0.0 && (gap - fitted).abs() > opts.gap_tol {
        log::warn!("gap {gap} at dz = {dz_res} departs from the hyperbolic fit {fitted}");
    }
    if !(gap > 0.0) {
        return Err(Error::NoCrossing { lower, upper });
    }
    if a2 > 0.0 {
        if let Some(overlap) = character_exchange(model, dz_res, 2.0 * gap / a2.sqrt(), lower) {
            if overlap? < EXCHANGE_OVERLAP {
                return Err(Error::NoCrossing { lower, upper });
            }
        }
    }
    Ok(CrossingInfo { dz_res, gap, lower, upper, curvature: a2 / gap })
}

/// Both variational levels and their splitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationalGap {
    pub dz: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub overlap: f64,
}

/// `1 - S^2` below which the two trial states count as linearly dependent.
pub const OVERLAP_SINGULARITY: f64 = 1e-10;

// e^{-(r^2+d^2)/2} sinh(x)/x and e^{-(r^2+d^2)/2} i1(x), x = r d, without overflow.
fn shifted_bessels(r: f64, d: f64) -> (f64, f64) {
    let x = r * d;
    if x < 1e-3 {
        let env = (-0.5 * (r * r + d * d)).exp();
        let x2 = x * x;
        return (env * (1.0 + x2 / 6.0), env * x * (1.0 / 3.0 + x2 / 30.0));
    }
    let env = (-0.5 * (r - d) * (r - d)).exp();
    let t = (-2.0 * x).exp();
    let i0 = (1.0 - t) / (2.0 * x);
    let i1 = (1.0 + t) / (2.0 * x) - (1.0 - t) / (2.0 * x * x);
    (env * i0, env * i1)
}

/// `<g|b>` and `<g|z|b>` for the displaced trap ground state `g` and the
/// zero-separation bound state `b`.
pub fn displaced_overlaps(bound: &BuschState, dz: f64) -> Result<(f64, f64)> {
    let pref = 4.0 * PI * PI.powf(-0.75);
    let hi = dz.abs() + 14.0;
    let d = dz.abs();
    let integrand = |r: f64, power: i32, pick: fn((f64, f64)) -> f64| {
        bound.r_psi(r).map_or(f64::NAN, |rp| rp * r.powi(power) * pick(shifted_bessels(r, d)))
    };
    let rule = QuadratureRule::adaptive(1e-13, 1e-11);
    let s = rule.integrate(|r| integrand(r, 1, |p| p.0), 0.0, hi)?;
    let z = rule.integrate(|r| integrand(r, 2, |p| p.1), 0.0, hi)?;
    if !(s.is_finite() && z.is_finite()) {
        return Err(Error::Domain(format!("bound-state overlap not finite at dz = {dz}")));
    }
    Ok((pref * s, pref * z * dz.signum()))
}

/// Rayleigh-Ritz in the pair {bound state at the origin, displaced trap
/// ground state}. The regular trial state sees no contact term.
pub fn variational_gap(a: f64, dz: f64) -> Result<VariationalGap> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("variational gap needs a bound state, a > 0, got {a}")));
    }
    let bound = busch_energies(1.0 / a, 1)?[0];
    debug_assert_eq!(bound.kind, StateKind::Bound);
    variational_gap_for(&bound, dz)
}

/// [`variational_gap`] for an arbitrary zero-separation s-state.
pub fn variational_gap_for(bound: &BuschState, dz: f64) -> Result<VariationalGap> {
    let (s, z) = displaced_overlaps(bound, dz)?;
    let det = 1.0 - s * s;
    if det < OVERLAP_SINGULARITY {
        return Err(Error::SingularOverlap(det));
    }
    let hgg = 1.5;
    let hbb = bound.energy + 0.5 * dz * dz;
    let hgb = hbb * s - dz * z;
    let p = hgg + hbb - 2.0 * s * hgb;
    let q = hgg * hbb - hgb * hgb;
    let disc = (p * p - 4.0 * det * q).max(0.0).sqrt();
    let (lower, upper) = ((p - disc) / (2.0 * det), (p + disc) / (2.0 * det));
    Ok(VariationalGap { dz, lower, upper, gap: upper - lower, overlap: s })
}

/// Smallest variational gap over `dz` in `[lo, hi]`.
pub fn variational_gap_minimum(a: f64, lo: f64, hi: f64, xtol: f64) -> Result<VariationalGap> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("variational gap needs a > 0, got {a}")));
    }
    let bound = busch_energies(1.0 / a, 1)?[0];
    let mut failure = None;
    let (x, _) = minimize_golden(
        |d| match variational_gap_for(&bound, d) {
            Ok(v) => v.gap,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        lo,
        hi,
        xtol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    variational_gap_for(&bound, x)
}

/// First-order shift `(2/sqrt(pi)) a e^{-dz^2}` of the trap ground state.
pub fn perturbative_shift(a: f64, dz: f64) -> f64 {
    2.0 / PI.sqrt() * a * (-dz * dz).exp()
}

/// Full Rabi cycle of a resonant two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateTiming {
    pub period: f64,
    pub phase: f64,
}

pub fn gate_phase_time(gap: f64) -> Result<GateTiming> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("gate timing needs a positive gap, got {gap}")));
    }
    Ok(GateTiming { period: 2.0 * PI / gap, phase: PI })
}

pub const ANALYSIS_CSV_HEADER: [&str; 5] = ["a", "dz_res_estimate", "dz_res_located", "gap", "gap_variational"];

/// One line of the resonance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRow {
    pub a: f64,
    pub dz_res_estimate: f64,
    pub dz_res_located: f64,
    pub gap: f64,
    pub gap_variational: f64,
}

impl ResonanceRow {
    pub fn csv_row(&self) -> Vec<String> {
        use crate::output::fmt;
        vec![fmt(self.a), fmt(self.dz_res_estimate), fmt(self.dz_res_located), fmt(self.gap), fmt(self.gap_variational)]
    }
}
