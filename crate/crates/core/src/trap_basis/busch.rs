//! s-wave eigenstates of the centred trap with a contact interaction of
//! fixed scattering length `a = 1/c`.
//!
//! With `alpha = 3/4 - E/2` the decaying solution is
//! `e^{-r^2/2} U(alpha, 3/2, r^2)`; its small-`r` form `A/r + B` meets the
//! contact boundary condition `B/A = -c` exactly when
//!
//! ```text
//! f(E) = 2 Gamma(3/4 - E/2) / Gamma(1/4 - E/2) = c.
//! ```
//!
//! `f` decreases monotonically between consecutive poles `2k - 1/2` and
//! `2k + 3/2`, so root `k` lives in that window (`k = 0` window unbounded
//! below). Each eigenstate equals the trap Green's function
//! `G(r) = sum_n phi_n(0) phi_n(r) / (E_n - E)` up to normalisation, which
//! gives the closed form `||G||^2 = -f'(E) / (2 pi)` used for the norm.

use std::f64::consts::PI;

use serde::Serialize;

use super::oscillator::{ho_energy, ho_radial};
use crate::numerics::gamma::{digamma, gamma_real, ln_gamma, rgamma, rgamma_deriv};
use crate::numerics::hypergeometric::{tricomi_u, tricomi_u_half};
use crate::numerics::roots::{solve_bracketed_root_with, RootOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// The extra level that exists for `a > 0` and dives to `-1/(2a^2)`.
    Bound,
    TrapLike,
}

/// One s-wave eigenstate at zero trap separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuschState {
    pub index: usize,
    /// `c = 1/a` the state was built for.
    pub inverse_a: f64,
    pub energy: f64,
    /// `E/2 - 3/4`.
    pub nu: f64,
    /// `||G||` for the Green's-function normalisation; infinite for the
    /// non-interacting limit, where the state is a plain oscillator state.
    pub norm: f64,
    pub kind: StateKind,
}

/// `f(E) = 2 Gamma(3/4 - E/2) / Gamma(1/4 - E/2)`; infinite at `E = 2k + 3/2`.
pub fn busch_function(e: f64) -> f64 {
    let alpha = 0.75 - 0.5 * e;
    let beta = alpha - 0.5;
    match gamma_real(alpha) {
        Ok(g) => 2.0 * g * rgamma(beta),
        Err(_) => f64::INFINITY,
    }
}

// Entire in E: 2/Gamma(beta) - c/Gamma(alpha), vanishes where f(E) = c.
fn entire_residual(e: f64, c: f64) -> f64 {
    let alpha = 0.75 - 0.5 * e;
    2.0 * rgamma(alpha - 0.5) - c * rgamma(alpha)
}

// ln Gamma(alpha) - ln Gamma(alpha - 1/2) for alpha > 1/2, with the large-argument
// series once the half-unit shift is lost to rounding.
fn ln_gamma_half_ratio(alpha: f64) -> f64 {
    if alpha > 1e6 {
        // ln Gamma(b + 1/2) - ln Gamma(b) = ln(b)/2 - 1/(8b) + 1/(192 b^3) + ...
        let beta = alpha - 0.5;
        let ln_beta = alpha.ln() + (-0.5 / alpha).ln_1p();
        return 0.5 * ln_beta - 0.125 / beta + 1.0 / (192.0 * beta.powi(3));
    }
    ln_gamma(alpha).unwrap_or(f64::NAN) - ln_gamma(alpha - 0.5).unwrap_or(f64::INFINITY)
}

// psi(alpha) - psi(alpha - 1/2) for alpha > 1/2.
fn digamma_half_difference(alpha: f64) -> f64 {
    let beta = alpha - 0.5;
    if alpha > 1e6 {
        return 0.5 / beta + 0.125 / (beta * beta) - 1.0 / (64.0 * beta.powi(4));
    }
    digamma(alpha).unwrap_or(f64::NAN) - digamma(beta).unwrap_or(f64::NAN)
}

// ln f(E) - ln c for E < 1/2, c > 0; safe for deep bound states.
fn log_residual(e: f64, c: f64) -> f64 {
    2f64.ln() + ln_gamma_half_ratio(0.75 - 0.5 * e) - c.ln()
}

/// `||G||^2 = -f'(E)/(2 pi)`, written through entire functions so that it
/// stays finite on the zeros of `f`.
pub fn green_norm_sq(e: f64) -> Result<f64> {
    let alpha = 0.75 - 0.5 * e;
    let beta = alpha - 0.5;
    if alpha > 20.0 {
        // -f' = f (psi(alpha) - psi(beta)) / 2, with f from logarithms
        let f = 2.0 * ln_gamma_half_ratio(alpha).exp();
        return Ok(f * digamma_half_difference(alpha) / (4.0 * PI));
    }
    let g = gamma_real(alpha)?;
    let psi = digamma(alpha)?;
    Ok(g * (psi * rgamma(beta) + rgamma_deriv(beta)) / (2.0 * PI))
}

/// The lowest `count` zero-separation s-wave levels for `c = 1/a`.
///
/// `c = +-inf` is the non-interacting limit; the states are then the
/// regular oscillator s-waves `E = 2k + 3/2`.
pub fn busch_energies(c: f64, count: usize) -> Result<Vec<BuschState>> {
    if count == 0 {
        return Err(Error::Invalid("busch_energies: count must be >= 1".into()));
    }
    if c.is_nan() {
        return Err(Error::Invalid("busch_energies: c is NaN".into()));
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if c.is_infinite() {
            let energy = ho_energy(k, 0);
            out.push(BuschState {
                index: k,
                inverse_a: c,
                energy,
                nu: 0.5 * energy - 0.75,
                norm: f64::INFINITY,
                kind: StateKind::TrapLike,
            });
            continue;
        }
        let energy = busch_root(k, c)?;
        let norm_sq = green_norm_sq(energy)?;
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::Bracketing {
                index: k,
                c,
                detail: format!("non-positive Green's-function norm {norm_sq:e} at E = {energy}"),
            });
        }
        out.push(BuschState {
            index: k,
            inverse_a: c,
            energy,
            nu: 0.5 * energy - 0.75,
            norm: norm_sq.sqrt(),
            kind: if k == 0 && c > 0.0 { StateKind::Bound } else { StateKind::TrapLike },
        });
    }
    Ok(out)
}

fn busch_root(k: usize, c: f64) -> Result<f64> {
    let opts = |scale: f64| RootOptions { xtol: 1e-14 * scale.max(1.0), max_iter: 300 };
    let wrap = |e: Error, lo: f64, hi: f64| Error::Bracketing {
        index: k,
        c,
        detail: format!("window [{lo}, {hi}]: {e}"),
    };
    if k == 0 && c > 1.0 {
        let lo = -2.0 * c * c - 5.0;
        return solve_bracketed_root_with(|e| log_residual(e, c), lo, 0.0, opts(lo.abs()))
            .map_err(|e| wrap(e, lo, 0.0));
    }
    let (lo, hi) = if k == 0 { (-7.0, 1.5) } else { (2.0 * k as f64 - 0.5, 2.0 * k as f64 + 1.5) };
    solve_bracketed_root_with(|e| entire_residual(e, c), lo, hi, opts(hi)).map_err(|e| wrap(e, lo, hi))
}

impl BuschState {
    pub fn is_free(&self) -> bool {
        self.inverse_a.is_infinite()
    }

    fn alpha(&self) -> f64 {
        0.75 - 0.5 * self.energy
    }

    /// `lim_{r->0} r psi(r)`.
    pub fn origin_amplitude(&self) -> f64 {
        if self.is_free() {
            0.0
        } else {
            1.0 / (2.0 * PI * self.norm)
        }
    }

    /// Normalised amplitude `psi(r)` (3D, spherically symmetric), so that
    /// `4 pi int psi^2 r^2 dr = 1`.
    pub fn wavefunction(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("wavefunction needs r > 0, got {r}; use r_psi at the origin")));
        }
        if self.is_free() {
            return Ok(ho_radial(self.index, 0, r) / (4.0 * PI).sqrt());
        }
        let alpha = self.alpha();
        let x = r * r;
        let pref = (-0.5 * x).exp() / (2.0 * PI.powf(1.5) * self.norm);
        if alpha > 0.5 {
            // Kummer: U(alpha, 3/2, x) = x^{-1/2} U(alpha - 1/2, 1/2, x)
            return Ok(pref * gamma_real(alpha)? * tricomi_u_half(alpha - 0.5, x)? / r);
        }
        Ok(pref * gamma_real(alpha)? * tricomi_u(alpha, x)?)
    }

    /// `r psi(r)`, finite at the origin.
    pub fn r_psi(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(self.origin_amplitude());
        }
        Ok(r * self.wavefunction(r)?)
    }
}

/// Free-function form of [`BuschState::wavefunction`].
pub fn busch_wavefunction(state: &BuschState, r: f64) -> Result<f64> {
    state.wavefunction(r)
}
