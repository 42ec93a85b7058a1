//! s-wave scattering data of short-range model potentials.
//!
//! All quantities are in trap units (hbar = mu = omega = 1): energies in
//! hbar*omega, lengths in z0. The energy-dependent scattering length is
//! carried around mostly through its inverse `c = 1/a_eff`, which stays
//! finite where `a_eff` has a pole.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::roots::solve_bracketed_root;
use crate::{Error, Result};

/// Range beyond which a finite-range well is no longer well described by a
/// contact interaction in a trap of unit width.
pub const VALIDITY_RADIUS: f64 = 0.5;

/// A short-range central potential seen through its s-wave scattering.
pub trait ScatteringModel: Send + Sync {
    /// `1/a_eff(E_K)`. `f64::INFINITY` means no interaction (`a_eff = 0`),
    /// `0.0` a pole of `a_eff`.
    fn inverse_aeff(&self, e_k: f64) -> Result<f64>;

    /// Lowest relative kinetic energy at which the model is defined.
    fn min_energy(&self) -> f64 {
        f64::NEG_INFINITY
    }

    fn aeff(&self, e_k: f64) -> Result<EffectiveScatteringLength> {
        let c = self.inverse_aeff(e_k)?;
        Ok(EffectiveScatteringLength::from_inverse(e_k, c))
    }
}

/// Attractive spherical step: `-V0` for `r < R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepWell {
    /// Depth in hbar*omega, positive for attraction.
    pub v0: f64,
    /// Radius in z0.
    pub radius: f64,
}

/// `a_eff` at one energy, with its inverse and a pole marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveScatteringLength {
    pub e_k: f64,
    /// Scattering length in z0; `+-inf` at a pole.
    pub a_eff: f64,
    /// `1/a_eff`; zero at a pole.
    pub inverse: f64,
    pub pole: bool,
}

impl EffectiveScatteringLength {
    pub fn from_inverse(e_k: f64, c: f64) -> Self {
        let pole = c == 0.0;
        let a_eff = if pole {
            f64::INFINITY.copysign(c)
        } else if c.is_infinite() {
            0.0
        } else {
            1.0 / c
        };
        EffectiveScatteringLength { e_k, a_eff, inverse: c, pole }
    }

    /// Wavenumber `k = sqrt(2 E_K)` above threshold, `kappa = sqrt(-2 E_K)` below.
    pub fn wavenumber(&self) -> f64 {
        (2.0 * self.e_k.abs()).sqrt()
    }
}

/// An s-wave bound state `E_b = -kappa_b^2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub energy: f64,
    pub kappa: f64,
}

impl StepWell {
    pub fn new(v0: f64, radius: f64) -> Result<Self> {
        if !(v0 >= 0.0) || !v0.is_finite() {
            return Err(Error::Invalid(format!("well depth must be finite and >= 0, got {v0}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Invalid(format!("well radius must be finite and > 0, got {radius}")));
        }
        Ok(StepWell { v0, radius })
    }

    /// Whether the radius is small enough for the pseudopotential picture.
    pub fn is_valid_contact_model(&self) -> bool {
        self.radius <= VALIDITY_RADIUS
    }

    /// Interior wavenumber `q = sqrt(2 (E + V0))`.
    pub fn interior_wavenumber(&self, e: f64) -> f64 {
        (2.0 * (e + self.v0)).max(0.0).sqrt()
    }

    /// `q0 R` at zero energy; bound states appear each time it passes
    /// an odd multiple of pi/2.
    pub fn strength(&self) -> f64 {
        self.interior_wavenumber(0.0) * self.radius
    }

    /// s-wave phase shift for `E_K > 0`, continuous in energy and equal to
    /// `n_b * pi` at threshold (Levinson).
    pub fn phase_shift(&self, e_k: f64) -> Result<f64> {
        if !(e_k > 0.0) {
            return Err(Error::Domain(format!("phase shift needs E_K > 0, got {e_k}; use aeff below threshold")));
        }
        if self.v0 == 0.0 {
            return Ok(0.0);
        }
        let k = (2.0 * e_k).sqrt();
        let q = self.interior_wavenumber(e_k);
        let qr = q * self.radius;
        // arctan(k tan(qR)/q) lifted onto the branch that tracks qR
        let phi = (k * qr.sin()).atan2(q * qr.cos());
        let lifted = phi + 2.0 * PI * ((qr - phi) / (2.0 * PI)).round();
        Ok(lifted - k * self.radius)
    }

    // a_eff = -num/den with
    //   num = sin(qR) C - q cos(qR) S,  den = q cos(qR) C + k^2 sin(qR) S,
    // C = cos kR, S = sin(kR)/k above threshold and C = cosh kR,
    // S = sinh(kR)/kappa below; both are entire in E_K.
    fn num_den(&self, e_k: f64) -> (f64, f64) {
        let r = self.radius;
        let q = self.interior_wavenumber(e_k);
        let (cq, sq) = ((q * r).cos(), (q * r).sin());
        let (c, s) = if e_k > 0.0 {
            let k = (2.0 * e_k).sqrt();
            ((k * r).cos(), (k * r).sin() / k)
        } else if e_k < 0.0 {
            let kappa = (-2.0 * e_k).sqrt();
            // scale both by 1/cosh to keep deep energies finite
            let th = (kappa * r).tanh();
            (1.0, th / kappa)
        } else {
            (1.0, r)
        };
        let num = sq * c - q * cq * s;
        let den = q * cq * c + 2.0 * e_k * sq * s;
        (num, den)
    }

    fn check_energy(&self, e_k: f64) -> Result<()> {
        if !e_k.is_finite() || (self.v0 > 0.0 && !(e_k > -self.v0)) {
            return Err(Error::Domain(format!(
                "E_K = {e_k} must exceed -V0 = {} for a real interior wavenumber",
                -self.v0
            )));
        }
        Ok(())
    }

    /// Zero-energy scattering length `R (1 - tan(q0 R)/(q0 R))`.
    pub fn scattering_length(&self) -> Result<f64> {
        Ok(self.aeff(0.0)?.a_eff)
    }

    /// s-wave bound states, ascending in energy. Roots of
    /// `q cos(qR) + kappa sin(qR) = 0` in each window `((n - 1/2) pi, n pi) / R`.
    pub fn bound_states(&self) -> Vec<BoundState> {
        let r = self.radius;
        let q0 = self.interior_wavenumber(0.0);
        let mut states = Vec::new();
        let mut n = 1;
        loop {
            let lo = (n as f64 - 0.5) * PI / r;
            if lo >= q0 {
                break;
            }
            let hi = (n as f64 * PI / r).min(q0);
            let f = |q: f64| {
                let kappa = (q0 * q0 - q * q).max(0.0).sqrt();
                q * (q * r).cos() + kappa * (q * r).sin()
            };
            if let Ok(q) = solve_bracketed_root(f, lo, hi, 1e-15 * q0) {
                let energy = 0.5 * (q * q - q0 * q0);
                if energy < 0.0 {
                    states.push(BoundState { energy, kappa: (-2.0 * energy).sqrt() });
                }
            }
            n += 1;
        }
        states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        states
    }
}

impl ScatteringModel for StepWell {
    fn inverse_aeff(&self, e_k: f64) -> Result<f64> {
        if self.v0 == 0.0 && e_k.is_finite() {
            return Ok(f64::INFINITY);
        }
        self.check_energy(e_k)?;
        let (num, den) = self.num_den(e_k);
        if num == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(-den / num)
    }

    fn min_energy(&self) -> f64 {
        if self.v0 > 0.0 {
            -self.v0
        } else {
            f64::NEG_INFINITY
        }
    }

    fn aeff(&self, e_k: f64) -> Result<EffectiveScatteringLength> {
        self.check_energy(e_k)?;
        if self.v0 == 0.0 {
            return Ok(EffectiveScatteringLength { e_k, a_eff: 0.0, inverse: f64::INFINITY, pole: false });
        }
        let (num, den) = self.num_den(e_k);
        if den == 0.0 {
            return Ok(EffectiveScatteringLength::from_inverse(e_k, 0.0f64.copysign(-num)));
        }
        let a_eff = -num / den;
        let inverse = if num == 0.0 { f64::INFINITY } else { -den / num };
        Ok(EffectiveScatteringLength { e_k, a_eff, inverse, pole: false })
    }
}

/// Energy-independent scattering length; turns the self-consistent
/// machinery back into the fixed-a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantScatteringLength {
    /// `1/a`; `inf` for no interaction, `0` for unitarity.
    pub inverse: f64,
}

impl ConstantScatteringLength {
    pub fn from_length(a: f64) -> Self {
        ConstantScatteringLength { inverse: if a == 0.0 { f64::INFINITY } else { 1.0 / a } }
    }
}

impl ScatteringModel for ConstantScatteringLength {
    fn inverse_aeff(&self, _e_k: f64) -> Result<f64> {
        Ok(self.inverse)
    }
}

/// One row of the `E_K,a_eff,pole_flag` table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AeffRow {
    pub e_k: f64,
    pub a_eff: f64,
    pub pole: bool,
}

/// Tabulates `a_eff` on the given energies.
pub fn aeff_table<M: ScatteringModel + ?Sized>(model: &M, energies: &[f64]) -> Result<Vec<AeffRow>> {
    energies
        .iter()
        .map(|&e| model.aeff(e).map(|a| AeffRow { e_k: e, a_eff: a.a_eff, pole: a.pole }))
        .collect()
}
