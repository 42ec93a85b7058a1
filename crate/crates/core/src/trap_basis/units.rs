//! Trap units: hbar = mu = omega = 1, so energies are in hbar*omega and
//! lengths in z0 = sqrt(hbar / (mu omega)).
//!
//! The two-atom problem separates into centre-of-mass and relative motion;
//! everything in this crate is the relative problem with reduced mass
//! `mu = m/2`.

use serde::{Deserialize, Serialize};

/// CODATA 2018 reduced Planck constant, J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Atomic mass unit, kg.
pub const AMU_SI: f64 = 1.660_539_066_60e-27;
/// Bohr radius, m.
pub const BOHR_SI: f64 = 5.291_772_109_03e-11;

/// Conversion between trap units and SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapUnits {
    pub hbar: f64,
    /// Reduced mass, kg.
    pub mu: f64,
    /// Trap angular frequency, rad/s.
    pub omega: f64,
}

impl TrapUnits {
    /// Two identical atoms of mass `atom_mass` (kg) in a trap of angular
    /// frequency `omega`.
    pub fn for_identical_atoms(atom_mass: f64, omega: f64) -> Self {
        TrapUnits { hbar: HBAR_SI, mu: 0.5 * atom_mass, omega }
    }

    pub fn hbar_omega(&self) -> f64 {
        self.hbar * self.omega
    }

    pub fn z0(&self) -> f64 {
        (self.hbar / (self.mu * self.omega)).sqrt()
    }

    pub fn energy_to_trap(&self, e: f64) -> f64 {
        e / self.hbar_omega()
    }

    pub fn energy_from_trap(&self, e: f64) -> f64 {
        e * self.hbar_omega()
    }

    pub fn length_to_trap(&self, x: f64) -> f64 {
        x / self.z0()
    }

    pub fn length_from_trap(&self, x: f64) -> f64 {
        x * self.z0()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        // two 133Cs atoms, 2 pi x 100 kHz
        let u = TrapUnits::for_identical_atoms(132.905 * AMU_SI, 2.0 * std::f64::consts::PI * 1e5);
        let e = 3.7e-29;
        assert!((u.energy_from_trap(u.energy_to_trap(e)) - e).abs() <= 1e-12 * e);
        let a = 280.0 * BOHR_SI;
        assert!((u.length_from_trap(u.length_to_trap(a)) - a).abs() <= 1e-12 * a);
        // z0 is the oscillator length of the reduced mass
        let z0 = u.z0();
        assert!((u.hbar / (u.mu * z0 * z0) - u.omega).abs() < 1e-9 * u.omega);
    }
}
