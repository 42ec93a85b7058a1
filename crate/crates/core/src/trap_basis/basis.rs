//! The `m = 0` basis at zero separation: contact-interacting s-waves plus
//! regular oscillator states for `l >= 1`, and the `z = r cos(theta)`
//! matrix that couples them once the traps are displaced.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::busch::{busch_energies, BuschState, StateKind};
use super::oscillator::{dipole_element, ho_energy, ho_radial, s_wave_at_origin};
use crate::numerics::quadrature::QuadratureRule;
use crate::{Error, Result};

/// Truncation of the zero-separation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    /// Number of interacting s-wave states (bound state included).
    pub n_s: usize,
    pub l_max: usize,
    /// Radial cutoff `n <= n_max` for every `l >= 1`.
    pub n_max: usize,
    /// Optional oscillator-shell cap `2n + l <= shell_cap` on the `l >= 1`
    /// states, which trims the high-`l` corner of the rectangle.
    #[serde(default)]
    pub shell_cap: Option<usize>,
}

/// Shell cap of the default basis (dimension 169).
pub const DEFAULT_SHELL_CAP: usize = 24;

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec::shells(DEFAULT_SHELL_CAP)
    }
}

impl BasisSpec {
    pub fn new(n_s: usize, l_max: usize, n_max: usize) -> Self {
        BasisSpec { n_s, l_max, n_max, shell_cap: None }
    }

    /// Rectangle trimmed to oscillator shells `N = 2n + l <= shell_cap`,
    /// with the s-wave count matched to the same shells.
    pub fn shells(shell_cap: usize) -> Self {
        BasisSpec { n_s: shell_cap / 2 + 1, l_max: shell_cap, n_max: shell_cap / 2, shell_cap: Some(shell_cap) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_s == 0 || self.l_max == 0 {
            return Err(Error::Invalid(format!("basis counts must be >= 1: {self:?}")));
        }
        Ok(())
    }

    /// Highest radial quantum number kept in partial wave `l >= 1`.
    pub fn n_max_for(&self, l: usize) -> Option<usize> {
        match self.shell_cap {
            None => Some(self.n_max),
            Some(cap) if cap >= l => Some(self.n_max.min((cap - l) / 2)),
            Some(_) => None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n_s + (1..=self.l_max).filter_map(|l| self.n_max_for(l)).map(|n| n + 1).sum::<usize>()
    }

    /// The same truncation enlarged by `step` in every cutoff.
    pub fn enlarged(&self, step: usize) -> Self {
        if let Some(cap) = self.shell_cap {
            if *self == BasisSpec::shells(cap) {
                return BasisSpec::shells(cap + step);
            }
        }
        BasisSpec {
            n_s: self.n_s + step,
            l_max: self.l_max + step,
            n_max: self.n_max + step,
            shell_cap: self.shell_cap.map(|c| c + step),
        }
    }
}

/// What a basis index refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisLabel {
    Busch { index: usize },
    Oscillator { n: usize, l: usize },
}

impl BasisLabel {
    pub fn l(&self) -> usize {
        match *self {
            BasisLabel::Busch { .. } => 0,
            BasisLabel::Oscillator { l, .. } => l,
        }
    }
}

/// Zero-separation eigenbasis for one value of `c = 1/a`.
#[derive(Debug, Clone)]
pub struct TrapBasis {
    pub inverse_a: f64,
    pub spec: BasisSpec,
    pub states: Vec<BuschState>,
    pub labels: Vec<BasisLabel>,
    /// Zero-separation energies, the diagonal of the Hamiltonian.
    pub energies: Vec<f64>,
    /// `W_ij = <i| r cos(theta) |j>`.
    pub dipole: DMatrix<f64>,
}

impl TrapBasis {
    pub fn new(inverse_a: f64, spec: BasisSpec) -> Result<Self> {
        spec.validate()?;
        let states = busch_energies(inverse_a, spec.n_s)?;
        let mut labels: Vec<BasisLabel> = (0..spec.n_s).map(|index| BasisLabel::Busch { index }).collect();
        let mut energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
        for l in 1..=spec.l_max {
            if let Some(nm) = spec.n_max_for(l) {
                for n in 0..=nm {
                    labels.push(BasisLabel::Oscillator { n, l });
                    energies.push(ho_energy(n, l));
                }
            }
        }
        let dipole = dipole_matrix(&states, &labels)?;
        Ok(TrapBasis { inverse_a, spec, states, labels, energies, dipole })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn bound_state(&self) -> Option<&BuschState> {
        self.states.iter().find(|s| s.kind == StateKind::Bound)
    }
}

/// `<Busch_k | z | n_up, l=1>` from the Green's-function expansion of the
/// s-wave state. Only the `n = n_up` and `n = n_up + 1` oscillator s-waves
/// have a dipole matrix element with `|n_up, 1>`, so the sum is finite.
pub fn busch_dipole(state: &BuschState, n_up: usize) -> f64 {
    if state.is_free() {
        return dipole_element(n_up, state.index, 0);
    }
    let e = state.energy;
    let term = |n: usize| s_wave_at_origin(n) * dipole_element(n_up, n, 0) / (ho_energy(n, 0) - e);
    (term(n_up) + term(n_up + 1)) / state.norm
}

/// The same element by radial quadrature of the explicit wavefunction.
pub fn busch_dipole_quadrature(state: &BuschState, n_up: usize, rule: &QuadratureRule) -> Result<f64> {
    let radial = rule.integrate_half_line(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            let rpsi = state.r_psi(r).unwrap_or(f64::NAN);
            rpsi * ho_radial(n_up, 1, r) * r * r
        },
        0.0,
    )?;
    // sqrt(4 pi) psi is the radial function; angular factor <00|cos|10> = 1/sqrt(3)
    Ok((4.0 * PI).sqrt() * radial / 3f64.sqrt())
}

/// Assembles the symmetric dipole matrix for the given labels.
pub fn dipole_matrix(states: &[BuschState], labels: &[BasisLabel]) -> Result<DMatrix<f64>> {
    let dim = labels.len();
    let mut w = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = match (labels[i], labels[j]) {
                (BasisLabel::Busch { index }, BasisLabel::Oscillator { n, l: 1 })
                | (BasisLabel::Oscillator { n, l: 1 }, BasisLabel::Busch { index }) => busch_dipole(&states[index], n),
                (BasisLabel::Oscillator { n: n1, l: l1 }, BasisLabel::Oscillator { n: n2, l: l2 }) => {
                    if l2 == l1 + 1 {
                        dipole_element(n2, n1, l1)
                    } else if l1 == l2 + 1 {
                        dipole_element(n1, n2, l2)
                    } else {
                        0.0
                    }
                }
                _ => 0.0,
            };
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite dipole matrix element".into()));
    }
    Ok(w)
}
