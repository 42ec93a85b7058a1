//! Zero-separation eigenbasis of the relative-motion Hamiltonian.

pub mod basis;
pub mod busch;
pub mod oscillator;
pub mod units;

pub use basis::{busch_dipole, busch_dipole_quadrature, dipole_matrix, BasisLabel, BasisSpec, TrapBasis};
pub use busch::{busch_energies, busch_function, busch_wavefunction, BuschState, StateKind};
pub use oscillator::{ho_energy, ho_radial};
pub use units::TrapUnits;
