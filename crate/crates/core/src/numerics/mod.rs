//! Numerical kernels shared by every physics module.

pub mod eigen;
pub mod gamma;
pub mod hypergeometric;
pub mod quadrature;
pub mod roots;

pub use eigen::{sym_eig, sym_eigenvalues, EigResult};
pub use gamma::{digamma, gamma_real, ln_gamma, rgamma, rgamma_deriv};
pub use hypergeometric::{kummer_m, laguerre, tricomi_u};
pub use quadrature::{integrate, integrate_half_line, QuadratureRule};
pub use roots::{minimize_golden, solve_bracketed_root, RootOptions};
