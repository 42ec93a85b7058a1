mod error;
pub mod analysis;
pub mod numerics;
pub mod oracle;
pub mod output;
pub mod scattering;
pub mod selfconsistent;
pub mod spectrum;
pub mod trap_basis;

pub use error::{Error, Result};
