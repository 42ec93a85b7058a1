use thiserror::Error;

/// Errors raised by the numerical kernels and the physics built on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("no convergence after {iterations} iterations (last bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("matrix not symmetric: |A[{i},{j}] - A[{j},{i}]| = {diff:e}")]
    Asymmetric { i: usize, j: usize, diff: f64 },

    #[error("quadrature tolerance {requested:e} not reached: estimate {estimate} +/- {achieved:e}")]
    Quadrature { requested: f64, estimate: f64, achieved: f64 },

    #[error("failed to bracket root {index} of the zero-separation equation (c = {c}): {detail}")]
    Bracketing { index: usize, c: f64, detail: String },

    #[error("no self-consistent root in window [{lo}, {hi}] at dz = {dz}")]
    NoRoot { lo: f64, hi: f64, dz: f64, scan: Vec<(f64, f64)> },

    #[error("overlap matrix nearly singular (det = {0:e})")]
    SingularOverlap(f64),

    #[error("no interior gap minimum between branches {lower} and {upper}")]
    NoCrossing { lower: usize, upper: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("output error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
