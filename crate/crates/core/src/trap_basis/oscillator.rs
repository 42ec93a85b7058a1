//! Regular eigenstates of the isotropic 3D oscillator and their dipole
//! couplings.
//!
//! `R_nl(r) = N_nl r^l L_n^{(l+1/2)}(r^2) e^{-r^2/2}` with
//! `N_nl^2 = 2 n! / Gamma(n + l + 3/2)`, so `int R_nl^2 r^2 dr = 1` and the
//! radial function is positive at the origin.

use std::f64::consts::PI;

use crate::numerics::gamma::ln_gamma;

/// `2n + l + 3/2`.
pub fn ho_energy(n: usize, l: usize) -> f64 {
    (2 * n + l) as f64 + 1.5
}

fn ln_norm(n: usize, l: usize) -> f64 {
    let lf = ln_gamma(n as f64 + 1.0).expect("positive argument");
    let lg = ln_gamma(n as f64 + l as f64 + 1.5).expect("positive argument");
    0.5 * (2f64.ln() + lf - lg)
}

/// Normalized radial function `R_nl(r)`.
pub fn ho_radial(n: usize, l: usize, r: f64) -> f64 {
    let x = r * r;
    let alpha = l as f64 + 0.5;
    // Laguerre recurrence with rescaling; the e^{-x/2} envelope is folded
    // back in through the log scale.
    let mut l0 = 1.0;
    let mut l1 = if n == 0 { 1.0 } else { 1.0 + alpha - x };
    let mut log_scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
        if l1.abs() > 1e100 {
            l0 *= 1e-100;
            l1 *= 1e-100;
            log_scale += 100.0 * 10f64.ln();
        }
    }
    if l1 == 0.0 {
        return 0.0;
    }
    let ln_r = if l == 0 { 0.0 } else { l as f64 * r.ln() };
    let ln_mag = ln_norm(n, l) + log_scale + ln_r - 0.5 * x + l1.abs().ln();
    l1.signum() * ln_mag.exp()
}

/// Value at the origin of the normalized 3D s-wave state `|n, l=0, m=0>`.
pub fn s_wave_at_origin(n: usize) -> f64 {
    // R_n0(0) = N_n0 L_n^{(1/2)}(0), L_n^{(1/2)}(0) = Gamma(n + 3/2) / (n! Gamma(3/2))
    let ln_l0 = ln_gamma(n as f64 + 1.5).unwrap() - ln_gamma(n as f64 + 1.0).unwrap() - ln_gamma(1.5).unwrap();
    (ln_norm(n, 0) + ln_l0).exp() / (4.0 * PI).sqrt()
}

/// `<n_up, l+1 | r | n, l>` for the radial functions above.
pub fn radial_r_element(n_up: usize, n: usize, l: usize) -> f64 {
    if n_up == n {
        (n as f64 + l as f64 + 1.5).sqrt()
    } else if n_up + 1 == n {
        -(n as f64).sqrt()
    } else {
        0.0
    }
}

/// `<l+1, m=0 | cos(theta) | l, m=0>`.
pub fn cos_theta_element(l: usize) -> f64 {
    let lf = l as f64;
    (lf + 1.0) / ((2.0 * lf + 1.0) * (2.0 * lf + 3.0)).sqrt()
}

/// `<n_up, l+1, 0 | z | n, l, 0>`.
pub fn dipole_element(n_up: usize, n: usize, l: usize) -> f64 {
    radial_r_element(n_up, n, l) * cos_theta_element(l)
}
