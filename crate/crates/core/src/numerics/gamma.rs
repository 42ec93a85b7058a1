//! Gamma-family functions on the real line.
//!
//! Lanczos approximation (g = 7, nine terms) for `x >= 1/2`, reflection
//! below. The reciprocal gamma function and its derivative are entire and
//! are evaluated without ever touching a pole, which is what the
//! zero-separation eigenvalue equation needs.

use std::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with exact argument reduction.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

/// `cos(pi x)` with exact argument reduction.
pub fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r.abs() == 0.5 {
        return 0.0;
    }
    (PI * r).cos()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

// Gamma for x >= 1/2.
fn gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * sum * ((z + 0.5) * t.ln() - t).exp()
}

/// Gamma function for real arguments away from the poles.
pub fn gamma_real(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x == x.floor() && x <= 21.0 {
        // exact factorials
        let mut p = 1.0;
        let mut k = 2.0;
        while k < x {
            p *= k;
            k += 1.0;
        }
        return Ok(p);
    }
    if x >= 0.5 {
        Ok(gamma_lanczos(x))
    } else {
        Ok(PI / (sin_pi(x) * gamma_lanczos(1.0 - x)))
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / sin_pi(x)).ln() - ln_gamma_lanczos(1.0 - x));
    }
    Ok(ln_gamma_lanczos(x))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + sum.ln() + (z + 0.5) * t.ln() - t
}

/// `1/Gamma(x)`; zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        1.0 / gamma_lanczos(x)
    } else {
        sin_pi(x) * gamma_lanczos(1.0 - x) / PI
    }
}

/// Digamma function `psi(x) = Gamma'(x)/Gamma(x)`.
pub fn digamma(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x < 0.5 {
        return Ok(digamma_positive(1.0 - x) - PI * cos_pi(x) / sin_pi(x));
    }
    Ok(digamma_positive(x))
}

fn digamma_positive(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli tail: B_2k / (2k x^2k)
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - tail
}

/// Derivative of the reciprocal gamma function, `d/dx [1/Gamma(x)]`.
pub fn rgamma_deriv(x: f64) -> f64 {
    if x > 0.5 {
        -digamma_positive(x) / gamma_lanczos(x)
    } else {
        let g = gamma_lanczos(1.0 - x);
        g * (cos_pi(x) - sin_pi(x) * digamma_positive(1.0 - x) / PI)
    }
}
