//! Confluent hypergeometric functions with the second parameter fixed.
//!
//! `tricomi_u(a, x)` is `U(a, 3/2, x)`:
//! - non-positive integer `a`: generalized Laguerre polynomial;
//! - `a > 1/2`: Kummer transform `U(a, 3/2, x) = x^{-1/2} U(a - 1/2, 1/2, x)`
//!   and the Laplace integral of the latter, which stays convergent down to
//!   `x = 0`;
//! - otherwise: backward recurrence in `a` from two integral values.

use super::gamma::{gamma_real, rgamma};
use super::quadrature::QuadratureRule;
use crate::{Error, Result};

const U_REL_TOL: f64 = 1e-14;

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by upward recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut l0 = 1.0;
    if n == 0 {
        return l0;
    }
    let mut l1 = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - x) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

/// Kummer's function `M(a, b, x)` by its power series. Intended for
/// moderate `|x|` (the radial interiors used here have `x <= 1`).
pub fn kummer_m(a: f64, b: f64, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..2000 {
        let nf = n as f64;
        term *= (a + nf) * x / ((b + nf) * (nf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `U(alpha, 3/2, x)` for `x > 0`.
pub fn tricomi_u(alpha: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("tricomi_u requires x > 0, got {x}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain(format!("tricomi_u requires finite alpha, got {alpha}")));
    }
    if alpha <= 0.0 && alpha == alpha.floor() {
        let n = (-alpha) as usize;
        let mut fact = 1.0;
        for k in 2..=n {
            fact *= k as f64;
        }
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        return Ok(sign * fact * laguerre(n, 0.5, x));
    }
    if alpha > 0.5 {
        return u_integral(alpha, x);
    }
    // shift up into (1/2, 3/2], then recur downward (stable direction)
    let steps = (0.5 - alpha).floor() as usize + 1;
    let top = alpha + steps as f64;
    let mut u_next = u_integral(top + 1.0, x)?;
    let mut u_cur = u_integral(top, x)?;
    let b = 1.5;
    let mut a = top;
    for _ in 0..steps {
        // U(a-1) = (2a - b + x) U(a) - a (a - b + 1) U(a+1)
        let u_prev = (2.0 * a - b + x) * u_cur - a * (a - b + 1.0) * u_next;
        u_next = u_cur;
        u_cur = u_prev;
        a -= 1.0;
    }
    Ok(u_cur)
}

/// `U(p, 1/2, x)` for `p > 0`, `x >= 0`, by the Laplace integral
/// `Gamma(p)^{-1} int_0^inf e^{-xt} t^{p-1} (1+t)^{-p-1/2} dt`.
pub fn tricomi_u_half(p: f64, x: f64) -> Result<f64> {
    if !(p > 0.0) || x < 0.0 {
        return Err(Error::Domain(format!("tricomi_u_half requires p > 0 and x >= 0, got p={p}, x={x}")));
    }
    let rule = QuadratureRule::adaptive(0.0, U_REL_TOL);
    // t in [0, 1]
    let head = if p < 1.0 {
        // t = s^{1/p} removes the t^{p-1} singularity; 1/(p Gamma(p)) = 1/Gamma(p+1)
        let inv_p = 1.0 / p;
        let integral = rule.integrate(
            |s| {
                if s <= 0.0 {
                    return 1.0;
                }
                let t = s.powf(inv_p);
                (-x * t).exp() * (1.0 + t).powf(-p - 0.5)
            },
            0.0,
            1.0,
        )?;
        integral * rgamma(p + 1.0)
    } else {
        let integral = rule.integrate(
            |t| {
                if t <= 0.0 {
                    return if p == 1.0 { 1.0 } else { 0.0 };
                }
                (-x * t + (p - 1.0) * t.ln() - (p + 0.5) * t.ln_1p()).exp()
            },
            0.0,
            1.0,
        )?;
        integral * rgamma(p)
    };
    // t in [1, inf): t = 1/v^2
    let tail = rule.integrate(
        |v| {
            if v <= 0.0 {
                return 0.0;
            }
            2.0 * (-x / (v * v)).exp() * (1.0 + v * v).powf(-p - 0.5)
        },
        0.0,
        1.0,
    )? * rgamma(p);
    Ok(head + tail)
}

fn u_integral(alpha: f64, x: f64) -> Result<f64> {
    Ok(tricomi_u_half(alpha - 0.5, x)? / x.sqrt())
}

/// Leading small-`x` coefficients of `x^{1/2} U(alpha, 3/2, x) = A + B x^{1/2} + O(x)`:
/// `A = sqrt(pi)/Gamma(alpha)`, `B = Gamma(-1/2)/Gamma(alpha - 1/2)`.
pub fn tricomi_u_origin_coefficients(alpha: f64) -> Result<(f64, f64)> {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let gm = gamma_real(-0.5)?;
    Ok((sqrt_pi * rgamma(alpha), gm * rgamma(alpha - 0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn polynomial_cases() {
        for x in [0.1, 1.0, 7.5, 60.0] {
            assert_eq!(tricomi_u(0.0, x).unwrap(), 1.0);
        }
        assert!((tricomi_u(-1.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        // U(-2, b, x) = x^2 - 2(b+1)x + b(b+1)
        let x = 3.3;
        let exact = x * x - 5.0 * x + 1.5 * 2.5;
        assert!(close(tricomi_u(-2.0, x).unwrap(), exact, 1e-14));
    }

    #[test]
    fn half_integer_closed_form() {
        // U(1/2, 3/2, x) = x^{-1/2}
        for x in [1e-6, 0.3, 4.0, 90.0] {
            assert!(close(tricomi_u(0.5, x).unwrap(), x.powf(-0.5), 1e-12), "x = {x}");
        }
        // a = 1/2 kills the U(a+1) term of the recurrence: U(-1/2) = (x - 1/2) U(1/2)
        let x = 2.0;
        let u0 = tricomi_u(0.5, x).unwrap();
        let um1 = tricomi_u(-0.5, x).unwrap();
        let resid = um1 - (x - 0.5) * u0;
        assert!(resid.abs() < 1e-12, "{resid}");
    }

    #[test]
    fn domain_check() {
        assert!(tricomi_u(0.3, 0.0).is_err());
        assert!(tricomi_u(0.3, -1.0).is_err());
    }

    #[test]
    fn laguerre_small_cases() {
        let x = 0.7;
        assert!((laguerre(2, 0.5, x) - (x * x / 2.0 - 2.5 * x + 15.0 / 8.0)).abs() < 1e-14);
    }

    #[test]
    fn kummer_series() {
        // M(a, a, x) = e^x
        assert!(close(kummer_m(1.3, 1.3, 0.8), 0.8f64.exp(), 1e-14));
    }
}
