//! Gauss-Legendre rules and globally adaptive Gauss-Kronrod integration.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::{Error, Result};

/// Default absolute tolerance for [`integrate`].
pub const DEFAULT_ABS_TOL: f64 = 1e-11;

/// A quadrature strategy.
#[derive(Debug, Clone)]
pub enum QuadratureRule {
    /// Fixed-order Gauss-Legendre rule on `[-1, 1]`, exact to degree `2n - 1`.
    GaussLegendre { nodes: Vec<f64>, weights: Vec<f64> },
    /// Globally adaptive 7/15-point Gauss-Kronrod subdivision.
    Adaptive { abs_tol: f64, rel_tol: f64, max_intervals: usize },
}

impl QuadratureRule {
    pub fn gauss_legendre(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre_nodes(n);
        QuadratureRule::GaussLegendre { nodes, weights }
    }

    pub fn adaptive(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureRule::Adaptive { abs_tol, rel_tol, max_intervals: 2000 }
    }

    /// Integrates `f` over the finite interval `[lo, hi]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        match self {
            QuadratureRule::GaussLegendre { nodes, weights } => {
                Ok(fixed_gauss_legendre(&f, lo, hi, nodes, weights))
            }
            QuadratureRule::Adaptive { abs_tol, rel_tol, max_intervals } => {
                adaptive_gk(&f, lo, hi, *abs_tol, *rel_tol, *max_intervals)
            }
        }
    }

    /// Integrates `f` over `[lo, inf)` through the map `x = lo + t/(1-t)`.
    /// Meant for integrands with Gaussian (or faster than algebraic) decay.
    pub fn integrate_half_line<F: Fn(f64) -> f64>(&self, f: F, lo: f64) -> Result<f64> {
        let g = |t: f64| {
            let s = 1.0 - t;
            let v = f(lo + t / s);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        };
        self.integrate(g, 0.0, 1.0)
    }
}

/// Integrates `f` on `[lo, hi]` to the default absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    QuadratureRule::adaptive(DEFAULT_ABS_TOL, 0.0).integrate(f, lo, hi)
}

/// Integrates `f` on `[lo, inf)` to the default absolute tolerance.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, lo: f64) -> Result<f64> {
    QuadratureRule::adaptive(DEFAULT_ABS_TOL, 0.0).integrate_half_line(f, lo)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// ascending.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn fixed_gauss_legendre<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { lo, hi, value, error }
}

fn adaptive_gk<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let first = gk15(f, lo, hi);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut intervals = 1;
    loop {
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target {
            break;
        }
        if intervals >= max_intervals {
            return Err(Error::Quadrature { requested: target, estimate: total, achieved: total_err });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.lo, mid);
        let right = gk15(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        intervals += 1;
    }
    // resum to avoid drift from the running updates
    let (value, _err) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(value)
}
