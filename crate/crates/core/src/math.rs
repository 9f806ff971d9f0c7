//! Small numerical helpers. All logs are natural.

use alloc::vec;
use alloc::vec::Vec;

/// Probabilities are clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]` before logs.
pub const PROB_FLOOR: f64 = 1e-12;

/// Relative tolerance used when comparing scores for ties.
pub const TIE_TOL: f64 = 1e-12;

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + exp(-z))
    } else {
        let e = exp(z);
        e / (1.0 + e)
    }
}

pub fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// `ln q(y)` for a Bernoulli with `q(y=1) = p1`, after clamping.
pub fn ln_bernoulli(p1: f64, y: u8) -> f64 {
    let p = clamp_prob(p1);
    if y == 1 { ln(p) } else { ln(1.0 - p) }
}

/// `p ln p` with the `0 ln 0 = 0` convention.
pub fn xlnx(p: f64) -> f64 {
    if p <= 0.0 { 0.0 } else { p * ln(p) }
}

pub fn binary_entropy(p: f64) -> f64 {
    -(xlnx(p) + xlnx(1.0 - p))
}

/// KL divergence between Bernoulli(p) and Bernoulli(q).
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a <= 0.0 || a == b { 0.0 } else { a * (ln(a) - ln(clamp_prob(b))) };
    (term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0)
}

/// Whether `a` and `b` agree up to [`TIE_TOL`].
pub fn near(a: f64, b: f64) -> bool {
    if !a.is_finite() || !b.is_finite() {
        return a == b;
    }
    (a - b).abs() <= TIE_TOL * (1.0 + a.abs().max(b.abs()))
}

/// Gauss-Hermite nodes and weights for the weight `exp(-x^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => sqrt(2.0 * nf + 1.0) - 1.85575 * libm::pow(2.0 * nf + 1.0, -0.16667),
            1 => z - 1.14 * libm::pow(nf, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * sqrt(2.0 / (jf + 1.0)) * p2 - sqrt(jf / (jf + 1.0)) * p3;
            }
            pp = sqrt(2.0 * nf) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `E[f(Z)]` for `Z ~ N(mean, 1)` by Gauss-Hermite quadrature.
pub fn normal_expectation(nodes: &(Vec<f64>, Vec<f64>), mean: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_sqrt_pi = 0.564_189_583_547_756_3;
    let s2 = core::f64::consts::SQRT_2;
    nodes.0.iter().zip(&nodes.1).map(|(x, w)| w * f(mean + s2 * x)).sum::<f64>() * inv_sqrt_pi
}
