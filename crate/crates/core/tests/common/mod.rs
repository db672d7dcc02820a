//! Reference values computed without the library's search code.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo..hi)
}

/// `sup{v : v·f(y/v) ≤ 1}` by 300 halvings of `[ln 1e-12, ln 1e12]`,
/// assuming the perspective is nondecreasing.
pub fn upper_by_bisection(f: impl Fn(&[f64]) -> f64, y: &[f64]) -> f64 {
    let p = |v: f64| {
        let x: Vec<f64> = y.iter().map(|c| c / v).collect();
        v * f(&x)
    };
    let (mut lo, mut hi) = (1e-12f64.ln(), 1e12f64.ln());
    if p(hi.exp()) <= 1.0 {
        return f64::INFINITY;
    }
    if p(lo.exp()) > 1.0 {
        return 0.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if p(mid.exp()) <= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

pub fn hemisphere(x: &[f64]) -> f64 {
    (1.0 - x.iter().map(|c| c * c).sum::<f64>()).max(0.0).sqrt()
}

pub fn hemisphere_dual(y: &[f64]) -> f64 {
    (1.0 + y.iter().map(|c| c * c).sum::<f64>()).sqrt()
}

pub fn exp_bump(x: &[f64]) -> f64 {
    (-x[0].abs()).exp() + 0.5
}

pub fn parabola(x: &[f64]) -> f64 {
    (2.0 - (x[0] - 1.0).powi(2)).max(0.0)
}

/// Positive root of `v² + (2y − 1)v − y² = 0`.
pub fn parabola_dual(y: f64) -> f64 {
    let b = 2.0 * y - 1.0;
    (-b + (b * b + 4.0 * y * y).sqrt()) / 2.0
}

pub fn tent(x: &[f64]) -> f64 {
    (2.0 - x[0].abs()).max(0.0)
}

pub fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
