//! Derivatives of analytic functions from values on a circle.

use super::C64;
use std::f64::consts::PI;

/// Taylor coefficients `f^{(m)}(center)/m!` for m < `count`, from `nodes`
/// equispaced samples on the circle of the given radius.
pub fn taylor_coeffs<F>(f: F, center: C64, radius: f64, count: usize, nodes: usize) -> Vec<C64>
where
    F: Fn(C64) -> C64,
{
    let samples: Vec<(C64, C64)> = (0..nodes)
        .map(|k| {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
            (w, f(center + w * radius))
        })
        .collect();
    (0..count)
        .map(|m| {
            let s: C64 = samples
                .iter()
                .map(|&(w, v)| v * w.powi(-(m as i32)))
                .sum();
            s / (nodes as f64 * radius.powi(m as i32))
        })
        .collect()
}

/// First derivative by a Cauchy integral.
pub fn derivative<F>(f: F, center: C64, radius: f64, nodes: usize) -> C64
where
    F: Fn(C64) -> C64,
{
    taylor_coeffs(f, center, radius, 2, nodes)[1]
}
