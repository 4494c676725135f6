//! Quadrature rules on uniform grids.

use super::{C64, I};

/// Moments `∫_0^b s^p e^{iθs} ds` for p = 0, 1, 2.
pub fn osc_moments(b: f64, theta: C64) -> [C64; 3] {
    let x = theta * b;
    if x.norm() < 1.0 {
        let mut out = [C64::new(0.0, 0.0); 3];
        for (p, slot) in out.iter_mut().enumerate() {
            // Σ_k (iθ)^k / k! · b^{p+k+1} / (p+k+1)
            let mut term = C64::new(b.powi(p as i32 + 1), 0.0);
            let mut acc = term / (p as f64 + 1.0);
            for k in 1..40 {
                term = term * I * x / k as f64;
                let add = term / (p + k + 1) as f64;
                acc += add;
                if add.norm() < 1e-18 * acc.norm() {
                    break;
                }
            }
            *slot = acc;
        }
        out
    } else {
        let e = (I * x).exp();
        let it = I * theta;
        let j0 = (e - 1.0) / it;
        let j1 = (e * b - j0) / it;
        let j2 = (e * (b * b) - j1 * 2.0) / it;
        [j0, j1, j2]
    }
}

/// Weights for ∫ over s ∈ [a, b] of the quadratic through s = 0, 1, 2 times e^{iθs}.
fn quadratic_weights(a: f64, b: f64, theta: C64) -> [C64; 3] {
    let hi = osc_moments(b, theta);
    let lo = if a == 0.0 {
        [C64::new(0.0, 0.0); 3]
    } else {
        osc_moments(a, theta)
    };
    let j0 = hi[0] - lo[0];
    let j1 = hi[1] - lo[1];
    let j2 = hi[2] - lo[2];
    [
        (j2 - j1 * 3.0 + j0 * 2.0) * 0.5,
        j1 * 2.0 - j2,
        (j2 - j1) * 0.5,
    ]
}

/// Filon-type integral of `g(t) e^{iωt}` for samples `g` at `t0 + k dt`.
///
/// `g` is interpolated by piecewise quadratics and each panel is integrated exactly.
pub fn filon(values: &[C64], t0: f64, dt: f64, omega: C64) -> C64 {
    let n = values.len();
    if n < 2 {
        return C64::new(0.0, 0.0);
    }
    let theta = omega * dt;
    if n == 2 {
        let m = osc_moments(1.0, theta);
        let phase = (I * omega * t0).exp();
        return phase * dt * (values[0] * (m[0] - m[1]) + values[1] * m[1]);
    }
    let intervals = n - 1;
    let panels = intervals / 2;
    let w = quadratic_weights(0.0, 2.0, theta);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        let i = 2 * k;
        let phase = (I * omega * (t0 + i as f64 * dt)).exp();
        acc += phase * (w[0] * values[i] + w[1] * values[i + 1] + w[2] * values[i + 2]);
    }
    if intervals % 2 == 1 {
        let i = n - 3;
        let wl = quadratic_weights(1.0, 2.0, theta);
        let phase = (I * omega * (t0 + i as f64 * dt)).exp();
        acc += phase * (wl[0] * values[i] + wl[1] * values[i + 1] + wl[2] * values[i + 2]);
    }
    acc * dt
}

/// Composite Simpson integral of uniform samples, with a 3/8 panel when the
/// number of intervals is odd.
pub fn simpson(values: &[C64], dt: f64) -> C64 {
    let n = values.len();
    match n {
        0 | 1 => C64::new(0.0, 0.0),
        2 => (values[0] + values[1]) * (0.5 * dt),
        3 => (values[0] + values[1] * 4.0 + values[2]) * (dt / 3.0),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals % 2 == 0 {
                (n - 1, false)
            } else {
                (n - 4, true)
            };
            let mut acc = C64::new(0.0, 0.0);
            let mut i = 0;
            while i < simpson_end {
                acc += (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (dt / 3.0);
                i += 2;
            }
            if tail {
                let j = n - 4;
                acc += (values[j] + values[j + 1] * 3.0 + values[j + 2] * 3.0 + values[j + 3])
                    * (3.0 * dt / 8.0);
            }
            acc
        }
    }
}

/// Cumulative integrals `∫_{x_0}^{x_k}` of uniform samples with fourth-order
/// panels (Simpson for even k, Simpson plus a 3/8 panel for odd k).
pub fn cumulative_simpson(values: &[C64], dt: f64) -> Vec<C64> {
    let n = values.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    for k in 1..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + (values[k - 2] + values[k - 1] * 4.0 + values[k]) * (dt / 3.0)
        } else if k >= 3 {
            out[k - 3]
                + (values[k - 3] + values[k - 2] * 3.0 + values[k - 1] * 3.0 + values[k])
                    * (3.0 * dt / 8.0)
        } else if n >= 3 {
            // first interval from the quadratic through the first three samples
            (values[0] * 5.0 + values[1] * 8.0 - values[2]) * (dt / 12.0)
        } else {
            (values[0] + values[1]) * (0.5 * dt)
        };
    }
    out
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
