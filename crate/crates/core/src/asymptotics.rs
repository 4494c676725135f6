//! Resonance band and safe circles for large `|z|`.
//!
//! With contact order `n` and `ν = n + 2`,
//! `z^{−g} ψ(z,0) ≈ 1 + c₁ z^{−ν} e^{2izR}` in the lower half plane, so the
//! resonances follow `Im z ≈ −(ν log|z| − log|c₁|)/(2R)`. The factor
//! `Σ r_ℓ z^{ℓ−g}` multiplying `c₁` is frozen at its leading term `1`.

use crate::error::{Error, Result};
use crate::kernel::Perturbation;
use crate::numeric::lsq::solve_real;
use crate::numeric::{C64, I};
use crate::potential::BasePotential;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandModel {
    pub nu: u32,
    pub c1: C64,
    pub sigma: f64,
    pub kappa: f64,
    pub radius: f64,
    pub tau: f64,
}

/// Band model from the leading derivative of `q − q₀` at `R`:
/// `c₁ = (q − q₀)^{(n)}(R) · i^ν / 2^ν`. The base enters only through the
/// leading coefficient of `Q` in `z`, which is `1`.
pub fn band_from_perturbation(_base: &BasePotential, pert: &Perturbation) -> Result<BandModel> {
    let n = pert.contact_order();
    let d = pert.derivative_at_edge(n);
    if pert.is_zero() || d == C64::new(0.0, 0.0) {
        return Err(Error::ZeroContactDerivative { order: n });
    }
    let nu = n as u32 + 2;
    let c1 = d * I.powu(nu) / 2f64.powi(nu as i32);
    Ok(BandModel::new(nu, c1, pert.radius()))
}

impl BandModel {
    pub fn new(nu: u32, c1: C64, radius: f64) -> Self {
        let kappa = c1.arg();
        let half_turns = nu as f64 * PI / 2.0;
        let target = if (kappa + 3.0 * half_turns).cos() >= 0.0 {
            0.0
        } else {
            PI
        };
        let tau = (target - half_turns).rem_euclid(2.0 * PI);
        BandModel {
            nu,
            c1,
            sigma: c1.norm().ln(),
            kappa,
            radius,
            tau,
        }
    }

    /// Predicted `Im z` of resonances at `|Re z| = x`.
    pub fn band_curve(&self, x: f64) -> f64 {
        -(self.nu as f64 * x.ln() - self.sigma) / (2.0 * self.radius)
    }

    /// Half-width of the band between the case boundaries.
    pub fn half_width(&self) -> f64 {
        1.5 / (2.0 * self.radius)
    }

    pub fn safe_radius(&self, n: u32) -> f64 {
        (2.0 * n as f64 * PI + self.tau) / (2.0 * self.radius)
    }

    pub fn safe_radii(&self, n_range: std::ops::RangeInclusive<u32>) -> Vec<f64> {
        n_range.map(|n| self.safe_radius(n)).collect()
    }
}

/// One line of the band report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub z: [f64; 2],
    pub predicted: f64,
    pub deviation: f64,
    pub in_band: bool,
}

/// Compares resonances with `|Re z| ≥ min_re` against the band curve.
pub fn band_report(resonances: &[C64], model: &BandModel, min_re: f64) -> Vec<BandRow> {
    resonances
        .iter()
        .filter(|z| z.im < 0.0 && z.re.abs() >= min_re && z.re != 0.0)
        .map(|z| {
            let predicted = model.band_curve(z.re.abs());
            let deviation = z.im - predicted;
            BandRow {
                z: [z.re, z.im],
                predicted,
                deviation,
                in_band: deviation.abs() <= 2.0 * model.half_width(),
            }
        })
        .collect()
}

pub fn write_band_csv<W: Write>(mut w: W, header: &str, rows: &[BandRow]) -> std::io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "re_z,im_z,predicted_im,deviation,in_band")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.z[0], r.z[1], r.predicted, r.deviation, r.in_band
        )?;
    }
    Ok(())
}

/// `min |f(z)|/|z|^g` over `samples` points of the lower semicircle `|z| = radius`.
pub fn semicircle_min<F>(f: &F, genus: usize, radius: f64, samples: usize) -> f64
where
    F: Fn(C64) -> C64 + Sync,
{
    (0..=samples)
        .into_par_iter()
        .map(|k| {
            let theta = -PI * k as f64 / samples as f64;
            let z = C64::from_polar(radius, theta);
            f(z).norm() / radius.powi(genus as i32)
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// Smallest index from which every safe semicircle up to `n_max` satisfies
/// `|ψ(z,0)| ≥ |z|^g/3`; `None` if even `n_max` fails.
pub fn onset_index<F>(f: &F, genus: usize, model: &BandModel, n_max: u32, samples: usize) -> Option<u32>
where
    F: Fn(C64) -> C64 + Sync,
{
    let mut onset = None;
    for n in (1..=n_max).rev() {
        if semicircle_min(f, genus, model.safe_radius(n), samples) >= 1.0 / 3.0 {
            onset = Some(n);
        } else {
            break;
        }
    }
    onset
}

/// Which half of the lower half plane a sequence of resonances lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }
}

/// Band law `2iRz − ν Log z + C + D/z = ±iπ(2k + 1)` fitted to consecutive
/// resonances on one side, `k` counting outward from the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandLaw {
    pub side: Side,
    pub radius: f64,
    pub nu: f64,
    pub offset: C64,
    pub correction: C64,
    /// Label of the last zero used in the fit.
    pub last_label: i64,
    pub max_residual: f64,
}

/// Least-squares fit of the band law; `zeros` must be consecutive and
/// ordered outward.
pub fn fit_band_law(zeros: &[C64], side: Side) -> Result<BandLaw> {
    if zeros.len() < 4 {
        return Err(Error::InsufficientZeros(format!(
            "band-law fit needs at least 4 consecutive resonances, got {}",
            zeros.len()
        )));
    }
    let sgn = side.sign();
    let mut rows = Vec::with_capacity(2 * zeros.len());
    let mut rhs = Vec::with_capacity(2 * zeros.len());
    for (k, &z) in zeros.iter().enumerate() {
        let w = 1.0 / z;
        let (lnr, arg) = (z.norm().ln(), z.arg());
        rows.push(vec![-2.0 * z.im, -lnr, 1.0, 0.0, w.re, -w.im]);
        rhs.push(0.0);
        rows.push(vec![2.0 * z.re, -arg, 0.0, 1.0, w.im, w.re]);
        rhs.push(sgn * PI * (2 * k + 1) as f64);
    }
    let sol = solve_real(&rows, &rhs)?;
    let x = &sol.x;
    let max_residual = sol.residual.iter().map(|r| r.abs()).fold(0.0, f64::max);
    if !(x[0] > 0.0) || max_residual > 0.5 {
        return Err(Error::IllConditionedFit(format!(
            "band-law fit failed (R = {}, residual {max_residual:e}); resonances may not be consecutive",
            x[0]
        )));
    }
    Ok(BandLaw {
        side,
        radius: x[0],
        nu: x[1],
        offset: C64::new(x[2], x[3]),
        correction: C64::new(x[4], x[5]),
        last_label: zeros.len() as i64 - 1,
        max_residual,
    })
}

impl BandLaw {
    fn equation(&self, z: C64, k: i64) -> (C64, C64) {
        let g = 2.0 * I * self.radius * z - self.nu * z.ln() + self.offset + self.correction / z
            - I * (self.side.sign() * PI * (2 * k + 1) as f64);
        let dg = 2.0 * I * self.radius - self.nu / z - self.correction / (z * z);
        (g, dg)
    }

    /// Continues the sequence past its last two members `prev`, `last` until
    /// the modulus exceeds `until`.
    pub fn extend(&self, prev: C64, last: C64, until: f64) -> Vec<C64> {
        let mut out = Vec::new();
        let (mut a, mut b) = (prev, last);
        let mut k = self.last_label;
        while b.norm() < until {
            k += 1;
            let mut z = b + (b - a);
            for _ in 0..50 {
                let (g, dg) = self.equation(z, k);
                let step = g / dg;
                z -= step;
                if step.norm() < 1e-14 * z.norm() {
                    break;
                }
            }
            out.push(z);
            a = b;
            b = z;
        }
        out
    }
}

/// `Σ_{m ≥ 1} (last + m·step)^{−k}` for `k = 0..=kmax` by the integral
/// approximation `(last + step/2)^{1−k} / ((k−1) step)`; entries 0 and 1 are
/// left at zero.
pub fn tail_power_sums(last: C64, step: f64, kmax: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); kmax + 1];
    let mid = last + step / 2.0;
    for (k, slot) in out.iter_mut().enumerate().skip(2) {
        *slot = mid.powi(1 - k as i32) / ((k - 1) as f64 * step);
    }
    out
}
