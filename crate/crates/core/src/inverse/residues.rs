//! `ψ^{(r,1)}(z_j,0)` from the Wronskian identity and the residues of
//! `h_z M` at the zeros.

use super::hadamard::HadamardModel;
use crate::error::{Error, Result};
use crate::numeric::cauchy::taylor_coeffs;
use crate::numeric::{binomial, factorial, C64};
use crate::potential::WronskianPoly;
use rayon::prelude::*;

/// Cauchy circles never exceed this radius.
const MAX_RADIUS: f64 = 0.1;

/// Data for the residue of `h_z M` at one zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueEntry {
    pub z: C64,
    pub multiplicity: usize,
    /// `ψ^{(r,1)}(z_j, 0)` for `r < n_j`.
    pub psi_x: Vec<C64>,
    /// Taylor coefficients of `f_j(μ) = (μ − z_j)^{n_j}/Ψ(μ)` at `z_j`.
    pub f_taylor: Vec<C64>,
    /// `ψ^{(0,1)}(z_j,0) f_j(z_j)`, the full residue factor of a simple zero.
    pub simple_factor: C64,
    pub synthetic: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidueData {
    pub entries: Vec<ResidueEntry>,
}

/// `h_z^{(i)}(μ)` for `h_z(μ) = (z/μ)^{p+1}/(z − μ)`.
pub fn h_derivative(z: C64, mu: C64, i: usize, p: usize) -> C64 {
    if i == 0 {
        return (z / mu).powu(p as u32 + 1) / (z - mu);
    }
    let mut acc = factorial(i) / (z - mu).powu(i as u32 + 1);
    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
    for k in 0..=p {
        let ratio = factorial(k + i) / factorial(k);
        acc += sign * ratio * z.powu(k as u32) * mu.powi(-((k + i + 1) as i32));
    }
    acc
}

impl ResidueEntry {
    /// `res_{μ = z_j} h_z(μ) M(μ)`.
    pub fn residue(&self, z: C64, p: usize) -> C64 {
        let n = self.multiplicity;
        if n == 1 {
            return self.simple_factor * h_derivative(z, self.z, 0, p);
        }
        let h: Vec<C64> = (0..n).map(|i| h_derivative(z, self.z, i, p)).collect();
        let hf = |m: usize| -> C64 {
            (0..=m)
                .map(|i| binomial(m, i) * h[i] * factorial(m - i) * self.f_taylor[m - i])
                .sum()
        };
        let total: C64 = (0..n)
            .map(|r| binomial(n - 1, r) * self.psi_x[r] * hf(n - 1 - r))
            .sum();
        total / factorial(n - 1)
    }
}

fn nearest_distance(zeros: &[(C64, usize)], at: C64, skip: Option<usize>) -> f64 {
    zeros
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, (z, _))| (z - at).norm())
        .fold(f64::INFINITY, f64::min)
}

fn entry(model: &HadamardModel, w: &WronskianPoly, j: usize, genus: usize, nodes: usize) -> Result<ResidueEntry> {
    let zeros = model.zeros();
    let (zj, n) = zeros[j];
    if w.relative_size(zj) < 1e-12 {
        return Err(Error::WZeroCollision { z: zj });
    }
    let log_minus = model.log_psi(-zj);
    let floor = (1e-13f64).ln() + genus as f64 * zj.norm().max(1.0).ln();
    if !log_minus.re.is_finite() || log_minus.re < floor {
        return Err(Error::PsiMinusZeroVanishes { index: j });
    }
    let synthetic = j >= model.retained();
    if n == 1 {
        let log_f = model.log_f(j, zj);
        let inv_minus = (-log_minus).exp();
        let psi_x = -w.eval(zj) * inv_minus;
        let f0 = log_f.exp();
        return Ok(ResidueEntry {
            z: zj,
            multiplicity: 1,
            psi_x: vec![psi_x],
            f_taylor: vec![f0],
            simple_factor: -w.eval(zj) * (log_f - log_minus).exp(),
            synthetic,
        });
    }

    let r_minus = MAX_RADIUS.min(0.5 * nearest_distance(zeros, -zj, None));
    let c = taylor_coeffs(|mu| (model.log_psi(mu) - log_minus).exp(), -zj, r_minus, n, nodes);
    let inv_minus = (-log_minus).exp();
    let mut psi_x: Vec<C64> = Vec::with_capacity(n);
    for r in 0..n {
        let mut v = -w.derivative(r, zj) * inv_minus;
        for (s, ps) in psi_x.iter().enumerate() {
            let sign = if (r - s) % 2 == 0 { 1.0 } else { -1.0 };
            v -= binomial(r, s) * sign * ps * factorial(r - s) * c[r - s];
        }
        psi_x.push(v);
    }
    let r_here = MAX_RADIUS.min(0.5 * nearest_distance(zeros, zj, Some(j)));
    let f_taylor = taylor_coeffs(|mu| model.log_f(j, mu).exp(), zj, r_here, n, nodes);
    Ok(ResidueEntry {
        z: zj,
        multiplicity: n,
        simple_factor: psi_x[0] * f_taylor[0],
        psi_x,
        f_taylor,
        synthetic,
    })
}

/// Residue data for the first `count` zeros of the model.
pub fn wronskian_recursion(
    model: &HadamardModel,
    w: &WronskianPoly,
    genus: usize,
    count: usize,
    nodes: usize,
) -> Result<ResidueData> {
    let entries = (0..count.min(model.zeros().len()))
        .into_par_iter()
        .map(|j| entry(model, w, j, genus, nodes))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueData { entries })
}

/// Per-zero residues of `h_z M` at `z`.
pub fn residues(data: &ResidueData, z: C64, p: usize) -> Result<Vec<C64>> {
    for e in &data.entries {
        if (z - e.z).norm() <= 1e-12 * e.z.norm().max(1.0) {
            return Err(Error::EvaluationAtPole { z });
        }
    }
    Ok(data.entries.iter().map(|e| e.residue(z, p)).collect())
}
