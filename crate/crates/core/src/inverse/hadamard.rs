//! Genus-one Hadamard products `e^{a₀+a₁z} Π E₁(z/z_j)^{n_j}` with an optional
//! analytic tail for zeros beyond the last listed one.

use crate::error::{Error, Result};
use crate::numeric::lsq::solve_complex;
use crate::numeric::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `log(1 − w)`, with the cut side fixed so that negative reals map to `+iπ`.
pub(crate) fn log1m(w: C64) -> C64 {
    let u = C64::new(1.0, 0.0) - w;
    if u.re < 0.0 && u.im.abs() <= 1e-15 * u.re.abs() {
        C64::new((-u.re).ln(), PI)
    } else {
        u.ln()
    }
}

/// `log E₁(w) = log(1 − w) + w`.
pub(crate) fn log_e1(w: C64) -> C64 {
    log1m(w) + w
}

/// Least-squares points on the positive imaginary axis, geometrically spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayFit {
    pub y: Vec<f64>,
    /// Number of `z^{−k}` nuisance columns absorbing the `O(1/z)` approach.
    pub inverse_powers: usize,
}

impl RayFit {
    pub fn geometric(lo: f64, hi: f64, count: usize, inverse_powers: usize) -> Self {
        let count = count.max(2);
        let ratio = (hi / lo).powf(1.0 / (count - 1) as f64);
        RayFit {
            y: (0..count).map(|k| lo * ratio.powi(k as i32)).collect(),
            inverse_powers,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        self.y.iter().map(|&y| C64::new(0.0, y))
    }

    /// Complex least squares for `Σ c_k z^k + Σ s_m g_m(z) ≈ rhs(z)` over
    /// `k ∈ powers`, plus `(y₀/z)^k` nuisance columns for
    /// `1 ≤ k ≤ inverse_powers`. Returns `(c, s)` and the largest residual.
    pub(crate) fn solve_with<F>(
        &self,
        powers: &[usize],
        custom: &[&dyn Fn(C64) -> C64],
        rhs: F,
    ) -> Result<(Vec<C64>, Vec<C64>, f64)>
    where
        F: Fn(C64) -> C64,
    {
        let y0 = self.y[0];
        let ncols = powers.len() + custom.len() + self.inverse_powers;
        if self.y.len() < ncols {
            return Err(Error::InsufficientZeros(format!(
                "ray fit has {} points for {ncols} unknowns",
                self.y.len()
            )));
        }
        let mut rows = Vec::with_capacity(self.y.len());
        let mut b = Vec::with_capacity(self.y.len());
        for z in self.points() {
            let s = z / y0;
            let mut row: Vec<C64> = powers.iter().map(|&k| s.powu(k as u32)).collect();
            row.extend(custom.iter().map(|g| g(z)));
            row.extend((1..=self.inverse_powers).map(|k| s.powi(-(k as i32))));
            rows.push(row);
            b.push(rhs(z));
        }
        let sol = solve_complex(&rows, &b)?;
        let coeffs = powers
            .iter()
            .enumerate()
            .map(|(i, &k)| sol.x[i] / y0.powi(k as i32))
            .collect();
        let scales = sol.x[powers.len()..powers.len() + custom.len()].to_vec();
        let resid = sol.residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
        Ok((coeffs, scales, resid))
    }

    /// Polynomial columns `z^k` for `k ≤ degree` only.
    pub(crate) fn solve<F>(&self, degree: usize, rhs: F) -> Result<(Vec<C64>, f64)>
    where
        F: Fn(C64) -> C64,
    {
        let powers: Vec<usize> = (0..=degree).collect();
        let (c, _, r) = self.solve_with(&powers, &[], rhs)?;
        Ok((c, r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HadamardModel {
    zeros: Vec<(C64, usize)>,
    retained: usize,
    /// Power sums `T_k = Σ z_m^{−k}` of zeros beyond the list, index `k`.
    tail: Vec<C64>,
    pub a0: C64,
    pub a1: C64,
    /// Fitted corrections to `−T_k/k` for `k = 2, 3, …`, absorbing the error of
    /// the synthetic tail.
    pub tail_correction: Vec<C64>,
    /// Largest least-squares residual of the log fit.
    pub lsq_residual: f64,
}

impl HadamardModel {
    /// Product over `zeros` (the first `retained` are data, the rest
    /// synthetic) with exponent polynomial fitted so that `log Ψ` matches
    /// `log_target` on the ray.
    pub fn fit<F>(
        zeros: Vec<(C64, usize)>,
        retained: usize,
        tail: Vec<C64>,
        corrections: usize,
        ray: &RayFit,
        log_target: F,
    ) -> Result<Self>
    where
        F: Fn(C64) -> C64,
    {
        if zeros.iter().any(|(z, _)| z.norm() < 1e-12) {
            return Err(Error::ZeroAtOrigin);
        }
        let mut model = HadamardModel {
            zeros,
            retained,
            tail,
            a0: C64::new(0.0, 0.0),
            a1: C64::new(0.0, 0.0),
            tail_correction: vec![],
            lsq_residual: 0.0,
        };
        let (a, resid) = ray.solve(1 + corrections, |z| log_target(z) - model.log_psi(z))?;
        model.a0 = a[0];
        model.a1 = a[1];
        model.tail_correction = a[2..].to_vec();
        model.lsq_residual = resid;
        Ok(model)
    }

    /// Fit against `ψ(iy,0) ~ (iy)^g`.
    pub fn fit_genus(
        zeros: Vec<(C64, usize)>,
        retained: usize,
        tail: Vec<C64>,
        corrections: usize,
        genus: usize,
        ray: &RayFit,
    ) -> Result<Self> {
        Self::fit(zeros, retained, tail, corrections, ray, |z| genus as f64 * z.ln())
    }

    pub fn zeros(&self) -> &[(C64, usize)] {
        &self.zeros
    }

    pub fn retained(&self) -> usize {
        self.retained
    }

    pub fn truncation_count(&self) -> usize {
        self.zeros.len()
    }

    /// Elementary-factor degree.
    pub fn rho(&self) -> u32 {
        1
    }

    fn tail_log(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut zk = z;
        for (k, t) in self.tail.iter().enumerate().skip(1) {
            if k >= 2 {
                acc -= zk * t / k as f64;
            }
            zk *= z;
        }
        let z2 = z * z;
        let mut zk = z2;
        for c in &self.tail_correction {
            acc += c * zk;
            zk *= z;
        }
        acc
    }

    fn log_factors(&self, z: C64, skip: Option<usize>) -> C64 {
        self.zeros
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .map(|(_, &(zj, n))| log_e1(z / zj) * n as f64)
            .sum::<C64>()
            + self.tail_log(z)
    }

    pub fn log_psi(&self, z: C64) -> C64 {
        self.a0 + self.a1 * z + self.log_factors(z, None)
    }

    pub fn psi(&self, z: C64) -> C64 {
        self.log_psi(z).exp()
    }

    /// `log G_j(μ)`, the product without the factors of zero `j`.
    pub fn log_cofactor(&self, j: usize, mu: C64) -> C64 {
        self.a0 + self.a1 * mu + self.log_factors(mu, Some(j))
    }

    /// `log f_j(μ)` for `f_j(μ) = (μ − z_j)^{n_j}/Ψ(μ)`, analytic at `z_j`.
    pub fn log_f(&self, j: usize, mu: C64) -> C64 {
        let (zj, n) = self.zeros[j];
        let n = n as f64;
        n * (-zj).ln() - n * mu / zj - self.log_cofactor(j, mu)
    }

    /// `max |Ψ(iy)/(iy)^g − 1|` over the ray points.
    pub fn normalization_defect(&self, genus: usize, ray: &RayFit) -> f64 {
        ray.points()
            .map(|z| (self.log_psi(z) - genus as f64 * z.ln()).exp() - 1.0)
            .map(|d| d.norm())
            .fold(0.0, f64::max)
    }
}

/// Hadamard fit from located zeros alone, without tail completion.
pub fn hadamard_fit(zeros: &[(C64, usize)], genus: usize, ray: &RayFit) -> Result<HadamardModel> {
    HadamardModel::fit_genus(zeros.to_vec(), zeros.len(), vec![], 0, genus, ray)
}
