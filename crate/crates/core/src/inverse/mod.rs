//! Reconstruction of `M(z) = ψ'(z,0)/ψ(z,0)` from its zeros, the genus and
//! the Wronskian polynomial.
//!
//! `ψ(·,0)` is rebuilt as a genus-one Hadamard product, `ψ'(z_j,0)` follows
//! from `W(z) = ψ(z)ψ'(−z) − ψ'(z)ψ(−z)` at each zero, and
//! `M(z) = P(z) + Σ_j res_{z_j}(h_z M)` with `h_z(μ) = (z/μ)^{p+1}/(z − μ)`
//! and a polynomial `P` of degree `p` fitted on the positive imaginary axis
//! against `M(z) = iz + o(1)`.

mod hadamard;
mod residues;
mod tail;

pub use hadamard::{hadamard_fit, HadamardModel, RayFit};
pub use residues::{h_derivative, residues, wronskian_recursion, ResidueData, ResidueEntry};
pub use tail::{complete_tail, sides, SideTail, TailCompletion, TailConfig};

use crate::error::{Error, Result};
use crate::format::{pair, Header};
use crate::numeric::{C64, I};
use crate::potential::WronskianPoly;
use crate::roots::ZeroSet;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseConfig {
    /// Keep only the `retain` zeros of smallest modulus.
    pub retain: Option<usize>,
    /// Degree of the polynomial part.
    pub p: usize,
    /// Extra powers `z^{p+1}, …` in the polynomial fit, absorbing the low-order
    /// Taylor terms of the residue-sum error from distant zeros.
    pub extra_degree: usize,
    /// Powers `z², z³, …` added to the Hadamard exponent fit, correcting the
    /// synthetic tail.
    pub tail_corrections: usize,
    /// `z^{−k}` columns in the Hadamard fit.
    pub hadamard_inverse_powers: usize,
    /// Take `M'(0)` from the Wronskian identity instead of the ray fit
    /// (needs `p ≥ 1`).
    pub wronskian_slope: bool,
    /// Ray window for both fits, in units of the largest retained modulus.
    pub fit_window: [f64; 2],
    pub fit_points: usize,
    /// `z^{−k}` columns in the polynomial-part fit.
    pub inverse_powers: usize,
    /// Band-law completion of the zero list; `None` truncates.
    pub tail: Option<TailConfig>,
    pub cauchy_nodes: usize,
    /// Largest acceptable least-squares residual of the Hadamard fit.
    pub fit_tol: f64,
}

impl Default for InverseConfig {
    fn default() -> Self {
        InverseConfig {
            retain: None,
            p: 2,
            extra_degree: 1,
            tail_corrections: 2,
            hadamard_inverse_powers: 6,
            wronskian_slope: true,
            fit_window: [0.1, 0.3],
            fit_points: 40,
            inverse_powers: 3,
            tail: Some(TailConfig::default()),
            cauchy_nodes: 32,
            fit_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MReconstruction {
    pub hadamard: HadamardModel,
    pub residues: ResidueData,
    pub tail: TailCompletion,
    /// Coefficients of `P`, constant first.
    pub poly: Vec<C64>,
    pub p: usize,
    pub genus: usize,
    pub ray: RayFit,
    /// Largest residual of the polynomial-part fit.
    pub poly_residual: f64,
    tail_series: Vec<C64>,
}

fn zero_list(set: &ZeroSet, retain: Option<usize>) -> Vec<(C64, usize)> {
    let mut zeros: Vec<(C64, usize)> = set.zeros.iter().map(|z| (z.z, z.multiplicity)).collect();
    zeros.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()));
    if let Some(n) = retain {
        zeros.truncate(n);
    }
    zeros
}

/// Rebuilds `M` from a located zero set.
pub fn reconstruct_m(
    zero_set: &ZeroSet,
    genus: usize,
    w: &WronskianPoly,
    cfg: &InverseConfig,
) -> Result<MReconstruction> {
    if cfg.fit_window[0] <= 0.0 || cfg.fit_window[1] <= cfg.fit_window[0] {
        return Err(Error::InvalidInput(format!(
            "fit_window must satisfy 0 < lo < hi, got {:?}",
            cfg.fit_window
        )));
    }
    let retained = zero_list(zero_set, cfg.retain);
    for &(z, _) in &retained {
        if w.relative_size(z) < 1e-12 {
            return Err(Error::WZeroCollision { z });
        }
    }
    let scale = retained.last().map_or(1.0, |(z, _)| z.norm());
    let ray = RayFit::geometric(
        cfg.fit_window[0] * scale,
        cfg.fit_window[1] * scale,
        cfg.fit_points,
        cfg.inverse_powers,
    );

    let (tail, kmax) = match &cfg.tail {
        Some(tc) => (complete_tail(&retained, tc)?, tc.kmax),
        None => (TailCompletion::default(), 0),
    };
    let mut synthetic: Vec<C64> = tail.synthetic().collect();
    synthetic.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let cutoff = match &cfg.tail {
        Some(tc) if tail.count() > 0 => tc.residue_fraction * tail.max_modulus(),
        _ => f64::INFINITY,
    };
    let with_residue = retained.len() + synthetic.iter().filter(|z| z.norm() <= cutoff).count();

    let mut all = retained.clone();
    all.extend(synthetic.iter().map(|&z| (z, 1)));
    let hadamard_ray = RayFit {
        inverse_powers: cfg.hadamard_inverse_powers,
        ..ray.clone()
    };
    let hadamard = HadamardModel::fit_genus(
        all,
        retained.len(),
        tail.power_sums(kmax),
        cfg.tail_corrections,
        genus,
        &hadamard_ray,
    )?;
    if hadamard.lsq_residual > cfg.fit_tol {
        return Err(Error::IllConditionedFit(format!(
            "Hadamard fit residual {:e} exceeds {:e} with {} retained and {} synthetic zeros",
            hadamard.lsq_residual,
            cfg.fit_tol,
            retained.len(),
            synthetic.len()
        )));
    }
    log::info!(
        "Hadamard fit: a0 = {}, a1 = {}, residual {:e}",
        hadamard.a0,
        hadamard.a1,
        hadamard.lsq_residual
    );

    let residues = wronskian_recursion(&hadamard, w, genus, with_residue, cfg.cauchy_nodes)?;
    let tail_series = if kmax > 0 {
        tail.residue_series(cutoff, cfg.p, kmax)
    } else {
        vec![]
    };
    // M(z) − M(−z) = −W(z)/(Ψ(z)Ψ(−z)) fixes M'(0) once a₀ is known.
    let w1 = w.coeffs.get(1).copied().unwrap_or_default();
    let fixed_slope = cfg.wronskian_slope && cfg.p >= 1;
    let slope = if fixed_slope {
        -w1 / 2.0 * (-2.0 * hadamard.a0).exp()
    } else {
        C64::new(0.0, 0.0)
    };
    let mut rec = MReconstruction {
        hadamard,
        residues,
        tail,
        poly: vec![],
        p: cfg.p,
        genus,
        ray,
        poly_residual: 0.0,
        tail_series,
    };
    let degree = cfg.p + cfg.extra_degree;
    let powers: Vec<usize> = (0..=degree)
        .filter(|&k| k != 1 || !fixed_slope)
        .collect();
    let (c, _, resid) = rec
        .ray
        .solve_with(&powers, &[], |z| I * z - rec.residue_sum(z) - slope * z)?;
    let mut poly = vec![C64::new(0.0, 0.0); degree + 1];
    for (&k, v) in powers.iter().zip(c) {
        poly[k] = v;
    }
    if fixed_slope {
        poly[1] = slope;
    }
    rec.poly = poly;
    rec.poly_residual = resid;
    Ok(rec)
}

impl MReconstruction {
    fn series(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        let mut zn = C64::new(1.0, 0.0);
        for c in &self.tail_series {
            acc += zn * c;
            zn *= z;
        }
        acc
    }

    /// Residue series including synthetic zeros and the far tail.
    fn residue_sum(&self, z: C64) -> C64 {
        self.residues
            .entries
            .iter()
            .map(|e| e.residue(z, self.p))
            .sum::<C64>()
            + self.series(z)
    }

    /// Contribution of everything beyond the located zeros.
    pub fn tail_contribution(&self, z: C64) -> C64 {
        self.residues
            .entries
            .iter()
            .filter(|e| e.synthetic)
            .map(|e| e.residue(z, self.p))
            .sum::<C64>()
            + self.series(z)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        for e in &self.residues.entries {
            if (z - e.z).norm() <= 1e-12 * e.z.norm().max(1.0) {
                return Err(Error::EvaluationAtPole { z });
            }
        }
        let poly = self
            .poly
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
        Ok(poly + self.residue_sum(z))
    }

    /// `M(0)`.
    pub fn m0(&self) -> C64 {
        self.poly[0]
    }

    /// `M'(0)`.
    pub fn m0_prime(&self) -> C64 {
        self.poly.get(1).copied().unwrap_or_default()
    }

    pub fn retained(&self) -> usize {
        self.hadamard.retained()
    }

    pub fn synthetic(&self) -> usize {
        self.tail.count()
    }

    pub fn report(&self, header: Option<Header>, points: &[C64]) -> Result<ReconstructionReport> {
        let mut tail_estimate: f64 = 0.0;
        for &z in points {
            let m = self.eval(z)?;
            tail_estimate = tail_estimate.max(self.tail_contribution(z).norm() / m.norm());
        }
        Ok(ReconstructionReport {
            header,
            genus: self.genus,
            rho: self.hadamard.rho(),
            a0: pair(self.hadamard.a0),
            a1: pair(self.hadamard.a1),
            p: self.p,
            polynomial: self.poly.iter().map(|&c| pair(c)).collect(),
            m0: pair(self.m0()),
            m0_prime: pair(self.m0_prime()),
            retained: self.retained(),
            synthetic: self.synthetic(),
            hadamard_residual: self.hadamard.lsq_residual,
            normalization_defect: self.hadamard.normalization_defect(self.genus, &self.ray),
            poly_residual: self.poly_residual,
            tail_estimate,
            band_laws: self
                .tail
                .sides
                .iter()
                .map(|s| BandLawRecord {
                    side: s.law.side,
                    radius: s.law.radius,
                    nu: s.law.nu,
                    synthetic: s.synthetic.len(),
                })
                .collect(),
            zeros: self
                .residues
                .entries
                .iter()
                .filter(|e| !e.synthetic)
                .map(|e| ResidueRecord {
                    z: pair(e.z),
                    mult: e.multiplicity,
                    psi_x: e.psi_x.iter().map(|&c| pair(c)).collect(),
                    residue_factor: pair(e.simple_factor),
                })
                .collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLawRecord {
    pub side: crate::asymptotics::Side,
    #[serde(rename = "R")]
    pub radius: f64,
    pub nu: f64,
    pub synthetic: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueRecord {
    pub z: [f64; 2],
    pub mult: usize,
    /// `ψ^{(r,1)}(z_j,0)` for `r < mult`.
    pub psi_x: Vec<[f64; 2]>,
    /// `ψ'(z_j,0)/∂_zψ(z_j,0)` for simple zeros.
    pub residue_factor: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub header: Option<Header>,
    pub genus: usize,
    pub rho: u32,
    pub a0: [f64; 2],
    pub a1: [f64; 2],
    pub p: usize,
    pub polynomial: Vec<[f64; 2]>,
    pub m0: [f64; 2],
    pub m0_prime: [f64; 2],
    pub retained: usize,
    pub synthetic: usize,
    pub hadamard_residual: f64,
    pub normalization_defect: f64,
    pub poly_residual: f64,
    /// Largest relative share of `M` carried by zeros beyond the located ones.
    pub tail_estimate: f64,
    pub band_laws: Vec<BandLawRecord>,
    pub zeros: Vec<ResidueRecord>,
}

/// One comparison row against a forward reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub z: C64,
    pub m_rec: C64,
    pub m_fwd: C64,
}

impl ComparisonRow {
    pub fn rel_err(&self) -> f64 {
        (self.m_rec - self.m_fwd).norm() / self.m_fwd.norm()
    }
}

pub fn write_comparison_csv<W: Write>(mut w: W, header: &str, rows: &[ComparisonRow]) -> std::io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "re_z,im_z,re_m_rec,im_m_rec,re_m_fwd,im_m_fwd,rel_err")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.6e}",
            r.z.re,
            r.z.im,
            r.m_rec.re,
            r.m_rec.im,
            r.m_fwd.re,
            r.m_fwd.im,
            r.rel_err()
        )?;
    }
    Ok(())
}
