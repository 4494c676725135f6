//! Completion of a truncated resonance list by the fitted band law.

use crate::asymptotics::{fit_band_law, tail_power_sums, BandLaw, Side};
use crate::error::Result;
use crate::numeric::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailConfig {
    /// Synthetic zeros are generated out to `extent · |z_N|`.
    pub extent: f64,
    /// Outer fraction of each side used for the band-law fit.
    pub fit_fraction: f64,
    /// Sides with fewer resonances are left uncompleted.
    pub min_side: usize,
    /// Highest power kept in the analytic tail series.
    pub kmax: usize,
    /// Synthetic zeros inside `residue_fraction ·` (largest synthetic modulus)
    /// get individual residues; the rest enter through power sums.
    pub residue_fraction: f64,
}

impl Default for TailConfig {
    fn default() -> Self {
        TailConfig {
            extent: 20.0,
            fit_fraction: 0.5,
            min_side: 8,
            kmax: 24,
            residue_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideTail {
    pub law: BandLaw,
    pub synthetic: Vec<C64>,
    /// `Σ z^{−k}` over the implied zeros past the last synthetic one.
    pub power_sums: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TailCompletion {
    pub sides: Vec<SideTail>,
}

impl TailCompletion {
    pub fn synthetic(&self) -> impl Iterator<Item = C64> + '_ {
        self.sides.iter().flat_map(|s| s.synthetic.iter().copied())
    }

    pub fn count(&self) -> usize {
        self.sides.iter().map(|s| s.synthetic.len()).sum()
    }

    pub fn power_sums(&self, kmax: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); kmax + 1];
        for s in &self.sides {
            for (o, t) in out.iter_mut().zip(&s.power_sums) {
                *o += t;
            }
        }
        out
    }

    pub fn max_modulus(&self) -> f64 {
        self.synthetic().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coefficients of `z^n`, `n > p`, of `Σ r_k (z/z_k)^{p+1}/(z − z_k)` over
    /// zeros beyond `cutoff`, using `r_k ≈ −z_k/R` from the band law.
    pub fn residue_series(&self, cutoff: f64, p: usize, kmax: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); kmax + 1];
        for s in &self.sides {
            let inv_r = 1.0 / s.law.radius;
            for n in (p + 1)..=kmax {
                let mut acc = s.power_sums.get(n).copied().unwrap_or_default();
                for z in s.synthetic.iter().filter(|z| z.norm() > cutoff) {
                    acc += z.powi(-(n as i32));
                }
                out[n] += acc * inv_r;
            }
        }
        out
    }
}

/// Splits simple resonances into right and left sequences ordered outward.
pub fn sides(zeros: &[(C64, usize)]) -> (Vec<C64>, Vec<C64>) {
    let mut right: Vec<C64> = zeros
        .iter()
        .filter(|(z, n)| *n == 1 && z.im < 0.0 && z.re > 0.0)
        .map(|(z, _)| *z)
        .collect();
    let mut left: Vec<C64> = zeros
        .iter()
        .filter(|(z, n)| *n == 1 && z.im < 0.0 && z.re < 0.0)
        .map(|(z, _)| *z)
        .collect();
    right.sort_by(|a, b| a.re.total_cmp(&b.re));
    left.sort_by(|a, b| b.re.total_cmp(&a.re));
    (right, left)
}

/// Fits the band law on each side and extends it out to `extent` times the
/// largest retained modulus.
pub fn complete_tail(zeros: &[(C64, usize)], cfg: &TailConfig) -> Result<TailCompletion> {
    let reach = cfg.extent * zeros.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max);
    let (right, left) = sides(zeros);
    let mut out = TailCompletion::default();
    for (seq, side) in [(right, Side::Right), (left, Side::Left)] {
        if seq.is_empty() {
            continue;
        }
        if seq.len() < cfg.min_side.max(4) {
            log::warn!(
                "{side:?} side has {} resonances; tail left uncompleted",
                seq.len()
            );
            continue;
        }
        let k0 = ((seq.len() as f64) * (1.0 - cfg.fit_fraction)) as usize;
        let k0 = k0.min(seq.len() - 4);
        let law = fit_band_law(&seq[k0..], side)?;
        let n = seq.len();
        let synthetic = law.extend(seq[n - 2], seq[n - 1], reach);
        let (prev, last) = match synthetic.len() {
            0 => (seq[n - 2], seq[n - 1]),
            1 => (seq[n - 1], synthetic[0]),
            m => (synthetic[m - 2], synthetic[m - 1]),
        };
        let power_sums = tail_power_sums(last, (last - prev).re, cfg.kmax);
        log::debug!(
            "{side:?} band law R = {:.6} nu = {:.4}, {} synthetic zeros",
            law.radius,
            law.nu,
            synthetic.len()
        );
        out.sides.push(SideTail {
            law,
            synthetic,
            power_sums,
        });
    }
    Ok(out)
}
