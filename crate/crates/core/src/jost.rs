//! Perturbed Jost solutions and the M-function.
//!
//! `ψ(z,x) = ψ₀(z,x) + ∫_x^{2R−x} K(t,x) ψ₀(z,t) dt` is evaluated on the kernel
//! grid; an independent backward ODE integration from `x = R` serves as a cross
//! check.

use crate::error::{Error, Result};
use crate::kernel::{Kernel, Perturbation};
use crate::numeric::quad::{filon, simpson};
use crate::numeric::C64;
use crate::potential::{BasePotential, WronskianPoly};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Kernel,
    Ode,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Kernel => write!(f, "kernel"),
            Method::Ode => write!(f, "ode"),
        }
    }
}

/// Step selection for the RK4 oracle: `h = min(max_step, phase_step/|z|)`
/// unless `step` is given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub max_step: f64,
    pub phase_step: f64,
    pub step: Option<f64>,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            max_step: 2.5e-3,
            phase_step: 0.01,
            step: None,
        }
    }
}

impl OdeConfig {
    pub fn step_for(&self, z: C64) -> Result<f64> {
        let h = match self.step {
            Some(h) => h,
            None => {
                let a = z.norm();
                if a > 0.0 {
                    self.max_step.min(self.phase_step / a)
                } else {
                    self.max_step
                }
            }
        };
        let product = z.norm() * h;
        if product > 0.1 {
            return Err(Error::StepTooLarge { product });
        }
        Ok(h)
    }
}

/// Jost solution evaluator for `q = q₀ + d`.
#[derive(Debug, Clone)]
pub struct JostEvaluator {
    base: BasePotential,
    pert: Perturbation,
    kernel: Kernel,
    wronskian: WronskianPoly,
    /// `r_j(ξ(k h))` for `k = 0..=2N`.
    r_table: Vec<Vec<C64>>,
    method: Method,
    ode: OdeConfig,
    known_zeros: Vec<C64>,
}

/// One row of a batch evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchRow {
    pub z: C64,
    pub psi: C64,
    pub m: Option<C64>,
    pub method: Method,
}

impl JostEvaluator {
    pub fn new(base: BasePotential, pert: Perturbation, kernel: Kernel) -> Result<Self> {
        if (kernel.radius() - pert.radius()).abs() > 1e-12 * pert.radius() {
            return Err(Error::InvalidInput(
                "kernel and perturbation have different support radii".into(),
            ));
        }
        let n = kernel.n();
        let h = kernel.step();
        let r_table = (0..=2 * n).map(|k| base.r_values(k as f64 * h)).collect();
        let wronskian = base.wronskian_poly()?;
        Ok(JostEvaluator {
            base,
            pert,
            kernel,
            wronskian,
            r_table,
            method: Method::Kernel,
            ode: OdeConfig::default(),
            known_zeros: vec![],
        })
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_ode_config(mut self, ode: OdeConfig) -> Self {
        self.ode = ode;
        self
    }

    /// Zeros of `ψ(·,0)` used to refuse M evaluations too close to a pole.
    pub fn with_known_zeros(mut self, zeros: Vec<C64>) -> Self {
        self.known_zeros = zeros;
        self
    }

    pub fn base(&self) -> &BasePotential {
        &self.base
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.pert
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn wronskian_poly(&self) -> &WronskianPoly {
        &self.wronskian
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn genus(&self) -> usize {
        self.base.genus()
    }

    fn psi0_grid(&self, z: C64, k: usize) -> C64 {
        self.base.amplitude_from(z, &self.r_table[k])
    }

    /// `(ψ, ψ')` on the grid line `x = m h`.
    fn psi_kernel_line(&self, z: C64, m: usize) -> (C64, C64) {
        let n = self.kernel.n();
        let h = self.kernel.step();
        let x = m as f64 * h;
        let (p0, p0d) = self.base.psi0_pair(z, x);
        if m >= n || self.pert.is_zero() {
            return (p0, p0d);
        }
        let len = n - m + 1;
        let mut gk = Vec::with_capacity(len);
        let mut gd = Vec::with_capacity(len);
        for j in 0..len {
            let a = self.psi0_grid(z, 2 * j + m);
            gk.push(self.kernel.node(j + m, j) * a);
            gd.push(self.kernel.dnode(j + m, j) * a);
        }
        let ik = filon(&gk, x, 2.0 * h, z);
        let id = filon(&gd, x, 2.0 * h, z);
        (p0 + ik, p0d - self.kernel.node(m, 0) * p0 + id)
    }

    /// `(ψ(z,x), ψ'(z,x))` from the kernel, interpolating between grid lines.
    pub fn psi_kernel(&self, z: C64, x: f64) -> (C64, C64) {
        let r = self.kernel.radius();
        if x >= r {
            return self.base.psi0_pair(z, x);
        }
        let h = self.kernel.step();
        let n = self.kernel.n();
        let s = x.max(0.0) / h;
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            return self.psi_kernel_line(z, nearest as usize);
        }
        // cubic Lagrange interpolation across neighbouring grid lines
        let lo = (s.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
        let nodes: Vec<usize> = (lo..lo + 4).collect();
        let vals: Vec<(C64, C64)> = nodes.iter().map(|&m| self.psi_kernel_line(z, m)).collect();
        let mut out = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (a, &ma) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for &mb in &nodes {
                if mb != ma {
                    w *= (s - mb as f64) / (ma as f64 - mb as f64);
                }
            }
            out.0 += vals[a].0 * w;
            out.1 += vals[a].1 * w;
        }
        out
    }

    /// Backward RK4 from `x = R` carried in double-double arithmetic.
    fn ode_state(&self, z: C64, x: f64) -> Result<(Cdd, Cdd)> {
        let r = self.pert.radius();
        let h_target = self.ode.step_for(z)?;
        let (y0, yd0) = self.base.psi0_pair(z, r);
        let (mut y, mut yd) = (dd(y0), dd(yd0));
        let z2 = z * z;
        for (a, b, piece) in self.pert.segments().into_iter().rev() {
            if b <= x {
                break;
            }
            let a = a.max(x);
            let steps = ((b - a) / h_target).ceil().max(1.0) as usize;
            let hs = (b - a) / steps as f64;
            let pot = |t: f64| {
                let d = piece.map_or(C64::new(0.0, 0.0), |p| p.eval(t));
                dd(self.base.q0_shifted(t) + d - z2)
            };
            let half = TwoFloat::from(-0.5 * hs);
            let full = TwoFloat::from(-hs);
            let sixth = full / TwoFloat::from(6.0);
            let two = TwoFloat::from(2.0);
            let mut t = b;
            for _ in 0..steps {
                // y'' = V y, stepping by −hs
                let v0 = pot(t);
                let vm = pot(t - 0.5 * hs);
                let v1 = pot(t - hs);
                let k1y = yd;
                let k1d = v0 * y;
                let k2y = yd + k1d * half;
                let k2d = vm * (y + k1y * half);
                let k3y = yd + k2d * half;
                let k3d = vm * (y + k2y * half);
                let k4y = yd + k3d * full;
                let k4d = v1 * (y + k3y * full);
                y = y + (k1y + (k2y + k3y) * two + k4y) * sixth;
                yd = yd + (k1d + (k2d + k3d) * two + k4d) * sixth;
                t -= hs;
            }
        }
        Ok((y, yd))
    }

    /// `(ψ(z,x), ψ'(z,x))` by backward RK4 from `x = R`.
    pub fn psi_ode(&self, z: C64, x: f64) -> Result<(C64, C64)> {
        if x >= self.pert.radius() {
            return Ok(self.base.psi0_pair(z, x));
        }
        let (y, yd) = self.ode_state(z, x)?;
        Ok((round(y), round(yd)))
    }

    /// `(ψ, ψ')` by the configured method.
    pub fn psi(&self, z: C64, x: f64) -> Result<(C64, C64)> {
        match self.method {
            Method::Kernel => Ok(self.psi_kernel(z, x)),
            Method::Ode => self.psi_ode(z, x),
        }
    }

    /// The Jost function `ψ(z,0)`.
    pub fn jost(&self, z: C64) -> Result<C64> {
        Ok(self.psi(z, 0.0)?.0)
    }

    /// Kernel-route Jost function; infallible, for root finding.
    pub fn jost_kernel(&self, z: C64) -> C64 {
        self.psi_kernel_line(z, 0).0
    }

    /// `W(z)` from the base potential.
    pub fn wronskian(&self, z: C64) -> C64 {
        self.wronskian.eval(z)
    }

    /// `Wr(ψ(z,·), ψ(−z,·))(x)`.
    pub fn wronskian_at(&self, z: C64, x: f64) -> Result<C64> {
        if self.method == Method::Ode && x < self.pert.radius() {
            // ψ(z,0) and ψ(−z,0) differ in size by up to e^{4R|Im z|}
            let (a, ad) = self.ode_state(z, x)?;
            let (b, bd) = self.ode_state(-z, x)?;
            return Ok(round(a * bd - b * ad));
        }
        let (a, ad) = self.psi(z, x)?;
        let (b, bd) = self.psi(-z, x)?;
        Ok(a * bd - b * ad)
    }

    fn guard(&self, z: C64, value: C64) -> Result<()> {
        let nearest = self
            .known_zeros
            .iter()
            .map(|&w| (w - z).norm())
            .fold(f64::INFINITY, f64::min);
        if nearest < 1e-3 || value == C64::new(0.0, 0.0) || !value.is_finite() {
            return Err(Error::NearZeroDenominator {
                z,
                distance: if nearest.is_finite() { nearest } else { 0.0 },
            });
        }
        Ok(())
    }

    /// `M(z) = ψ'(z,0)/ψ(z,0)`.
    pub fn m_direct(&self, z: C64) -> Result<C64> {
        let (p, pd) = self.psi(z, 0.0)?;
        self.guard(z, p)?;
        Ok(pd / p)
    }

    /// `M₀(z) = ψ₀'(z,0)/ψ₀(z,0)`.
    pub fn m0(&self, z: C64) -> Result<C64> {
        let (p, pd) = self.base.psi0_pair(z, 0.0);
        if p == C64::new(0.0, 0.0) {
            return Err(Error::NearZeroDenominator { z, distance: 0.0 });
        }
        Ok(pd / p)
    }

    /// Kernel-route `ψ(z, m h)` for every grid line.
    pub fn psi_on_grid(&self, z: C64) -> Vec<C64> {
        (0..=self.kernel.n())
            .into_par_iter()
            .map(|m| self.psi_kernel_line(z, m).0)
            .collect()
    }

    /// `M₀ − (ψ₀(z,0)ψ(z,0))⁻¹ ∫_0^R ψ₀ ψ (q − q₀) dt`.
    pub fn m_perturbation(&self, z: C64) -> Result<C64> {
        let m0 = self.m0(z)?;
        let psi0_0 = self.base.eval_psi0(z, 0.0);
        let grid = self.psi_on_grid(z);
        let psi_0 = grid[0];
        self.guard(z, psi_0)?;
        let h = self.kernel.step();
        let integrand = |k: usize, d: C64| self.base.eval_psi0(z, k as f64 * h) * grid[k] * d;
        let mut integral = C64::new(0.0, 0.0);
        for (a, b, piece) in self.pert.segments() {
            let Some(piece) = piece else { continue };
            let ka = (a / h).round();
            let kb = (b / h).round();
            if (ka * h - a).abs() > 1e-9 * h || (kb * h - b).abs() > 1e-9 * h {
                return Err(Error::InvalidInput(format!(
                    "perturbation breakpoints {a}, {b} are not on the kernel grid"
                )));
            }
            let vals: Vec<C64> = (ka as usize..=kb as usize)
                .map(|k| integrand(k, piece.eval(k as f64 * h)))
                .collect();
            integral += simpson(&vals, h);
        }
        Ok(m0 - integral / (psi0_0 * psi_0))
    }

    /// `M(−z) − W(z)/(ψ(z,0)ψ(−z,0))`, which equals `M(z)`.
    pub fn reflect_m(&self, z: C64) -> Result<C64> {
        let (p, _) = self.psi(z, 0.0)?;
        self.guard(z, p)?;
        let (pm, pmd) = self.psi(-z, 0.0)?;
        self.guard(-z, pm)?;
        Ok(pmd / pm - self.wronskian(z) / (p * pm))
    }

    pub fn m_function(&self) -> MFunction<'_> {
        MFunction { jost: self }
    }

    /// Evaluates `ψ(z,0)` and `M(z)` at many points in parallel.
    pub fn batch(&self, zs: &[C64]) -> Vec<BatchRow> {
        zs.par_iter()
            .map(|&z| {
                let psi = self.psi(z, 0.0).map(|p| p.0).unwrap_or(C64::new(f64::NAN, f64::NAN));
                BatchRow {
                    z,
                    psi,
                    m: self.m_direct(z).ok(),
                    method: self.method,
                }
            })
            .collect()
    }
}

/// Half plane of `z` relative to the branch cut of `m(λ)` on `λ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// `Im z > 0`: `M(z) = m(z²)` on the physical sheet.
    Physical,
    /// `Im z ≤ 0`: continuation of `m` through the cut.
    Continued,
}

/// `z ↦ M(z) = m(z²)` with the cut of `m` on the positive real axis.
#[derive(Debug, Clone, Copy)]
pub struct MFunction<'a> {
    jost: &'a JostEvaluator,
}

impl MFunction<'_> {
    pub fn eval(&self, z: C64) -> Result<C64> {
        self.jost.m_direct(z)
    }

    pub fn sheet(z: C64) -> Sheet {
        if z.im > 0.0 {
            Sheet::Physical
        } else {
            Sheet::Continued
        }
    }
}

/// Writes `Re z, Im z, Re ψ, Im ψ, Re M, Im M, method` rows.
pub fn write_batch_csv<W: Write>(mut w: W, header: &str, rows: &[BatchRow]) -> std::io::Result<()> {
    w.write_all(header.as_bytes())?;
    writeln!(w, "re_z,im_z,re_psi,im_psi,re_m,im_m,method")?;
    for r in rows {
        let m = r.m.unwrap_or(C64::new(f64::NAN, f64::NAN));
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.z.re, r.z.im, r.psi.re, r.psi.im, m.re, m.im, r.method
        )?;
    }
    Ok(())
}

type Cdd = Complex<TwoFloat>;

fn dd(z: C64) -> Cdd {
    Complex::new(TwoFloat::from(z.re), TwoFloat::from(z.im))
}

fn round(z: Cdd) -> C64 {
    C64::new(f64::from(z.re), f64::from(z.im))
}
