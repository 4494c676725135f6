//! Transformation-operator kernel `K(t,x)` by the Neumann series.
//!
//! In rotated coordinates `u = (t+x)/2`, `v = (t−x)/2` the kernel
//! `L(u,v) = K(u+v, u−v)` solves
//!
//! ```text
//! L(u,v) = ½∫_u^R d + ∫_u^R ∫_0^v F(α,β) L(α,β) dβ dα,
//! F(α,β) = q(α−β) − q₀(α+β),
//! ```
//!
//! on the triangle `0 ≤ v ≤ u ≤ R`, where `d = q − q₀`. Each Neumann term is a
//! cumulative trapezoid integral, so one term costs O(grid).

mod perturbation;

pub use perturbation::{Perturbation, PerturbationSpec, Piece, PieceSpec};

use crate::error::{Error, Result};
use crate::numeric::quad::cumulative_simpson;
use crate::numeric::C64;
use crate::potential::BasePotential;
use std::io::Write;

/// Values on the nodes `(i, j)`, `0 ≤ j ≤ i ≤ n`, of a triangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleGrid {
    n: usize,
    data: Vec<C64>,
}

impl TriangleGrid {
    pub fn zeros(n: usize) -> Self {
        TriangleGrid {
            n,
            data: vec![C64::new(0.0, 0.0); (n + 1) * (n + 2) / 2],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut g = Self::zeros(n);
        for i in 0..=n {
            for j in 0..=i {
                g.data[Self::offset(i) + j] = f(i, j);
            }
        }
        g
    }

    #[inline]
    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[Self::offset(i) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[Self::offset(i) + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[Self::offset(i)..Self::offset(i) + i + 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn hadamard(&self, other: &TriangleGrid) -> TriangleGrid {
        TriangleGrid {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        }
    }

    fn add_assign(&mut self, other: &TriangleGrid) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// `∫_0^{v_j}` along each row, trapezoid.
    fn row_prefix(&self, h: f64) -> TriangleGrid {
        let mut out = TriangleGrid::zeros(self.n);
        for i in 0..=self.n {
            let row = self.row(i);
            let base = Self::offset(i);
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=i {
                acc += (row[j - 1] + row[j]) * (0.5 * h);
                out.data[base + j] = acc;
            }
        }
        out
    }

    /// `∫_{u_i}^R` along each column, trapezoid.
    fn column_suffix(&self, h: f64) -> TriangleGrid {
        let n = self.n;
        let mut out = TriangleGrid::zeros(n);
        for j in 0..=n {
            let mut acc = C64::new(0.0, 0.0);
            for i in (j..n).rev() {
                acc += (self.get(i, j) + self.get(i + 1, j)) * (0.5 * h);
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Grid values of `F(α,β) = q(α−β) − q₀(α+β)`; the shift `λ₀` cancels.
#[derive(Debug, Clone)]
pub struct NeumannIntegrand {
    pub step: f64,
    pub values: TriangleGrid,
}

impl NeumannIntegrand {
    pub fn new(base: &BasePotential, pert: &Perturbation, n: usize) -> Self {
        let h = pert.radius() / n as f64;
        let q0: Vec<C64> = (0..=2 * n).map(|k| base.q0_shifted(k as f64 * h)).collect();
        let d: Vec<C64> = (0..=n).map(|k| pert.eval_mid(k as f64 * h)).collect();
        let values = TriangleGrid::from_fn(n, |i, j| d[i - j] + q0[i - j] - q0[i + j]);
        NeumannIntegrand { step: h, values }
    }

    /// Discrete sup over α of `∫_0^α |F(α,β)| dβ`.
    pub fn sup_row_l1(&self) -> f64 {
        let h = self.step;
        (0..=self.values.n())
            .map(|i| {
                let row = self.values.row(i);
                (1..row.len())
                    .map(|j| 0.5 * h * (row[j - 1].norm() + row[j].norm()))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// One Neumann step: `L_n(u,v) = ∫_u^R ∫_0^v F L_{n−1} dβ dα`.
pub fn iterate(prev: &TriangleGrid, integrand: &NeumannIntegrand) -> TriangleGrid {
    let h = integrand.step;
    prev.hadamard(&integrand.values).row_prefix(h).column_suffix(h)
}

/// `K₀` in rotated coordinates: `½∫_u^R (q − q₀)`.
pub fn k0(pert: &Perturbation, u: f64) -> C64 {
    if u >= pert.radius() {
        return C64::new(0.0, 0.0);
    }
    pert.integral_from(u.max(0.0)) * 0.5
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    /// Grid step `h`; must divide `R`.
    pub step: f64,
    /// Target for the Neumann tail bound.
    pub tol: f64,
    pub max_terms: usize,
    /// Inflation applied to the grid estimate of the mixed-moment constant.
    pub m_safety: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            step: 1e-3,
            tol: 1e-12,
            max_terms: 400,
            m_safety: 1.1,
        }
    }
}

/// Per-term diagnostics: sup norm and worst ratio to the a-priori bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermDiagnostic {
    pub index: usize,
    pub sup_norm: f64,
    pub max_bound_ratio: f64,
}

/// Kernel values on the rotated grid, with `K^{(0,1)}` alongside.
#[derive(Debug, Clone)]
pub struct Kernel {
    radius: f64,
    step: f64,
    values: TriangleGrid,
    dvalues: TriangleGrid,
    terms_used: usize,
    tail_bound: f64,
    m_estimate: f64,
    l1_norm: f64,
    diagnostics: Vec<TermDiagnostic>,
    extrapolated: bool,
}

fn grid_size(radius: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidInput(format!("kernel step must be positive, got {step}")));
    }
    let n = (radius / step).round();
    if n < 2.0 || (n * step - radius).abs() > 1e-9 * radius {
        return Err(Error::InvalidInput(format!(
            "kernel step {step} does not divide R = {radius} into at least two cells"
        )));
    }
    Ok(n as usize)
}

impl Kernel {
    pub fn build(base: &BasePotential, pert: &Perturbation, cfg: &KernelConfig) -> Result<Kernel> {
        if !(cfg.tol > 0.0) {
            return Err(Error::InvalidInput(format!("kernel tol must be positive, got {}", cfg.tol)));
        }
        let radius = pert.radius();
        let n = grid_size(radius, cfg.step)?;
        let h = radius / n as f64;
        let l1 = pert.l1_norm();
        if pert.is_zero() {
            return Ok(Kernel {
                radius,
                step: h,
                values: TriangleGrid::zeros(n),
                dvalues: TriangleGrid::zeros(n),
                terms_used: 1,
                tail_bound: 0.0,
                m_estimate: 0.0,
                l1_norm: 0.0,
                diagnostics: vec![TermDiagnostic {
                    index: 0,
                    sup_norm: 0.0,
                    max_bound_ratio: 0.0,
                }],
                extrapolated: false,
            });
        }

        let integrand = NeumannIntegrand::new(base, pert, n);
        let m = cfg.m_safety * integrand.sup_row_l1();
        let l1_tail: Vec<f64> = (0..=n).map(|i| pert.l1_tail(i as f64 * h)).collect();

        let k0_row: Vec<C64> = (0..=n)
            .map(|i| if i == n { C64::new(0.0, 0.0) } else { k0(pert, i as f64 * h) })
            .collect();
        let mut term = TriangleGrid::from_fn(n, |i, _| k0_row[i]);
        let mut sum = term.clone();
        let mut diagnostics = vec![bound_check(&term, 0, m, radius, h, &l1_tail)];

        let tail = |terms: usize| {
            let mut t = 0.5 * l1 * (m * radius).exp();
            for k in 1..=terms {
                t *= m * radius / k as f64;
            }
            t
        };
        let mut terms = 1;
        while tail(terms) >= cfg.tol {
            if terms >= cfg.max_terms {
                return Err(Error::NonConvergence {
                    terms,
                    tail_bound: tail(terms),
                });
            }
            term = iterate(&term, &integrand);
            diagnostics.push(bound_check(&term, terms, m, radius, h, &l1_tail));
            sum.add_assign(&term);
            terms += 1;
        }
        log::debug!("kernel: n = {n}, terms = {terms}, M = {m:.4}");

        let dvalues = derivative_grid(&sum, &integrand, pert);
        Ok(Kernel {
            radius,
            step: h,
            values: sum,
            dvalues,
            terms_used: terms,
            tail_bound: tail(terms),
            m_estimate: m,
            l1_norm: l1,
            diagnostics,
            extrapolated: false,
        })
    }

    /// Builds at `h` and `h/2` and combines them as `(4K_{h/2} − K_h)/3` on the
    /// coarse nodes.
    pub fn build_extrapolated(
        base: &BasePotential,
        pert: &Perturbation,
        cfg: &KernelConfig,
    ) -> Result<Kernel> {
        let coarse = Kernel::build(base, pert, cfg)?;
        let fine_cfg = KernelConfig {
            step: coarse.step / 2.0,
            ..*cfg
        };
        let fine = Kernel::build(base, pert, &fine_cfg)?;
        Kernel::extrapolate(&coarse, &fine)
    }

    pub fn extrapolate(coarse: &Kernel, fine: &Kernel) -> Result<Kernel> {
        let n = coarse.n();
        if fine.n() != 2 * n || (coarse.radius - fine.radius).abs() > 1e-12 * coarse.radius {
            return Err(Error::InvalidInput(
                "extrapolation needs kernels on grids h and h/2 over the same R".into(),
            ));
        }
        let combine = |a: &TriangleGrid, b: &TriangleGrid| {
            TriangleGrid::from_fn(n, |i, j| (b.get(2 * i, 2 * j) * 4.0 - a.get(i, j)) / 3.0)
        };
        let mut diagnostics = coarse.diagnostics.clone();
        for d in &fine.diagnostics {
            match diagnostics.iter_mut().find(|c| c.index == d.index) {
                Some(c) => {
                    c.sup_norm = c.sup_norm.max(d.sup_norm);
                    c.max_bound_ratio = c.max_bound_ratio.max(d.max_bound_ratio);
                }
                None => diagnostics.push(*d),
            }
        }
        Ok(Kernel {
            radius: coarse.radius,
            step: coarse.step,
            values: combine(&coarse.values, &fine.values),
            dvalues: combine(&coarse.dvalues, &fine.dvalues),
            terms_used: coarse.terms_used.max(fine.terms_used),
            tail_bound: coarse.tail_bound.max(fine.tail_bound),
            m_estimate: coarse.m_estimate.max(fine.m_estimate),
            l1_norm: coarse.l1_norm,
            diagnostics,
            extrapolated: true,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of cells along each axis.
    pub fn n(&self) -> usize {
        self.values.n()
    }

    pub fn terms_used(&self) -> usize {
        self.terms_used
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn m_estimate(&self) -> f64 {
        self.m_estimate
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    pub fn diagnostics(&self) -> &[TermDiagnostic] {
        &self.diagnostics
    }

    pub fn is_extrapolated(&self) -> bool {
        self.extrapolated
    }

    pub fn values(&self) -> &TriangleGrid {
        &self.values
    }

    pub fn dvalues(&self) -> &TriangleGrid {
        &self.dvalues
    }

    /// `L(u_i, v_j) = K(t, x)` at `t = (i+j)h`, `x = (i−j)h`.
    pub fn node(&self, i: usize, j: usize) -> C64 {
        self.values.get(i, j)
    }

    /// `K^{(0,1)}` at the same node.
    pub fn dnode(&self, i: usize, j: usize) -> C64 {
        self.dvalues.get(i, j)
    }

    fn interpolate(&self, grid: &TriangleGrid, t: f64, x: f64) -> C64 {
        let u = 0.5 * (t + x);
        let v = 0.5 * (t - x);
        if u >= self.radius || v < 0.0 || x < 0.0 {
            return C64::new(0.0, 0.0);
        }
        let n = self.n();
        let fu = u / self.step;
        let fv = v / self.step;
        let i = (fu.floor() as usize).min(n - 1);
        let j = (fv.floor() as usize).min(i);
        let a = fu - i as f64;
        let b = fv - j as f64;
        let at = |ii: usize, jj: usize| {
            let ii = ii.min(n);
            grid.get(ii, jj.min(ii))
        };
        at(i, j) * ((1.0 - a) * (1.0 - b))
            + at(i + 1, j) * (a * (1.0 - b))
            + at(i, j + 1) * ((1.0 - a) * b)
            + at(i + 1, j + 1) * (a * b)
    }

    /// `K(t, x)` by bilinear interpolation in `(u, v)`; zero off the support.
    pub fn k(&self, t: f64, x: f64) -> C64 {
        self.interpolate(&self.values, t, x)
    }

    /// `K^{(0,1)}(t, x)`.
    pub fn k_dx(&self, t: f64, x: f64) -> C64 {
        self.interpolate(&self.dvalues, t, x)
    }

    /// Sup over the grid of `|K − K₀ − ∬ F K|`, with the double integral taken
    /// by fourth-order cumulative rules, so that for a trapezoid-built kernel
    /// the result measures its discretization error.
    pub fn integral_equation_residual(&self, base: &BasePotential, pert: &Perturbation) -> f64 {
        let n = self.n();
        let h = self.step;
        let integrand = NeumannIntegrand::new(base, pert, n);
        let g = self.values.hadamard(&integrand.values);
        let inner: Vec<Vec<C64>> = (0..=n).map(|i| cumulative_simpson(g.row(i), h)).collect();
        let mut worst: f64 = 0.0;
        for j in 0..=n {
            let column: Vec<C64> = (j..=n).rev().map(|k| inner[k][j]).collect();
            let outer = cumulative_simpson(&column, h);
            for i in j..=n {
                let s = outer[n - i];
                let r = self.values.get(i, j) - k0(pert, i as f64 * h) - s;
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// Writes `u, v, Re K, Im K` rows, every `stride`-th node.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &str, stride: usize) -> std::io::Result<()> {
        w.write_all(header.as_bytes())?;
        writeln!(w, "u,v,re_k,im_k")?;
        let stride = stride.max(1);
        let n = self.n();
        for i in (0..=n).step_by(stride) {
            for j in (0..=i).step_by(stride) {
                let k = self.values.get(i, j);
                writeln!(
                    w,
                    "{:.12e},{:.12e},{:.16e},{:.16e}",
                    i as f64 * self.step,
                    j as f64 * self.step,
                    k.re,
                    k.im
                )?;
            }
        }
        Ok(())
    }
}

fn bound_check(
    term: &TriangleGrid,
    index: usize,
    m: f64,
    radius: f64,
    h: f64,
    l1_tail: &[f64],
) -> TermDiagnostic {
    let n = term.n();
    let mut fact = 1.0;
    for k in 1..=index {
        fact *= k as f64;
    }
    let mut ratio: f64 = 0.0;
    for i in 0..=n {
        let s = (radius - i as f64 * h).max(0.0);
        let bound = 0.5 * m.powi(index as i32) / fact * s.powi(index as i32) * l1_tail[i];
        for &v in term.row(i) {
            let a = v.norm();
            if a > 0.0 {
                ratio = ratio.max(if bound > 0.0 { a / bound } else { f64::INFINITY });
            }
        }
    }
    TermDiagnostic {
        index,
        sup_norm: term.max_abs(),
        max_bound_ratio: ratio,
    }
}

/// `K^{(0,1)} = −¼ d(u) − ½∫_0^v h(u,β)dβ − ½∫_u^R h(α,v)dα` with `h = F K`.
fn derivative_grid(k: &TriangleGrid, integrand: &NeumannIntegrand, pert: &Perturbation) -> TriangleGrid {
    let h = integrand.step;
    let n = k.n();
    let prod = k.hadamard(&integrand.values);
    let rows = prod.row_prefix(h);
    let cols = prod.column_suffix(h);
    let d: Vec<C64> = (0..=n).map(|i| pert.eval_mid(i as f64 * h)).collect();
    TriangleGrid::from_fn(n, |i, j| d[i] * -0.25 - (rows.get(i, j) + cols.get(i, j)) * 0.5)
}
