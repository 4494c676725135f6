//! Algebro-geometric base potentials and their explicit solutions.
//!
//! A base potential is `q₀(x) = λ₀ + Σ s_j(s_j+1) P(x − x_j)` with
//! `P = ξ'/ξ²`, and the equation `−y'' + (q₀ − λ₀) y = z² y` has the solution
//! `ψ₀(z,x) = Q(z, ξ(x)) e^{izx}` where `Q(z,ξ) = z^g + Σ_{j<g} r_j(ξ) z^j`.

use crate::error::{Error, Result};
use crate::format::ComplexRepr;
use crate::numeric::poly::{Poly, RationalFn};
use crate::numeric::{C64, I};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Period of the base potential; `Infinite` is the rational case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Period {
    Infinite,
    Finite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub x: C64,
    pub s: u32,
}

/// `ξ(x)`: `x` in the rational case, `(p/2πi)(e^{2πix/p} − 1)` otherwise.
pub fn xi(x: C64, period: Period) -> C64 {
    match period {
        Period::Infinite => x,
        Period::Finite(p) => {
            // e^{iθ} − 1 = 2i sin(θ/2) e^{iθ/2}, free of cancellation near 0
            let half = x * (PI / p);
            let em1 = I * 2.0 * half.sin() * (I * half).exp();
            em1 * (p / (2.0 * PI)) / I
        }
    }
}

fn xi_derivs(x: f64, period: Period) -> [C64; 3] {
    match period {
        Period::Infinite => [C64::new(x, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        Period::Finite(p) => {
            let b = I * (2.0 * PI / p);
            let d1 = (b * x).exp();
            [xi(C64::new(x, 0.0), period), d1, b * d1]
        }
    }
}

/// `P(x) = ξ'(x)/ξ(x)²`.
pub fn pe(x: C64, period: Period) -> Result<C64> {
    // |sin| below rounding of its argument means x ≡ 0 (mod p)
    let (den, near) = match period {
        Period::Infinite => (x * x, x.norm() <= 1e-150),
        Period::Finite(p) => {
            let s = (x * (PI / p)).sin();
            (s * s / (PI / p).powi(2), s.norm() <= 4.0 * f64::EPSILON * (1.0 + x.norm() / p))
        }
    };
    if near {
        return Err(Error::PoleAt { x });
    }
    Ok(1.0 / den)
}

/// Odd Wronskian polynomial `W(z)`, coefficient of `z^k` at index `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WronskianPoly {
    pub coeffs: Vec<C64>,
}

impl WronskianPoly {
    /// `−2(iz)^{2g+1}`, the Wronskian of every rational base of genus `g`.
    pub fn rational(genus: usize) -> Self {
        let deg = 2 * genus + 1;
        let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
        coeffs[deg] = -2.0 * I.powu(deg as u32);
        WronskianPoly { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        Poly::new(self.coeffs.clone()).eval(z)
    }

    /// `W^{(r)}(z)`.
    pub fn derivative(&self, r: usize, z: C64) -> C64 {
        let mut p = Poly::new(self.coeffs.clone());
        for _ in 0..r {
            p = p.derivative();
        }
        p.eval(z)
    }

    pub fn max_even_coefficient(&self) -> f64 {
        self.coeffs
            .iter()
            .step_by(2)
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `|W(z)|` relative to `Σ|c_k||z|^k`; small values flag a near-root.
    pub fn relative_size(&self, z: C64) -> f64 {
        let bound = Poly::new(self.coeffs.clone()).abs_bound(z.norm());
        if bound == 0.0 {
            0.0
        } else {
            self.eval(z).norm() / bound
        }
    }
}

/// Validated base potential.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePotential {
    lambda0: C64,
    period: Period,
    poles: Vec<Pole>,
    r: Vec<RationalFn>,
}

const RESIDUAL_TOL: f64 = 1e-9;

impl BasePotential {
    /// Builds and validates a base potential; genus is `r.len()`.
    pub fn new(lambda0: C64, period: Period, poles: Vec<Pole>, r: Vec<RationalFn>) -> Result<Self> {
        if let Period::Finite(p) = period {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidInput(format!("period must be positive, got {p}")));
            }
        }
        for (k, pole) in poles.iter().enumerate() {
            if pole.s == 0 {
                return Err(Error::InvalidInput(format!("poles[{k}]: s must be positive")));
            }
            let dist = match period {
                Period::Infinite if pole.x.re >= 0.0 => pole.x.im.abs(),
                Period::Infinite => pole.x.norm(),
                Period::Finite(_) => pole.x.im.abs(),
            };
            if dist < 1e-10 {
                return Err(Error::InvalidInput(format!(
                    "poles[{k}]: pole lattice meets [0, inf) (distance {dist:e})"
                )));
            }
            for (l, other) in poles.iter().enumerate().take(k) {
                let d = pole.x - other.x;
                let same = match period {
                    Period::Infinite => d.norm() < 1e-12,
                    Period::Finite(p) => {
                        d.im.abs() < 1e-12 && {
                            let m = d.re / p;
                            (m - m.round()).abs() < 1e-12
                        }
                    }
                };
                if same {
                    return Err(Error::InvalidInput(format!(
                        "poles[{k}] coincides with poles[{l}] modulo the period"
                    )));
                }
            }
        }
        for (j, rj) in r.iter().enumerate() {
            if rj.den.is_zero() {
                return Err(Error::InvalidInput(format!("r[{j}]: zero denominator")));
            }
        }
        let base = BasePotential {
            lambda0,
            period,
            poles,
            r,
        };
        base.validate_residual(RESIDUAL_TOL)?;
        Ok(base)
    }

    /// `q₀ = λ₀`, genus zero.
    pub fn free(lambda0: C64) -> Self {
        BasePotential {
            lambda0,
            period: Period::Infinite,
            poles: vec![],
            r: vec![],
        }
    }

    /// `q₀ = λ₀ + 2/(x − x₀)²` with `r₀(ξ) = i/(ξ − x₀)`, genus one.
    pub fn rational_g1(x0: f64, lambda0: C64) -> Result<Self> {
        if !(x0 < 0.0) {
            return Err(Error::InvalidInput(format!("x0 must be negative, got {x0}")));
        }
        let r0 = RationalFn::new(
            Poly::constant(I),
            Poly::new(vec![C64::new(-x0, 0.0), C64::new(1.0, 0.0)]),
        );
        Self::new(
            lambda0,
            Period::Infinite,
            vec![Pole {
                x: C64::new(x0, 0.0),
                s: 1,
            }],
            vec![r0],
        )
    }

    /// `q₀ = λ₀ + 2P(x − x₀)` with period `p` and `Im x₀ ≠ 0`, genus one.
    /// With `η = ξ(x − x₀)`, `r₀ = i/η − π/p`, rewritten as a rational
    /// function of `ξ(x)`.
    pub fn periodic_g1(period: f64, x0: C64, lambda0: C64) -> Result<Self> {
        let k = I * (2.0 * PI / period);
        let a = (-k * x0).exp();
        let c = PI / period;
        let den = Poly::new(vec![a - 1.0, a * k]);
        let num = Poly::new(vec![I * k - c * (a - 1.0), -c * a * k]);
        Self::new(
            lambda0,
            Period::Finite(period),
            vec![Pole { x: x0, s: 1 }],
            vec![RationalFn::new(num, den)],
        )
    }

    pub fn genus(&self) -> usize {
        self.r.len()
    }

    pub fn lambda0(&self) -> C64 {
        self.lambda0
    }

    pub fn period(&self) -> Period {
        self.period
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn r_coeffs(&self) -> &[RationalFn] {
        &self.r
    }

    /// `q₀(x)`.
    pub fn eval_q0(&self, x: f64) -> C64 {
        self.lambda0 + self.q0_shifted(x)
    }

    /// `q₀(x) − λ₀`, the potential seen by the spectral equation.
    pub fn q0_shifted(&self, x: f64) -> C64 {
        self.poles
            .iter()
            .map(|pole| {
                let s = pole.s as f64;
                let p = pe(C64::new(x, 0.0) - pole.x, self.period).unwrap_or(C64::new(f64::NAN, 0.0));
                p * (s * (s + 1.0))
            })
            .sum()
    }

    /// `r_j(ξ(x))` for j < g.
    pub fn r_values(&self, x: f64) -> Vec<C64> {
        let xi = xi(C64::new(x, 0.0), self.period);
        self.r.iter().map(|rj| rj.eval(xi)).collect()
    }

    /// `Q(z, ξ(x))` given precomputed `r_j(ξ(x))`.
    pub fn amplitude_from(&self, z: C64, r_values: &[C64]) -> C64 {
        let g = r_values.len();
        let mut acc = C64::new(1.0, 0.0);
        for j in (0..g).rev() {
            acc = acc * z + r_values[j];
        }
        acc
    }

    /// `Q`, `∂ₓQ`, `∂ₓ²Q` at `(z, ξ(x))`.
    pub fn amplitude(&self, z: C64, x: f64) -> [C64; 3] {
        let [xi, d1, d2] = xi_derivs(x, self.period);
        let g = self.genus();
        let zero = C64::new(0.0, 0.0);
        let (mut q, mut qx, mut qxx) = (C64::new(1.0, 0.0), zero, zero);
        for j in (0..g).rev() {
            let [r, r1, r2] = self.r[j].eval2(xi);
            q = q * z + r;
            qx = qx * z + r1 * d1;
            qxx = qxx * z + r2 * d1 * d1 + r1 * d2;
        }
        [q, qx, qxx]
    }

    pub fn eval_psi0(&self, z: C64, x: f64) -> C64 {
        self.amplitude(z, x)[0] * (I * z * x).exp()
    }

    pub fn eval_psi0_dx(&self, z: C64, x: f64) -> C64 {
        self.psi0_pair(z, x).1
    }

    /// `(ψ₀, ψ₀')` at `(z, x)`.
    pub fn psi0_pair(&self, z: C64, x: f64) -> (C64, C64) {
        let [q, qx, _] = self.amplitude(z, x);
        let e = (I * z * x).exp();
        (q * e, (qx + I * z * q) * e)
    }

    /// `|−ψ₀'' + (q₀−λ₀)ψ₀ − z²ψ₀| / ((1+|z|²)|ψ₀|)` with exact derivatives.
    pub fn ode_residual(&self, z: C64, x: f64) -> f64 {
        let [q, qx, qxx] = self.amplitude(z, x);
        // the exponential factor cancels
        let res = -qxx - I * z * qx * 2.0 + self.q0_shifted(x) * q;
        res.norm() / ((1.0 + z.norm_sqr()) * q.norm())
    }

    fn validate_residual(&self, tol: f64) -> Result<()> {
        let zs = [
            C64::new(0.7, 0.0),
            C64::new(-1.3, 0.4),
            C64::new(2.1, -1.7),
            C64::new(0.0, 3.3),
            C64::new(-6.2, -2.5),
            C64::new(9.1, 1.2),
        ];
        for &z in &zs {
            for k in 0..=10 {
                let x = 0.5 * k as f64;
                for zz in [z, -z] {
                    let [q, _, _] = self.amplitude(zz, x);
                    if q.norm() < 1e-8 * (1.0 + zz.norm()).powi(self.genus() as i32) {
                        continue;
                    }
                    let res = self.ode_residual(zz, x);
                    if !(res <= tol) {
                        return Err(Error::ResidualTest(format!(
                            "relative residual {res:e} at z = {zz}, x = {x}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `ψ₀(z,x)ψ₀'(−z,x) − ψ₀(−z,x)ψ₀'(z,x)`.
    pub fn wronskian_at(&self, z: C64, x: f64) -> C64 {
        let (a, ad) = self.psi0_pair(z, x);
        let (b, bd) = self.psi0_pair(-z, x);
        a * bd - b * ad
    }

    /// `W(z)` at the reference point x = 0, cross-checked at x = 1.
    pub fn wronskian(&self, z: C64) -> Result<C64> {
        let w0 = self.wronskian_at(z, 0.0);
        let w1 = self.wronskian_at(z, 1.0);
        let scale = (1.0 + z.norm()).powi(2 * self.genus() as i32 + 1);
        if (w0 - w1).norm() > 1e-9 * scale {
            return Err(Error::XDependence {
                a: 0.0,
                b: 1.0,
                at_a: w0,
                at_b: w1,
            });
        }
        Ok(w0)
    }

    /// Interpolates `W` at the 2g+2 roots of unity.
    pub fn wronskian_poly(&self) -> Result<WronskianPoly> {
        let n = 2 * self.genus() + 2;
        let nodes: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
            .collect();
        let values = nodes
            .iter()
            .map(|&z| self.wronskian(z))
            .collect::<Result<Vec<_>>>()?;
        let mut coeffs: Vec<C64> = (0..n)
            .map(|m| {
                let s: C64 = nodes
                    .iter()
                    .zip(&values)
                    .map(|(&z, &w)| w * z.powi(-(m as i32)))
                    .sum();
                s / n as f64
            })
            .collect();
        // Interpolation leaves rounding noise where coefficients vanish.
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for c in &mut coeffs {
            if c.norm() <= 1e-12 * scale {
                *c = C64::new(0.0, 0.0);
            }
        }
        Ok(WronskianPoly { coeffs })
    }

    pub fn to_spec(&self) -> BasePotentialSpec {
        BasePotentialSpec {
            lambda0: self.lambda0.into(),
            period: match self.period {
                Period::Infinite => PeriodSpec::Text("inf".into()),
                Period::Finite(p) => PeriodSpec::Number(p),
            },
            poles: self
                .poles
                .iter()
                .map(|p| [p.x.re, p.x.im, p.s as f64])
                .collect(),
            genus: self.genus(),
            r: self
                .r
                .iter()
                .map(|rj| RationalSpec {
                    num: rj.num.coeffs.iter().map(|&c| c.into()).collect(),
                    den: rj.den.coeffs.iter().map(|&c| c.into()).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PeriodSpec {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalSpec {
    pub num: Vec<ComplexRepr>,
    pub den: Vec<ComplexRepr>,
}

/// JSON form of a base potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePotentialSpec {
    #[serde(default)]
    pub lambda0: ComplexRepr,
    pub period: PeriodSpec,
    #[serde(default)]
    pub poles: Vec<[f64; 3]>,
    pub genus: usize,
    #[serde(default)]
    pub r: Vec<RationalSpec>,
}

impl BasePotentialSpec {
    pub fn build(&self) -> Result<BasePotential> {
        let period = match &self.period {
            PeriodSpec::Number(p) => Period::Finite(*p),
            PeriodSpec::Text(s) if s == "inf" || s == "infinite" => Period::Infinite,
            PeriodSpec::Text(s) => {
                return Err(Error::InvalidInput(format!(
                    "period: expected a number or \"inf\", got \"{s}\""
                )))
            }
        };
        if self.r.len() != self.genus {
            return Err(Error::InvalidInput(format!(
                "r: expected {} rational functions for genus {}, got {}",
                self.genus,
                self.genus,
                self.r.len()
            )));
        }
        let poles = self
            .poles
            .iter()
            .enumerate()
            .map(|(k, &[re, im, s])| {
                if s < 1.0 || s.fract() != 0.0 {
                    Err(Error::InvalidInput(format!("poles[{k}]: s must be a positive integer")))
                } else {
                    Ok(Pole {
                        x: C64::new(re, im),
                        s: s as u32,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let r = self
            .r
            .iter()
            .map(|rs| {
                RationalFn::new(
                    Poly::new(rs.num.iter().map(|&c| c.into()).collect()),
                    Poly::new(rs.den.iter().map(|&c| c.into()).collect()),
                )
            })
            .collect();
        BasePotential::new(self.lambda0.into(), period, poles, r)
    }
}
