use super::C64;
use serde::{Deserialize, Serialize};

/// Polynomial with complex coefficients, constant term first.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly { coeffs }
    }

    pub fn constant(c: C64) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly {
            coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| *c != C64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first two derivatives at `x`.
    pub fn eval2(&self, x: C64) -> [C64; 3] {
        let zero = C64::new(0.0, 0.0);
        let (mut p, mut d1, mut d2) = (zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            d2 = d2 * x + d1 * 2.0;
            d1 = d1 * x + p;
            p = p * x + c;
        }
        [p, d1, d2]
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::constant(C64::new(0.0, 0.0));
        }
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Poly {
        let mut coeffs = vec![C64::new(0.0, 0.0)];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / (k + 1) as f64),
        );
        Poly { coeffs }
    }

    /// Coefficients of p(x0 + w) as a polynomial in w.
    pub fn shifted(&self, x0: C64) -> Poly {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let hi = out[j + 1];
                out[j] += hi * x0;
            }
        }
        Poly { coeffs: out }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::default();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Sum of |c_k| r^k, a cheap bound for |p| on the disc of radius r.
    pub fn abs_bound(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }
}

/// Quotient of two polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Self {
        RationalFn { num, den }
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.num.eval(x) / self.den.eval(x)
    }

    /// Value and first two derivatives by the quotient rule.
    pub fn eval2(&self, x: C64) -> [C64; 3] {
        let [n, n1, n2] = self.num.eval2(x);
        let [d, d1, d2] = self.den.eval2(x);
        let r = n / d;
        let r1 = (n1 - r * d1) / d;
        let r2 = (n2 - r * d2 - r1 * d1 * 2.0) / d;
        [r, r1, r2]
    }
}
