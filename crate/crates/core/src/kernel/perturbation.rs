//! Compactly supported piecewise-polynomial perturbations `q − q₀`.

use crate::error::{Error, Result};
use crate::format::ComplexRepr;
use crate::numeric::poly::Poly;
use crate::numeric::quad::gauss_legendre;
use crate::numeric::{factorial, C64};
use serde::{Deserialize, Serialize};

/// One polynomial piece on `[start, end]`, written in powers of `x − anchor`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub anchor: f64,
    pub poly: Poly,
}

impl Piece {
    pub fn eval(&self, x: f64) -> C64 {
        self.poly.eval_real(x - self.anchor)
    }

    /// `∫_a^b` of the piece, for `[a, b] ⊂ [start, end]`.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        let anti = self.poly.antiderivative();
        anti.eval_real(b - self.anchor) - anti.eval_real(a - self.anchor)
    }

    /// Taylor coefficients about `x0`.
    fn taylor_at(&self, x0: f64) -> Poly {
        self.poly.shifted(C64::new(x0 - self.anchor, 0.0))
    }
}

/// `(q − q₀)(x)` on `[0, R]`, zero for `x > R`, with contact order `n` at `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    radius: f64,
    contact_order: usize,
    pieces: Vec<Piece>,
    l1: f64,
}

const GL_POINTS: usize = 24;

impl Perturbation {
    /// Validates layout and the declared contact order. The zero perturbation
    /// is accepted with any declared order.
    pub fn new(radius: f64, contact_order: usize, pieces: Vec<Piece>) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidInput(format!("R must be positive, got {radius}")));
        }
        let mut pieces = pieces;
        pieces.retain(|p| !p.poly.is_zero());
        pieces.sort_by(|a, b| a.start.total_cmp(&b.start));
        for (k, p) in pieces.iter().enumerate() {
            if !(p.start >= 0.0 && p.end <= radius * (1.0 + 1e-14) && p.start < p.end) {
                return Err(Error::InvalidInput(format!(
                    "pieces[{k}].interval: [{}, {}] is not a subinterval of [0, R]",
                    p.start, p.end
                )));
            }
            if k > 0 && p.start < pieces[k - 1].end - 1e-14 * radius {
                return Err(Error::InvalidInput(format!(
                    "pieces[{k}].interval overlaps the previous piece"
                )));
            }
        }
        let mut out = Perturbation {
            radius,
            contact_order,
            pieces,
            l1: 0.0,
        };
        out.check_contact()?;
        out.l1 = out.l1_tail(0.0);
        Ok(out)
    }

    pub fn zero(radius: f64) -> Self {
        Perturbation {
            radius,
            contact_order: 0,
            pieces: vec![],
            l1: 0.0,
        }
    }

    /// The step `c` on `[0, R]` (contact order 0).
    pub fn constant(c: C64, radius: f64) -> Result<Self> {
        Self::contact(c, 0, &Poly::constant(C64::new(1.0, 0.0)), radius)
    }

    /// `c (R − x)^n s(x)` on `[0, R]`, with `s` given in powers of `x`.
    pub fn contact(c: C64, n: usize, s: &Poly, radius: f64) -> Result<Self> {
        // in powers of w = x − R: c (−w)^n s(R + w)
        let s_at_r = s.shifted(C64::new(radius, 0.0));
        let mut coeffs = vec![C64::new(0.0, 0.0); n];
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.extend(s_at_r.coeffs.iter().map(|&a| a * c * sign));
        let piece = Piece {
            start: 0.0,
            end: radius,
            anchor: radius,
            poly: Poly::new(coeffs),
        };
        Self::new(radius, n, vec![piece])
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contact_order(&self) -> usize {
        self.contact_order
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// `‖q − q₀‖₁`.
    pub fn l1_norm(&self) -> f64 {
        self.l1
    }

    /// Piece covering the edge `R`, if any.
    fn edge_piece(&self) -> Option<&Piece> {
        self.pieces
            .last()
            .filter(|p| (p.end - self.radius).abs() <= 1e-14 * self.radius)
    }

    /// `(q − q₀)^{(k)}(R−)`, from exact polynomial differentiation.
    pub fn derivative_at_edge(&self, k: usize) -> C64 {
        match self.edge_piece() {
            None => C64::new(0.0, 0.0),
            Some(p) => {
                let t = p.taylor_at(self.radius);
                t.coeffs.get(k).copied().unwrap_or_default() * factorial(k)
            }
        }
    }

    fn check_contact(&self) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        let n = self.contact_order;
        let Some(p) = self.edge_piece() else {
            return Err(Error::ContactOrderMismatch {
                declared: n,
                detail: "no piece reaches R, so every derivative vanishes there".into(),
            });
        };
        let t = p.taylor_at(self.radius);
        let r = self.radius;
        let scaled: Vec<f64> = t
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * r.powi(k as i32))
            .collect();
        let tol = 1e-11 * scaled.iter().cloned().fold(0.0, f64::max);
        for (j, &v) in scaled.iter().enumerate().take(n) {
            if v > tol {
                return Err(Error::ContactOrderMismatch {
                    declared: n,
                    detail: format!("derivative of order {j} at R is nonzero"),
                });
            }
        }
        if scaled.get(n).copied().unwrap_or(0.0) <= tol {
            return Err(Error::ContactOrderMismatch {
                declared: n,
                detail: format!("derivative of order {n} at R vanishes"),
            });
        }
        Ok(())
    }

    fn piece_at(&self, x: f64, from_right: bool) -> Option<&Piece> {
        self.pieces.iter().find(|p| {
            if from_right {
                x >= p.start && x < p.end
            } else {
                x > p.start && x <= p.end
            }
        })
    }

    /// Right limit at `x` (left limit at `R`).
    pub fn eval(&self, x: f64) -> C64 {
        if x >= self.radius {
            return if x == self.radius {
                self.eval_left(x)
            } else {
                C64::new(0.0, 0.0)
            };
        }
        self.eval_right(x)
    }

    pub fn eval_right(&self, x: f64) -> C64 {
        self.piece_at(x, true).map_or(C64::new(0.0, 0.0), |p| p.eval(x))
    }

    pub fn eval_left(&self, x: f64) -> C64 {
        self.piece_at(x, false).map_or(C64::new(0.0, 0.0), |p| p.eval(x))
    }

    /// Mean of the one-sided limits, the natural grid value at a jump.
    pub fn eval_mid(&self, x: f64) -> C64 {
        if x <= 0.0 {
            return self.eval_right(0.0);
        }
        if x >= self.radius {
            return self.eval_left(self.radius);
        }
        (self.eval_left(x) + self.eval_right(x)) * 0.5
    }

    /// `∫_u^R (q − q₀)`.
    pub fn integral_from(&self, u: f64) -> C64 {
        self.pieces
            .iter()
            .filter(|p| p.end > u)
            .map(|p| p.integral(p.start.max(u), p.end))
            .sum()
    }

    /// `∫_u^R |q − q₀|` by Gauss–Legendre on each piece.
    pub fn l1_tail(&self, u: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(GL_POINTS);
        let mut acc = 0.0;
        for p in self.pieces.iter().filter(|p| p.end > u) {
            let a = p.start.max(u);
            let b = p.end;
            // split further so |·| of an oscillating polynomial is resolved
            let parts = 8;
            for k in 0..parts {
                let lo = a + (b - a) * k as f64 / parts as f64;
                let hi = a + (b - a) * (k + 1) as f64 / parts as f64;
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                for (x, w) in nodes.iter().zip(&weights) {
                    acc += w * half * p.eval(mid + half * x).norm();
                }
            }
        }
        acc
    }

    /// Breakpoints of the piecewise structure inside `(0, R)`, sorted.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.start, p.end])
            .filter(|&x| x > 0.0 && x < self.radius)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * self.radius);
        out
    }

    /// Maximal subintervals of `[0, R]` on which the perturbation is a single
    /// polynomial (`None` on gaps).
    pub fn segments(&self) -> Vec<(f64, f64, Option<&Piece>)> {
        let mut cuts = vec![0.0];
        cuts.extend(self.breakpoints());
        cuts.push(self.radius);
        cuts.windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                (w[0], w[1], self.piece_at(mid, true))
            })
            .collect()
    }

    pub fn to_spec(&self) -> PerturbationSpec {
        PerturbationSpec {
            radius: self.radius,
            contact_order: self.contact_order,
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceSpec {
                    interval: [p.start, p.end],
                    coeffs: p
                        .poly
                        .shifted(C64::new(-p.anchor, 0.0))
                        .coeffs
                        .iter()
                        .map(|&c| c.into())
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub interval: [f64; 2],
    /// Coefficients in powers of `x`, constant first.
    pub coeffs: Vec<ComplexRepr>,
}

/// JSON form of a perturbation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(rename = "R")]
    pub radius: f64,
    pub contact_order: usize,
    pub pieces: Vec<PieceSpec>,
}

impl PerturbationSpec {
    pub fn build(&self) -> Result<Perturbation> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                start: p.interval[0],
                end: p.interval[1],
                anchor: 0.0,
                poly: Poly::new(p.coeffs.iter().map(|&c| c.into()).collect()),
            })
            .collect();
        Perturbation::new(self.radius, self.contact_order, pieces)
    }
}
