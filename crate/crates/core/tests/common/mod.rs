#![allow(dead_code)]

use resonance::jost::JostEvaluator;
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::numeric::poly::Poly;
use resonance::potential::BasePotential;
use resonance::C64;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn free() -> BasePotential {
    BasePotential::free(c(0.0, 0.0))
}

pub fn g1() -> BasePotential {
    BasePotential::rational_g1(-1.0, c(0.0, 0.0)).unwrap()
}

pub fn well(depth: f64) -> Perturbation {
    Perturbation::constant(c(depth, 0.0), 1.0).unwrap()
}

/// `2(R − x)` on `[0, 1]`, contact order one.
pub fn ramp() -> Perturbation {
    Perturbation::contact(c(2.0, 0.0), 1, &Poly::constant(c(1.0, 0.0)), 1.0).unwrap()
}

pub fn evaluator(base: &BasePotential, pert: &Perturbation, h: f64) -> JostEvaluator {
    let cfg = KernelConfig {
        step: h,
        ..Default::default()
    };
    let kernel = Kernel::build_extrapolated(base, pert, &cfg).unwrap();
    JostEvaluator::new(base.clone(), pert.clone(), kernel).unwrap()
}

/// Square well of depth `c` on `[0, r]` over the free base, solved by
/// matching `e^{izx}` at `x = r` to `cos`/`sin` inside.
pub fn well_closed_form(z: C64, depth: f64, r: f64, x: f64) -> (C64, C64) {
    let k = (z * z - depth).sqrt();
    let e = (C64::i() * z * r).exp();
    let s = k * (x - r);
    let sinc = if k.norm() < 1e-12 {
        C64::new(x - r, 0.0)
    } else {
        s.sin() / k
    };
    let psi = e * (s.cos() + C64::i() * z * sinc);
    let dpsi = e * (-k * k * sinc + C64::i() * z * s.cos());
    (psi, dpsi)
}

/// `cos kR − (iz/k) sin kR`, scaled so that its roots are the well's zeros.
pub fn well_equation(z: C64, depth: f64, r: f64) -> C64 {
    let k = (z * z - depth).sqrt();
    (k * r).cos() - C64::i() * z * (k * r).sin() / k
}
