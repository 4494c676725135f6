mod common;

use common::{c, free, g1, rel};
use proptest::prelude::*;
use resonance::numeric::poly::{Poly, RationalFn};
use resonance::potential::{pe, xi, BasePotential, BasePotentialSpec, Period, Pole, WronskianPoly};
use resonance::{Error, C64};
use std::f64::consts::PI;

#[test]
fn xi_rational_is_identity() {
    assert_eq!(xi(c(2.0, 0.0), Period::Infinite), c(2.0, 0.0));
}

#[test]
fn xi_periodic_values() {
    let p = Period::Finite(1.0);
    assert!(xi(c(0.0, 0.0), p).norm() < 1e-16);
    // (1/2πi)(e^{iπ/2} − 1) = (1 + i)/(2π)
    let want = c(1.0, 1.0) / (2.0 * PI);
    assert!((xi(c(0.25, 0.0), p) - want).norm() < 1e-15);
    let direct = ((C64::i() * 2.0 * PI * 0.7).exp() - 1.0) / (C64::i() * 2.0 * PI);
    assert!((xi(c(0.7, 0.0), p) - direct).norm() < 1e-15);
}

#[test]
fn pe_rational_and_periodic() {
    assert!((pe(c(2.0, 0.0), Period::Infinite).unwrap() - 0.25).norm() < 1e-15);
    let p = Period::Finite(3.0);
    for x in [0.3, 1.1, -0.8] {
        let a = pe(c(x, 0.0), p).unwrap();
        let b = pe(c(x + 3.0, 0.0), p).unwrap();
        assert!(rel(a, b) < 1e-12);
    }
    // principal part at zero is 1/x²
    for x in [1e-2, 1e-3, 1e-4] {
        let v = pe(c(x, 0.0), p).unwrap();
        assert!((v * x * x - 1.0).norm() < x);
    }
    assert!(matches!(pe(c(0.0, 0.0), Period::Infinite), Err(Error::PoleAt { .. })));
    assert!(matches!(pe(c(3.0, 0.0), p), Err(Error::PoleAt { .. })));
}

#[test]
fn q0_values() {
    assert_eq!(free().eval_q0(1.7), c(0.0, 0.0));
    assert_eq!(BasePotential::free(c(5.0, 0.0)).eval_q0(0.3), c(5.0, 0.0));
    assert!((g1().eval_q0(0.0) - 2.0).norm() < 1e-14);
    assert!((g1().eval_q0(1.0) - 0.5).norm() < 1e-14);
}

#[test]
fn psi0_free() {
    let b = free();
    let z = c(1.3, -0.4);
    let e = (C64::i() * z * 0.9).exp();
    assert!(rel(b.eval_psi0(z, 0.9), e) < 1e-15);
    assert!(rel(b.eval_psi0_dx(z, 0.9), C64::i() * z * e) < 1e-15);
}

#[test]
fn psi0_g1_closed_form() {
    let b = g1();
    for (z, x) in [(c(2.0, 1.0), 0.0), (c(-0.5, 3.0), 1.5), (c(4.0, -2.0), 4.0)] {
        let e = (C64::i() * z * x).exp();
        let want = (z + C64::i() / (x + 1.0)) * e;
        let want_dx = (-C64::i() / ((x + 1.0) * (x + 1.0)) + C64::i() * z * (z + C64::i() / (x + 1.0))) * e;
        assert!(rel(b.eval_psi0(z, x), want) < 1e-14);
        assert!(rel(b.eval_psi0_dx(z, x), want_dx) < 1e-14);
    }
}

#[test]
fn wronskian_free_and_g1() {
    let z = c(1.0, 0.0);
    assert!((free().wronskian(z).unwrap() - c(0.0, -2.0)).norm() < 1e-14);
    assert!((g1().wronskian(z).unwrap() - c(0.0, 2.0)).norm() < 1e-13);
    for b in [free(), g1()] {
        assert_eq!(b.wronskian(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let z = c(0.8, -1.9);
        let a = b.wronskian_at(z, 0.0);
        let d = b.wronskian_at(z, 3.0);
        assert!((a - d).norm() < 1e-9 * (1.0 + z.norm()).powi(2 * b.genus() as i32 + 1));
    }
}

#[test]
fn wronskian_poly_matches_rational_form() {
    for (b, g) in [(free(), 0), (g1(), 1)] {
        let w = b.wronskian_poly().unwrap();
        let exact = WronskianPoly::rational(g);
        assert_eq!(w.degree(), 2 * g + 1);
        assert!(w.max_even_coefficient() < 1e-13);
        for (a, e) in w.coeffs.iter().zip(&exact.coeffs) {
            assert!((a - e).norm() < 1e-13);
        }
    }
}

#[test]
fn periodic_g1_wronskian() {
    let b = BasePotential::periodic_g1(2.0, c(0.0, 0.5), c(0.0, 0.0)).unwrap();
    assert_eq!(b.genus(), 1);
    let w = b.wronskian_poly().unwrap();
    // 2iz(z² − (π/p)²)
    let c2 = (PI / 2.0).powi(2);
    for z in [c(1.0, 0.0), c(0.3, 2.2), c(-3.0, -1.0)] {
        let want = C64::i() * 2.0 * z * (z * z - c2);
        assert!(rel(w.eval(z), want) < 1e-12);
    }
}

#[test]
fn rejects_wrong_r_and_bad_poles() {
    let bad = RationalFn::new(Poly::constant(c(0.0, 2.0)), Poly::new(vec![c(1.0, 0.0), c(1.0, 0.0)]));
    let pole = Pole { x: c(-1.0, 0.0), s: 1 };
    let err = BasePotential::new(c(0.0, 0.0), Period::Infinite, vec![pole], vec![bad]).unwrap_err();
    assert!(matches!(err, Error::ResidualTest(_)));
    assert!(err.is_validation());

    let on_axis = Pole { x: c(0.5, 0.0), s: 1 };
    let r0 = RationalFn::new(Poly::constant(C64::i()), Poly::new(vec![c(-0.5, 0.0), c(1.0, 0.0)]));
    let err = BasePotential::new(c(0.0, 0.0), Period::Infinite, vec![on_axis], vec![r0]).unwrap_err();
    assert!(matches!(err, Error::InvalidInput(_)));
    assert!(BasePotential::rational_g1(0.5, c(0.0, 0.0)).is_err());
}

#[test]
fn json_round_trip() {
    for b in [free(), g1(), BasePotential::periodic_g1(2.0, c(0.0, 0.5), c(1.0, 0.0)).unwrap()] {
        let text = serde_json::to_string(&b.to_spec()).unwrap();
        let spec: BasePotentialSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec.build().unwrap(), b);
    }
    let spec: BasePotentialSpec = serde_json::from_str(
        r#"{"lambda0": 0, "period": "inf", "poles": [[-1, 0, 1]], "genus": 1, "r": [{"num": [[0, 1]], "den": [1, 1]}]}"#,
    )
    .unwrap();
    assert_eq!(spec.build().unwrap(), g1());
}

#[test]
fn json_errors() {
    let unknown = serde_json::from_str::<BasePotentialSpec>(r#"{"period": "inf", "genus": 0, "extra": 1}"#);
    assert!(unknown.unwrap_err().to_string().contains("extra"));
    let spec: BasePotentialSpec = serde_json::from_str(r#"{"period": "weekly", "genus": 0}"#).unwrap();
    assert!(spec.build().unwrap_err().to_string().contains("period"));
    let spec: BasePotentialSpec = serde_json::from_str(r#"{"period": "inf", "genus": 1}"#).unwrap();
    assert!(spec.build().unwrap_err().to_string().contains("r:"));
}

#[test]
fn asymptotic_normalization_on_the_ray() {
    for b in [free(), g1()] {
        let g = b.genus() as i32;
        let defects: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&y| {
                let z = c(0.0, y);
                (b.eval_psi0(z, 0.0) / z.powi(g) - 1.0).norm()
            })
            .collect();
        assert!(defects[0] < 1.1e-2);
        assert!(defects.windows(2).all(|w| w[1] <= w[0]));
    }
}

fn arb_z() -> impl Strategy<Value = C64> {
    (0.0..10.0f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn ode_residual_small(z in arb_z(), x in 0.0..5.0f64) {
        for b in [free(), g1()] {
            for zz in [z, -z] {
                if b.eval_psi0(zz, x).norm() > 1e-6 {
                    prop_assert!(b.ode_residual(zz, x) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn wronskian_x_independent_and_odd(z in arb_z(), a in 0.0..5.0f64, bx in 0.0..5.0f64) {
        for b in [free(), g1()] {
            let scale = (1.0 + z.norm()).powi(2 * b.genus() as i32 + 1);
            prop_assert!((b.wronskian_at(z, a) - b.wronskian_at(z, bx)).norm() <= 1e-9 * scale);
            let w = b.wronskian(z).unwrap();
            prop_assert!((b.wronskian(-z).unwrap() + w).norm() <= 1e-9 * scale);
        }
    }
}
