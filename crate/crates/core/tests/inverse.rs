mod common;

use common::{c, evaluator, free, rel, well};
use proptest::prelude::*;
use resonance::inverse::{
    h_derivative, hadamard_fit, reconstruct_m, residues, write_comparison_csv, wronskian_recursion, ComparisonRow,
    HadamardModel, InverseConfig, MReconstruction, RayFit,
};
use resonance::jost::JostEvaluator;
use resonance::numeric::{factorial, I};
use resonance::potential::{BasePotential, WronskianPoly};
use resonance::roots::{locate, LocateConfig, Rect, Zero, ZeroSet};
use resonance::{Error, C64};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn square_well() -> &'static JostEvaluator {
    static EV: OnceLock<JostEvaluator> = OnceLock::new();
    EV.get_or_init(|| evaluator(&free(), &well(-4.0), 0.0025))
}

fn well_zeros() -> &'static ZeroSet {
    static SET: OnceLock<ZeroSet> = OnceLock::new();
    SET.get_or_init(|| {
        let ev = square_well();
        locate(&|z| ev.jost_kernel(z), &Rect::new(-160.0, 160.0, -9.0, 2.0), &LocateConfig::default()).unwrap()
    })
}

fn rebuild(retain: usize) -> MReconstruction {
    let cfg = InverseConfig {
        retain: Some(retain),
        ..Default::default()
    };
    reconstruct_m(well_zeros(), 0, &WronskianPoly::rational(0), &cfg).unwrap()
}

fn well_rec() -> &'static MReconstruction {
    static REC: OnceLock<MReconstruction> = OnceLock::new();
    REC.get_or_init(|| rebuild(101))
}

fn ray_points() -> Vec<C64> {
    (0..20).map(|k| c(0.0, 0.5 + 4.5 * k as f64 / 19.0)).collect()
}

fn max_error(rec: &MReconstruction) -> f64 {
    let ev = square_well();
    ray_points()
        .iter()
        .map(|&z| rel(rec.eval(z).unwrap(), ev.m_direct(z).unwrap()))
        .fold(0.0, f64::max)
}

/// `a₀ + a₁z + Σ n_j (log(1 − z/z_j) + z/z_j)`, principal branch.
fn product_log(a0: C64, a1: C64, zeros: &[(C64, usize)], z: C64) -> C64 {
    a0 + a1 * z
        + zeros
            .iter()
            .map(|&(zj, n)| n as f64 * ((1.0 - z / zj).ln() + z / zj))
            .sum::<C64>()
}

/// `(1/2πi) ∮ f` over the circle, trapezoid rule.
fn circle_integral(f: impl Fn(C64) -> C64, centre: C64, radius: f64, nodes: usize) -> C64 {
    let mut acc = c(0.0, 0.0);
    for k in 0..nodes {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
        acc += f(centre + radius * w) * radius * w;
    }
    acc / nodes as f64
}

#[test]
fn hadamard_round_trip_with_one_zero() {
    let zeros = vec![(c(0.0, -1.0), 1)];
    let (a0, a1) = (c(0.3, -0.1), c(0.2, 0.05));
    let ray = RayFit::geometric(0.5, 5.0, 30, 0);
    let model = HadamardModel::fit(zeros.clone(), 1, vec![], 0, &ray, |z| product_log(a0, a1, &zeros, z)).unwrap();
    assert!((model.a0 - a0).norm() < 1e-8);
    assert!((model.a1 - a1).norm() < 1e-8);
    assert!(model.lsq_residual < 1e-8);
    for z in [c(1.0, 1.0), c(-2.0, 0.5), c(0.3, -3.0)] {
        let want = product_log(a0, a1, &zeros, z).exp();
        assert!(rel(model.psi(z), want) < 1e-8);
    }
    assert!(model.psi(c(0.0, -1.0)).norm() < 1e-14);
    assert_eq!(model.rho(), 1);
}

#[test]
fn hadamard_rejects_a_zero_at_the_origin() {
    let ray = RayFit::geometric(0.5, 5.0, 10, 0);
    let err = hadamard_fit(&[(c(0.0, 0.0), 1)], 0, &ray).unwrap_err();
    assert_eq!(err, Error::ZeroAtOrigin);
}

#[test]
fn simple_zero_data_from_the_wronskian() {
    let rec = well_rec();
    let ev = square_well();
    let w = WronskianPoly::rational(0);
    for e in rec.residues.entries.iter().filter(|e| !e.synthetic).take(10) {
        assert_eq!(e.multiplicity, 1);
        let minus = rec.hadamard.psi(-e.z);
        assert!(rel(e.psi_x[0], -w.eval(e.z) / minus) < 1e-12);
        // forward ψ'(z_j, 0)
        let (_, fwd) = ev.psi(e.z, 0.0).unwrap();
        assert!(rel(e.psi_x[0], fwd) < 1e-3, "{}", e.z);
    }
}

#[test]
fn reconstruction_matches_forward_off_the_axis() {
    let rec = well_rec();
    let ev = square_well();
    let z = c(1.0, -1.0);
    assert!(rel(rec.eval(z).unwrap(), ev.m_direct(z).unwrap()) < 1e-2);
    assert!(max_error(rec) < 1e-2);
}

#[test]
fn residues_match_the_forward_poles() {
    let rec = well_rec();
    let ev = square_well();
    for e in rec.residues.entries.iter().filter(|e| !e.synthetic).take(6) {
        let eps = 1e-6;
        let near = e.z + eps;
        let got = rec.eval(near).unwrap() * eps;
        let (_, psi_x) = ev.psi(e.z, 0.0).unwrap();
        let dz = (ev.jost_kernel(e.z + 1e-5) - ev.jost_kernel(e.z - 1e-5)) / 2e-5;
        let want = psi_x / dz;
        assert!(rel(got, want) < 0.1, "{}: {got} vs {want}", e.z);
    }
    assert!(matches!(rec.eval(rec.residues.entries[0].z), Err(Error::EvaluationAtPole { .. })));
}

fn double_zero_model() -> HadamardModel {
    let zeros = vec![(c(1.5, -0.7), 2), (c(-2.0, -1.0), 1)];
    let (a0, a1) = (c(0.1, 0.2), c(-0.3, 0.1));
    let ray = RayFit::geometric(0.5, 5.0, 30, 0);
    let target = zeros.clone();
    HadamardModel::fit(zeros, 2, vec![], 0, &ray, move |z| product_log(a0, a1, &target, z)).unwrap()
}

#[test]
fn double_zero_recursion_matches_leibniz() {
    let model = double_zero_model();
    let w = WronskianPoly::rational(0);
    let data = wronskian_recursion(&model, &w, 0, 2, 64).unwrap();
    let e = &data.entries[0];
    assert_eq!(e.multiplicity, 2);
    let zj = e.z;
    // W(z_j) = −ψ_x Ψ(−z_j) and W'(z_j) = −ψ_x' Ψ(−z_j) + ψ_x Ψ'(−z_j)
    let minus = model.psi(-zj);
    let dminus = (model.psi(-zj + 1e-5) - model.psi(-zj - 1e-5)) / 2e-5;
    let x0 = -w.eval(zj) / minus;
    let x1 = (-w.derivative(1, zj) + x0 * dminus) / minus;
    assert!(rel(e.psi_x[0], x0) < 1e-8);
    assert!(rel(e.psi_x[1], x1) < 1e-8);
    assert_eq!(data.entries[1].multiplicity, 1);
}

#[test]
fn residues_match_contour_integrals() {
    let model = double_zero_model();
    let w = WronskianPoly::rational(0);
    let data = wronskian_recursion(&model, &w, 0, 2, 64).unwrap();
    let p = 2;
    for z in [c(0.4, 1.3), c(-3.0, 2.0)] {
        let res = residues(&data, z, p).unwrap();
        for (e, r) in data.entries.iter().zip(&res) {
            // ψ' near z_j from its Taylor data, which is all the residue sees
            let psi_x = |mu: C64| -> C64 {
                e.psi_x
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (mu - e.z).powu(k as u32) / factorial(k))
                    .sum()
            };
            let h = |mu: C64| (z / mu).powu(p as u32 + 1) / (z - mu);
            let direct = circle_integral(|mu| h(mu) * psi_x(mu) / model.psi(mu), e.z, 0.05, 256);
            assert!(rel(*r, direct) < 1e-6, "{} {r} vs {direct}", e.z);
        }
    }
}

#[test]
fn h_derivatives_match_cauchy() {
    let (z, mu) = (c(0.7, 2.0), c(-1.2, -0.4));
    for p in 0..4 {
        let h = |m: C64| (z / m).powu(p as u32 + 1) / (z - m);
        for i in 0..4 {
            let want = factorial(i) * circle_integral(|m| h(m) / (m - mu).powu(i as u32 + 1), mu, 0.1, 128);
            assert!(rel(h_derivative(z, mu, i, p), want) < 1e-9, "p = {p}, i = {i}");
        }
    }
}

#[test]
fn empty_zero_set_gives_iz() {
    let cfg = InverseConfig {
        tail: None,
        ..Default::default()
    };
    let rec = reconstruct_m(&ZeroSet::empty(), 0, &WronskianPoly::rational(0), &cfg).unwrap();
    assert_eq!(rec.retained(), 0);
    for z in [c(0.0, 1.0), c(2.0, -3.0), c(-5.0, 0.5)] {
        assert!((rec.eval(z).unwrap() - I * z).norm() < 1e-10 * z.norm());
    }
}

#[test]
fn zeros_of_w_are_refused() {
    let set = ZeroSet::from_zeros(vec![Zero::new(c(0.0, 0.0), 1)]);
    let err = reconstruct_m(&set, 0, &WronskianPoly::rational(0), &InverseConfig::default()).unwrap_err();
    assert!(matches!(err, Error::WZeroCollision { .. }));
    let periodic = BasePotential::periodic_g1(2.0, c(0.0, 0.5), c(0.0, 0.0)).unwrap();
    let w = periodic.wronskian_poly().unwrap();
    let set = ZeroSet::from_zeros(vec![Zero::new(c(PI / 2.0, 0.0), 1), Zero::new(c(1.0, -1.0), 1)]);
    let err = reconstruct_m(&set, 1, &w, &InverseConfig { tail: None, ..Default::default() }).unwrap_err();
    assert!(matches!(err, Error::WZeroCollision { .. }));
}

#[test]
fn bad_fit_window_is_a_validation_error() {
    let cfg = InverseConfig {
        fit_window: [0.3, 0.1],
        ..Default::default()
    };
    let err = reconstruct_m(&ZeroSet::empty(), 0, &WronskianPoly::rational(0), &cfg).unwrap_err();
    assert!(err.is_validation());
}

#[test]
fn more_zeros_do_not_hurt() {
    let e50 = max_error(&rebuild(51));
    let e100 = max_error(well_rec());
    assert!(e100 <= 1.1 * e50, "{e50:e} -> {e100:e}");
    assert!(e100 < 1e-2);
}

#[test]
fn report_and_comparison_output() {
    let rec = well_rec();
    let report = rec.report(None, &ray_points()).unwrap();
    assert_eq!(report.retained, 101);
    assert_eq!(report.zeros.len(), 101);
    assert!(report.synthetic > 0);
    assert!(report.tail_estimate < 1.0);
    assert_eq!(report.band_laws.len(), 2);
    let text = serde_json::to_string(&report).unwrap();
    assert!(!text.contains("header"));
    let rows = vec![ComparisonRow { z: c(0.0, 1.0), m_rec: c(1.0, 0.0), m_fwd: c(2.0, 0.0) }];
    assert!((rows[0].rel_err() - 0.5).abs() < 1e-15);
    let mut out = vec![];
    write_comparison_csv(&mut out, "# h\n", &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().nth(1), Some("re_z,im_z,re_m_rec,im_m_rec,re_m_fwd,im_m_fwd,rel_err"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hadamard_fit_is_exact_for_finite_products(
        pts in prop::collection::vec((-4.0..4.0f64, -4.0..-0.2f64), 1..6),
        a0 in -1.0..1.0f64,
        a1 in -0.5..0.5f64,
    ) {
        let zeros: Vec<(C64, usize)> = pts.iter().map(|&(a, b)| (c(a, b), 1)).collect();
        let ray = RayFit::geometric(0.5, 6.0, 30, 0);
        let target = zeros.clone();
        let model = HadamardModel::fit(zeros, pts.len(), vec![], 0, &ray, move |z| {
            product_log(c(a0, 0.0), c(a1, 0.0), &target, z)
        }).unwrap();
        prop_assert!((model.a0 - a0).norm() < 1e-8);
        prop_assert!((model.a1 - a1).norm() < 1e-8);
        let w = WronskianPoly::rational(0);
        let data = wronskian_recursion(&model, &w, 0, pts.len(), 32).unwrap();
        for e in &data.entries {
            prop_assert!(rel(e.psi_x[0] * model.psi(-e.z), -w.eval(e.z)) < 1e-10);
        }
    }
}
