//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use common::{c, evaluator, free, g1, ramp, rel, well, well_closed_form, well_equation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resonance::asymptotics::{band_from_perturbation, band_report, semicircle_min};
use resonance::inverse::{reconstruct_m, InverseConfig};
use resonance::jost::{JostEvaluator, Method};
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::WronskianPoly;
use resonance::roots::{locate, winding, LocateConfig, Rect, WindingConfig, ZeroSet};
use resonance::C64;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn well_zeros(ev: &JostEvaluator, rect: &Rect) -> ZeroSet {
    locate(&|z| ev.jost_kernel(z), rect, &LocateConfig::default()).unwrap()
}

fn newton_on_closed_form(mut w: C64) -> C64 {
    for _ in 0..30 {
        let d = (well_equation(w + 1e-7, -4.0, 1.0) - well_equation(w - 1e-7, -4.0, 1.0)) / 2e-7;
        w -= well_equation(w, -4.0, 1.0) / d;
    }
    w
}

/// ψ(z,0) by kernel, ODE and closed form on a 21×11 grid.
fn oracle_equivalence() -> Outcome {
    let ev = evaluator(&free(), &well(-4.0), 0.0025);
    let ode = ev.clone().with_method(Method::Ode);
    let zeros = well_zeros(&ev, &Rect::new(-21.0, 21.0, -6.0, 6.0)).points();
    let (mut worst, mut skipped, mut count) = (0.0f64, 0, 0);
    for i in 0..21 {
        for j in 0..11 {
            let z = c(-20.0 + 2.0 * i as f64, -5.0 + j as f64);
            if zeros.iter().any(|w| (w - z).norm() < 1e-3) {
                skipped += 1;
                continue;
            }
            let exact = well_closed_form(z, -4.0, 1.0, 0.0).0;
            let k = ev.psi(z, 0.0).unwrap().0;
            let o = ode.psi(z, 0.0).unwrap().0;
            worst = worst.max(rel(k, exact)).max(rel(o, exact)).max(rel(k, o));
            count += 1;
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max pairwise relative difference {worst:.2e} over {count} points ({skipped} near zeros), tol 1e-6"),
    )
}

/// Neumann bounds, support and integral-equation residual order.
fn kernel_bounds() -> Outcome {
    let mut worst_ratio = 0.0f64;
    let mut support = 0.0f64;
    let mut orders = vec![];
    let mut resid_ok = true;
    for (base, pert) in [(free(), well(-4.0)), (g1(), ramp())] {
        let build = |h: f64| Kernel::build(&base, &pert, &KernelConfig { step: h, ..Default::default() }).unwrap();
        let (k1, k2) = (build(0.005), build(0.0025));
        for k in [&k1, &k2] {
            for d in k.diagnostics() {
                worst_ratio = worst_ratio.max(d.max_bound_ratio);
            }
            let n = k.n();
            for j in 0..=n {
                support = support.max(k.node(n, j).norm());
            }
            for a in 0..=40 {
                for b in 0..=40 {
                    let (t, x) = (a as f64 * 0.05, b as f64 * 0.05);
                    if t + x >= 2.0 && x <= t {
                        support = support.max(k.k(t, x).norm());
                    }
                }
            }
        }
        let r1 = k1.integral_equation_residual(&base, &pert);
        let r2 = k2.integral_equation_residual(&base, &pert);
        resid_ok &= r1 <= 10.0 * (0.005f64.powi(2) + 1e-12) && r2 <= 10.0 * (0.0025f64.powi(2) + 1e-12);
        orders.push((r1 / r2).log2());
    }
    let order_ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.2);
    outcome(
        worst_ratio <= 1.0 + 1e-9 && support == 0.0 && resid_ok && order_ok,
        format!(
            "worst bound ratio {worst_ratio:.6}, max |K| on t+x>=2R {support:e}, residual orders {:.3}/{:.3}, residual <= 10(h^2+tol): {resid_ok}",
            orders[0], orders[1]
        ),
    )
}

/// |Wr(ψ(z,·), ψ(−z,·)) − W(z)| ≤ 1e−7 (1+|z|)^{2g+1} for 30 random z.
fn wronskian_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    let zs: Vec<C64> = (0..30)
        .map(|_| c(rng.gen_range(-20.0..20.0), rng.gen_range(-5.0..5.0)))
        .collect();
    let mut worst = 0.0f64;
    for base in [free(), g1()] {
        for pert in [Perturbation::zero(1.0), well(-4.0)] {
            let ev = evaluator(&base, &pert, 0.0025).with_method(Method::Ode);
            let g = base.genus() as i32;
            for &z in &zs {
                let w = ev.wronskian(z);
                for x in [0.0, 0.5] {
                    let d = (ev.wronskian_at(z, x).unwrap() - w).norm();
                    worst = worst.max(d / (1e-7 * (1.0 + z.norm()).powi(2 * g + 1)));
                }
            }
        }
    }
    outcome(
        worst <= 1.0,
        format!("worst defect {:.2e} of the allowed 1e-7 (1+|z|)^(2g+1), 30 z x 2 bases x 2 perturbations", worst),
    )
}

/// Winding, closed-form match and reflection symmetry of the square well.
fn root_certification() -> Outcome {
    let ev = evaluator(&free(), &well(-4.0), 0.00125);
    let rect = Rect::new(-60.0, 60.0, -8.0, 2.0);
    let set = well_zeros(&ev, &rect);
    let total = winding(&|z| ev.jost_kernel(z), &rect, &WindingConfig::default()).unwrap();
    let winding_ok = total == set.multiplicity_sum() as i64 && set.total_winding == Some(total);
    let dist = set
        .zeros
        .iter()
        .map(|z| (newton_on_closed_form(z.z) - z.z).norm())
        .fold(0.0, f64::max);
    let sym = set.reflection_defect().unwrap();
    outcome(
        winding_ok && dist <= 1e-8 && sym <= 1e-8,
        format!(
            "winding {total} vs multiplicity sum {}, max distance to closed-form roots {dist:.2e}, reflection defect {sym:.2e}, tol 1e-8",
            set.multiplicity_sum()
        ),
    )
}

/// Resonances of the step lie in the logarithmic band; safe semicircles hold.
fn asymptotic_band() -> Outcome {
    let ev = evaluator(&free(), &well(-4.0), 0.0025);
    let set = well_zeros(&ev, &Rect::new(-100.0, 100.0, -8.0, 2.0));
    let model = band_from_perturbation(&free(), &well(-4.0)).unwrap();
    let rows: Vec<_> = band_report(&set.points(), &model, 10.0 * PI)
        .into_iter()
        .filter(|r| r.z[0].abs() <= 30.0 * PI)
        .collect();
    let dev = rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max);
    let f = |z: C64| ev.jost_kernel(z);
    let semi = (15..=25)
        .map(|n| semicircle_min(&f, 0, model.safe_radius(n), 400))
        .fold(f64::INFINITY, f64::min);
    outcome(
        !rows.is_empty() && dev <= 1.5 && semi >= 1.0 / 3.0,
        format!(
            "{} resonances with |Re z| in [10pi, 30pi], max deviation {dev:.3} (tol 1.5), min |psi|/|z|^g on n = 15..25 semicircles {semi:.3} (tol 1/3)",
            rows.len()
        ),
    )
}

/// M rebuilt from ≈100 zeros matches the forward M on [0.5i, 5i].
fn round_trip() -> Outcome {
    let ev = evaluator(&free(), &well(-4.0), 0.0025);
    let set = well_zeros(&ev, &Rect::new(-320.0, 320.0, -9.0, 2.0));
    let w = WronskianPoly::rational(0);
    let points: Vec<C64> = (0..20).map(|k| c(0.0, 0.5 + 4.5 * k as f64 / 19.0)).collect();
    let error = |retain: usize| {
        let cfg = InverseConfig {
            retain: Some(retain),
            ..Default::default()
        };
        let rec = reconstruct_m(&set, 0, &w, &cfg).unwrap();
        points
            .iter()
            .map(|&z| rel(rec.eval(z).unwrap(), ev.m_direct(z).unwrap()))
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (error(101), error(201));
    outcome(
        e1 <= 1e-2 && e2 <= 1.1 * e1,
        format!("max relative error {e1:.2e} with 101 zeros (tol 1e-2), {e2:.2e} with 201 (must not exceed +10%)"),
    )
}

/// m_direct, m_perturbation and reflect_m agree pairwise.
fn m_identities() -> Outcome {
    let upper: Vec<C64> = (0..20)
        .map(|k| {
            let t = k as f64 / 19.0;
            c(-8.0 + 16.0 * t, 0.3 + 4.0 * (1.0 - t) * t + 0.5 * t)
        })
        .collect();
    let mut worst = 0.0f64;
    for (base, pert) in [(free(), well(-4.0)), (g1(), ramp())] {
        let ev = evaluator(&base, &pert, 0.0025);
        for &z in upper.iter().chain(upper.iter().map(|z| z.conj()).collect::<Vec<_>>().iter()) {
            let a = ev.m_direct(z).unwrap();
            let b = ev.m_perturbation(z).unwrap();
            let r = ev.reflect_m(z).unwrap();
            worst = worst.max(rel(b, a)).max(rel(r, a)).max(rel(r, b));
        }
    }
    outcome(
        worst <= 1e-6,
        format!("max pairwise relative difference {worst:.2e} at 20 points per half plane, 2 potentials, tol 1e-6"),
    )
}

/// Zero perturbation: K ≡ 0, zeros only those of ψ₀(·,0) (none for g = 0),
/// M = M₀, and M = iz from the inverse.
fn trivial_limit() -> Outcome {
    let mut ok = true;
    let mut m_dev = 0.0f64;
    for base in [free(), g1()] {
        let ev = evaluator(&base, &Perturbation::zero(1.0), 0.0025);
        ok &= ev.kernel().values().max_abs() == 0.0 && ev.kernel().dvalues().max_abs() == 0.0;
        let set = well_zeros(&ev, &Rect::new(-20.0, 20.0, -6.0, 2.0));
        // ψ₀(z,0) is 1 for the free base and z + i for the rational one
        let expected: Vec<C64> = if base.genus() == 0 { vec![] } else { vec![c(0.0, -1.0)] };
        ok &= set.len() == expected.len()
            && set.total_winding == Some(expected.len() as i64)
            && set.zeros.iter().zip(&expected).all(|(z, e)| (z.z - e).norm() < 1e-12);
        for z in [c(0.5, 2.0), c(-3.0, 1.0), c(4.0, -1.5)] {
            m_dev = m_dev.max(rel(ev.m_direct(z).unwrap(), ev.m0(z).unwrap()));
        }
    }
    let rec = reconstruct_m(&ZeroSet::empty(), 0, &WronskianPoly::rational(0), &InverseConfig::default()).unwrap();
    let inv_dev = [c(0.0, 1.0), c(2.0, 3.0), c(-1.0, -4.0)]
        .iter()
        .map(|&z| rel(rec.eval(z).unwrap(), C64::i() * z))
        .fold(0.0, f64::max);
    outcome(
        ok && m_dev <= 1e-14 && inv_dev <= 1e-12,
        format!("K = 0 and zero sets of psi0(.,0) (empty for g = 0): {ok}, max |M - M0|/|M0| {m_dev:.1e}, max |M_rec - iz|/|iz| {inv_dev:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 8] = [
        ("1 oracle equivalence", oracle_equivalence, Some(120)),
        ("2 kernel bounds", kernel_bounds, Some(60)),
        ("3 Wronskian conservation", wronskian_conservation, None),
        ("4 root certification", root_certification, None),
        ("5 asymptotic band", asymptotic_band, Some(300)),
        ("6 round trip on M", round_trip, Some(300)),
        ("7 M identities", m_identities, None),
        ("8 trivial limit", trivial_limit, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let Some(secs) = limit {
            if elapsed > Duration::from_secs(secs) {
                result.pass = false;
                result.detail += &format!("; runtime limit {secs} s exceeded");
            }
        }
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name}: {} [{:.1} s]", result.detail, elapsed.as_secs_f64());
        if !result.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
