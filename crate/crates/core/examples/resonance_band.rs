//! Resonances of a step perturbation follow a logarithmic curve, and the
//! Jost function stays large on the safe semicircles between them.

use resonance::asymptotics::{band_from_perturbation, band_report, semicircle_min};
use resonance::jost::JostEvaluator;
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::BasePotential;
use resonance::roots::{locate, LocateConfig, Rect};
use resonance::C64;
use std::f64::consts::PI;

fn main() -> resonance::Result<()> {
    let base = BasePotential::free(C64::new(0.0, 0.0));
    let pert = Perturbation::constant(C64::new(3.0, 0.0), 1.0)?;
    let model = band_from_perturbation(&base, &pert)?;
    println!(
        "nu = {}, c1 = {}, predicted Im z at Re z = 50: {:.4}",
        model.nu,
        model.c1,
        model.band_curve(50.0)
    );

    let kernel = Kernel::build_extrapolated(&base, &pert, &KernelConfig { step: 0.0025, ..Default::default() })?;
    let ev = JostEvaluator::new(base, pert, kernel)?;
    let f = |z: C64| ev.jost_kernel(z);
    let set = locate(&f, &Rect::new(-100.0, 100.0, -8.0, 2.0), &LocateConfig::default())?;

    let rows: Vec<_> = band_report(&set.points(), &model, 10.0 * PI)
        .into_iter()
        .filter(|r| r.z[0].abs() <= 30.0 * PI)
        .collect();
    let inside = rows.iter().filter(|r| r.in_band).count();
    let worst = rows.iter().map(|r| r.deviation.abs()).fold(0.0, f64::max);
    println!(
        "{inside} of {} resonances with |Re z| in [10pi, 30pi] lie in the band; largest deviation {worst:.4}",
        rows.len()
    );

    for n in [15, 20, 25] {
        let r = model.safe_radius(n);
        println!("safe semicircle n = {n}, radius {r:.4}: min |psi| = {:.4}", semicircle_min(&f, 0, r, 400));
    }
    Ok(())
}
