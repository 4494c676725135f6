//! Rebuilds the M-function of the square well from its zeros alone and
//! compares with the forward computation on the imaginary axis.

use resonance::inverse::{reconstruct_m, InverseConfig};
use resonance::jost::JostEvaluator;
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::BasePotential;
use resonance::roots::{locate, LocateConfig, Rect};
use resonance::C64;

fn main() -> resonance::Result<()> {
    let base = BasePotential::free(C64::new(0.0, 0.0));
    let pert = Perturbation::constant(C64::new(-4.0, 0.0), 1.0)?;
    let kernel = Kernel::build_extrapolated(&base, &pert, &KernelConfig { step: 0.0025, ..Default::default() })?;
    let ev = JostEvaluator::new(base.clone(), pert, kernel)?;
    let f = |z: C64| ev.jost_kernel(z);
    let set = locate(&f, &Rect::new(-320.0, 320.0, -9.0, 2.0), &LocateConfig::default())?;
    let w = base.wronskian_poly()?;
    let points: Vec<C64> = (0..20).map(|k| C64::new(0.0, 0.5 + 4.5 * k as f64 / 19.0)).collect();

    for retain in [25, 50, 100, 200] {
        let cfg = InverseConfig {
            retain: Some(retain + 1),
            ..Default::default()
        };
        let rec = reconstruct_m(&set, 0, &w, &cfg)?;
        let mut worst: f64 = 0.0;
        for &z in &points {
            let m = ev.m_direct(z)?;
            worst = worst.max((rec.eval(z)? - m).norm() / m.norm());
        }
        println!(
            "{:>3} zeros (+{:>4} synthetic): a0 = {:.10}, M(0) = {:.8}, M'(0) = {:.8}, max rel err {worst:.2e}",
            rec.retained(),
            rec.synthetic(),
            rec.hadamard.a0,
            rec.m0(),
            rec.m0_prime()
        );
    }
    Ok(())
}
