//! Eigenvalues and resonances of the square well by the argument principle,
//! certified against the closed-form Jost function.

use resonance::jost::JostEvaluator;
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::BasePotential;
use resonance::roots::{locate, winding, LocateConfig, Rect, WindingConfig};
use resonance::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn main() -> resonance::Result<()> {
    let base = BasePotential::free(C64::new(0.0, 0.0));
    let pert = Perturbation::constant(C64::new(-4.0, 0.0), 1.0)?;
    let kernel = Kernel::build_extrapolated(&base, &pert, &KernelConfig { step: 0.0025, ..Default::default() })?;
    let ev = JostEvaluator::new(base, pert, kernel)?;
    let f = |z: C64| ev.jost_kernel(z);

    let rect = Rect::new(-40.0, 40.0, -7.0, 2.0);
    let set = locate(&f, &rect, &LocateConfig::default())?;
    println!(
        "{} zeros, multiplicity sum {}, winding on the boundary {:?}",
        set.len(),
        set.multiplicity_sum(),
        set.total_winding
    );
    let check = winding(&f, &rect.notched(1e-6), &WindingConfig::default())?;
    println!("independent winding count {check}");

    // Zeros of cos k − iz sin k / k with k = √(z² + 4).
    let closed = |z: C64| {
        let k = (z * z + 4.0).sqrt();
        k.cos() - I * z * k.sin() / k
    };
    for zero in set.eigenvalues() {
        println!("eigenvalue z = {:.12}  energy {:.12}", zero.z, zero.energy());
    }
    let worst = set
        .zeros
        .iter()
        .map(|z| closed(z.z).norm())
        .fold(0.0, f64::max);
    println!("largest closed-form residual at a located zero {worst:.1e}");
    println!("symmetry defect under z -> -conj(z): {:.1e}", set.reflection_defect().unwrap_or(0.0));
    for zero in set.resonances().take(6) {
        println!("resonance {:.10}", zero.z);
    }
    Ok(())
}
