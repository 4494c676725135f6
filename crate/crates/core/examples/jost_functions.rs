//! Jost function and M-function of the square well `q = −4` on `[0, 1]`,
//! by the kernel, by backward ODE integration and in closed form.

use resonance::jost::{JostEvaluator, Method};
use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::BasePotential;
use resonance::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `ψ(z,0)` and `ψ'(z,0)` for `q = c` on `[0, r]`, zero beyond.
fn square_well(c: f64, r: f64, z: C64) -> (C64, C64) {
    let k = (z * z - c).sqrt();
    let e = (I * z * r).exp();
    let psi = e * ((k * r).cos() - I * z * (k * r).sin() / k);
    let dpsi = e * (k * (k * r).sin() + I * z * (k * r).cos());
    (psi, dpsi)
}

fn main() -> resonance::Result<()> {
    let base = BasePotential::free(C64::new(0.0, 0.0));
    let pert = Perturbation::constant(C64::new(-4.0, 0.0), 1.0)?;
    let kernel = Kernel::build_extrapolated(&base, &pert, &KernelConfig { step: 0.0025, ..Default::default() })?;
    let ev = JostEvaluator::new(base, pert, kernel)?;
    let ode = ev.clone().with_method(Method::Ode);

    println!("{:>18} {:>10} {:>10}", "z", "kernel", "ode");
    for z in [C64::new(3.0, 1.0), C64::new(-12.0, -2.5), C64::new(19.0, 4.0), C64::new(0.5, -4.0)] {
        let (exact, _) = square_well(-4.0, 1.0, z);
        let rel = |v: C64| (v - exact).norm() / exact.norm();
        println!(
            "{:>18} {:>10.2e} {:>10.2e}",
            format!("{z:.1}"),
            rel(ev.jost_kernel(z)),
            rel(ode.jost(z)?)
        );
    }

    println!("\nM(z) three ways, and the closed form");
    for z in [C64::new(0.0, 2.5), C64::new(4.0, 1.0), C64::new(-3.0, -0.5)] {
        let (p, dp) = square_well(-4.0, 1.0, z);
        println!(
            "z = {z:.1}: direct {:.10}  perturbation {:.10}  reflected {:.10}  exact {:.10}",
            ev.m_direct(z)?,
            ev.m_perturbation(z)?,
            ev.reflect_m(z)?,
            dp / p
        );
    }
    Ok(())
}
