//! Transformation kernel of a square well: Neumann terms against their
//! a-priori bounds and the integral-equation residual under refinement.

use resonance::kernel::{Kernel, KernelConfig, Perturbation};
use resonance::potential::BasePotential;
use resonance::C64;

fn main() -> resonance::Result<()> {
    let base = BasePotential::free(C64::new(0.0, 0.0));
    let pert = Perturbation::constant(C64::new(-4.0, 0.0), 1.0)?;

    let mut previous: Option<f64> = None;
    for h in [0.02, 0.01, 0.005, 0.0025] {
        let cfg = KernelConfig {
            step: h,
            ..Default::default()
        };
        let k = Kernel::build(&base, &pert, &cfg)?;
        let residual = k.integral_equation_residual(&base, &pert);
        let worst = k
            .diagnostics()
            .iter()
            .map(|d| d.max_bound_ratio)
            .fold(0.0, f64::max);
        let order = previous.map_or("-".to_string(), |r| format!("{:.2}", (r / residual).log2()));
        println!(
            "h = {h:<6} terms {:>3}  tail bound {:.1e}  max term/bound {worst:.3}  residual {residual:.3e}  order {order}",
            k.terms_used(),
            k.tail_bound(),
        );
        previous = Some(residual);
    }

    // On the diagonal K(x,x) = ½∫_x^R (q − q₀) = −2(1 − x).
    let k = Kernel::build_extrapolated(&base, &pert, &KernelConfig { step: 0.0025, ..Default::default() })?;
    for x in [0.0, 0.25, 0.5, 0.75] {
        let exact = -2.0 * (1.0 - x);
        println!("K({x}, {x}) = {:+.12}  exact {exact:+.12}", k.k(x, x).re);
    }
    println!("K(1.2, 0.9) = {:.1e} (outside t + x < 2R)", k.k(1.2, 0.9).norm());
    Ok(())
}
