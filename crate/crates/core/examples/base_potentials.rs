//! Built-in base potentials: explicit solutions, ODE residuals and Wronskians.

use resonance::potential::{BasePotential, BasePotentialSpec};
use resonance::C64;

fn main() -> resonance::Result<()> {
    let zero = C64::new(0.0, 0.0);
    let bases = [
        ("free", BasePotential::free(zero)),
        ("rational, x0 = -1", BasePotential::rational_g1(-1.0, zero)?),
        ("periodic, p = 2, x0 = 0.5i", BasePotential::periodic_g1(2.0, C64::new(0.0, 0.5), zero)?),
    ];
    let z = C64::new(2.0, -0.5);
    for (name, base) in &bases {
        let w = base.wronskian_poly()?;
        println!("{name}: genus {}", base.genus());
        println!("  W(z) coefficients {:?}", w.coeffs);
        for x in [0.0, 0.5, 1.0, 3.0] {
            println!(
                "  x = {x:<4} psi0 = {:.6}  ode residual {:.1e}  Wr = {:.6}",
                base.eval_psi0(z, x),
                base.ode_residual(z, x),
                base.wronskian_at(z, x)
            );
        }
    }

    let json = serde_json::to_string_pretty(&bases[1].1.to_spec()).expect("spec serializes");
    println!("rational base as JSON:\n{json}");
    let spec: BasePotentialSpec = serde_json::from_str(&json).expect("spec parses");
    assert_eq!(spec.build()?, bases[1].1);
    Ok(())
}
