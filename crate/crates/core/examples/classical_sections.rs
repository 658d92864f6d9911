//! Classical coupled Harper flow: Poincaré section size and Lyapunov
//! exponent at weak and strong coupling.

use rdm_chaos::classical::{lyapunov_largest, section_crossings, HarperFlow, PhasePoint4, SampledHarperFlow};

fn main() -> rdm_chaos::Result<()> {
    let x0 = PhasePoint4::new(0.4, 1.9, 0.3, 1.0);
    let dt = 1e-2;
    for coupling in [0.1, 10.0] {
        let flow = HarperFlow { gamma1: 2.0, gamma2: 2.0, coupling };
        let section = section_crossings(x0, &flow, dt, 100_000, 0.0, 2000)?;
        let lambda = lyapunov_largest(&SampledHarperFlow { flow, dt }, x0, 100_000)?;
        println!(
            "c = {coupling:<5} E = {:.3}, {} section crossings, lambda = {lambda:.4}",
            flow.energy(&x0),
            section.len()
        );
    }
    Ok(())
}
