//! Two coupled kicked rotors stepped with the split-operator map; prints
//! the entanglement entropy growth and the late-time fluctuations.

use rdm_chaos::dynamics::{collect_records, evolve_floquet, extract_series, EvolutionPlan, Observable};
use rdm_chaos::hamiltonians::{coherent_state_on_torus, RotorParams, SplitRotorFloquet, TorusParams};
use rdm_chaos::linalg::BipartiteDims;

fn main() -> rdm_chaos::Result<()> {
    let n = 32;
    let dims = BipartiteDims::new(n, n)?;
    for (label, k) in [("chaotic", 10.0), ("regular", 0.1)] {
        let params = RotorParams::new(n, k, k, 1.0, 2.0)?;
        let torus = TorusParams::new(n, n as f64 * params.hbar, std::f64::consts::TAU, 1.0, 1.0)?;
        let one = coherent_state_on_torus(&torus, 0.0, 0.0)?;
        let psi = one.kron(&one);
        let u = SplitRotorFloquet::new(&params)?;
        let records = collect_records(evolve_floquet(&u, &psi, EvolutionPlan::floquet(1.0, 400, dims)?)?)?;
        let s = extract_series(&records, Observable::VonNeumann)?;
        let tail = &s.values[200..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let spread = tail.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
        println!(
            "{label:<8} S_VN after 10 kicks {:.3}, late mean {mean:.3} (ln N = {:.3}), late spread {spread:.3}",
            s.values[10],
            (n as f64).ln()
        );
    }
    Ok(())
}
