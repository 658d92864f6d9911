//! Nearest-neighbour spacing histograms: level repulsion in a GOE spectrum
//! against an uncorrelated (Poisson) one.

use rand::{Rng, SeedableRng};
use rdm_chaos::diagnostics::nnlsd;
use rdm_chaos::hamiltonians::{build_goe, GoeParams};
use rdm_chaos::linalg::{eigh, Spectrum, UnitaryOperator};

fn main() -> rdm_chaos::Result<()> {
    let n = 400;
    let goe = eigh(&build_goe(&GoeParams::new(n, 5))?)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut levels: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * n as f64).collect();
    levels.sort_by(f64::total_cmp);
    let poisson = Spectrum::new(levels, UnitaryOperator::identity(n))?;
    for (name, spec) in [("GOE", &goe), ("Poisson", &poisson)] {
        let h = nnlsd(spec, 30)?;
        println!("{name:<8} P(first bin) = {:.3}", h.first_bin_fraction());
        for (k, d) in h.density().iter().enumerate().take(12) {
            println!("  {:5.2} {}", (k as f64 + 0.5) * h.bin_width(), "#".repeat((d * 40.0) as usize));
        }
    }
    Ok(())
}
