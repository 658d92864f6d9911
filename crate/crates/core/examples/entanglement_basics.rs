//! Partial traces and subsystem entropies of product and entangled states.

use rdm_chaos::linalg::{
    linear_entropy, random_pure_product, reduced_density, von_neumann_entropy, BipartiteDims, StateVector,
    Subsystem, C64,
};

fn main() -> rdm_chaos::Result<()> {
    let dims = BipartiteDims::new(2, 2)?;

    let product = random_pure_product(dims, 7);
    let r = reduced_density(&product, dims, Subsystem::A)?;
    println!("random product: S_L = {:.3}, S_VN = {:.3}", linear_entropy(&r), von_neumann_entropy(&r)?);

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let zero = C64::new(0.0, 0.0);
    let bell = StateVector::new(vec![C64::new(h, 0.0), zero, zero, C64::new(h, 0.0)])?;
    for keep in [Subsystem::A, Subsystem::B] {
        let r = reduced_density(&bell, dims, keep)?;
        println!(
            "Bell pair, keep {keep:?}: Tr = {:.3}, S_L = {:.3}, S_VN = {:.4} (ln 2 = {:.4})",
            r.trace(),
            linear_entropy(&r),
            von_neumann_entropy(&r)?,
            2f64.ln()
        );
    }
    Ok(())
}
