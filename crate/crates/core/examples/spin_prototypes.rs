//! Chaotic (GOE) and regular (Harper) spin prototypes: matrix
//! autocorrelation of the Hamiltonian and the linear-entropy correlation
//! length of a subsystem.

use rdm_chaos::diagnostics::{matrix_autocorrelation, series_autocorrelation, CorrelationLength};
use rdm_chaos::dynamics::{anti_alias_dt, collect_records, evolve_state_spectral, extract_series, EvolutionPlan, Observable};
use rdm_chaos::hamiltonians::{build_goe, build_harper, GoeParams, TorusParams};
use rdm_chaos::linalg::{eigh, random_pure_product, BipartiteDims, HermitianOperator};

fn describe(name: &str, h: &HermitianOperator, dims: BipartiteDims, hbar: f64) -> rdm_chaos::Result<()> {
    let a_h = matrix_autocorrelation(h.matrix(), 40, false)?;
    let spec = eigh(h)?;
    let dt = anti_alias_dt(&spec, hbar);
    let plan = EvolutionPlan::spectral(dt, 2048, hbar, dims)?;
    let records = collect_records(evolve_state_spectral(&spec, &random_pure_product(dims, 1), plan)?)?;
    let s_l = extract_series(&records, Observable::Linear)?;
    let ac = series_autocorrelation(&s_l, 300)?;
    println!(
        "{name:<8} l_c(A_H) = {:?}, l_c(S_L) = {:?} lags of dt = {dt:.4}",
        CorrelationLength::of(&a_h),
        CorrelationLength::of(&ac)
    );
    Ok(())
}

fn main() -> rdm_chaos::Result<()> {
    // seven spins, four kept: 16 x 8
    let dims = BipartiteDims::new(16, 8)?;
    let hbar = 0.592;
    describe("GOE", &build_goe(&GoeParams::new(128, 3))?, dims, hbar)?;
    let torus = TorusParams::square(128, hbar, 1.0, 1.0)?;
    describe("Harper", &build_harper(&torus)?, dims, hbar)
}
