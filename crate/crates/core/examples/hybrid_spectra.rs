//! Power-spectrum participation ratios of S_L for regular and chaotic
//! Hamiltonians and their eigenvalue/eigenvector hybrids, via the
//! experiment runner.

use rdm_chaos::experiments::{run_experiment, ExperimentConfig, RunOptions};

fn main() -> rdm_chaos::Result<()> {
    let cfg = ExperimentConfig::from_toml_str("experiment = \"hybrid\"\nseed = 1\n")?;
    let out = std::env::temp_dir().join("rdm-chaos-examples");
    let m = run_experiment(&cfg, &RunOptions { out_root: Some(out.clone()), threads: None })?;
    for key in ["pr_r", "pr_rc", "pr_cr", "pr_c", "spectrum_error_rc"] {
        println!("{key:<18} {:?}", m.metric(key)?);
    }
    println!("tables in {}", out.display());
    Ok(())
}
