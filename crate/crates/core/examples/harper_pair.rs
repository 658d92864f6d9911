//! Full coupled-Harper experiment at strong and weak coupling, followed by
//! the ordering comparison the CLI `compare` command prints.

use rdm_chaos::experiments::{compare_runs, run_experiment, ExperimentConfig, RunOptions};

fn main() -> rdm_chaos::Result<()> {
    let out = std::env::temp_dir().join("rdm-chaos-examples");
    let opts = RunOptions { out_root: Some(out), threads: None };
    let run = |coupling: f64, seed: u64| {
        let toml = format!(
            "experiment = \"harper-pair\"\nseed = {seed}\ncoupling = {coupling:?}\n\
             [classical]\norbits = 4\nsteps = 50000\nlyapunov_orbits = 2\nlyapunov_steps = 50000\n"
        );
        run_experiment(&ExperimentConfig::from_toml_str(&toml)?, &opts)
    };
    let chaotic = run(10.0, 1)?;
    let regular = run(0.1, 2)?;
    print!("{}", compare_runs(&chaotic, &regular)?.render());
    println!("lyapunov: {:?} vs {:?}", chaotic.metric("lyapunov")?, regular.metric("lyapunov")?);
    Ok(())
}
