use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rdm_chaos::experiments::{self, RunManifest, RunOptions, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "rdm-chaos", version, about = "Quantum chaos diagnostics from reduced-density-matrix fluctuations")]
struct Cli {
    /// Override the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root [default: the config's out_dir, then $RDM_CHAOS_OUT, then ./runs]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads for parallel sections of a run.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config or an earlier run's manifest.json.
    Run { config: PathBuf },
    /// Check ordering assertions between a chaotic run A and a regular run B.
    Compare { manifest_a: PathBuf, manifest_b: PathBuf },
    /// List the available experiments.
    ListExperiments,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> rdm_chaos::Result<ExitCode> {
    match cli.command {
        Command::ListExperiments => {
            for (name, about) in experiments::EXPERIMENTS {
                println!("{name:<16} {about}");
            }
            println!("\noutput root: --out-dir, else ${OUT_DIR_ENV}, else ./{}", experiments::DEFAULT_OUT_ROOT);
        }
        Command::Run { config } => {
            let mut cfg = experiments::load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.set_seed(seed);
            }
            let opts = RunOptions {
                out_root: cli.out_dir,
                threads: cli.threads,
            };
            let dir = experiments::output_dir(&cfg, &opts);
            let manifest = experiments::run_experiment(&cfg, &opts)?;
            println!("wrote {} files to {}", manifest.outputs.len(), dir.display());
            for (name, value) in &manifest.metrics {
                match value {
                    Some(v) => println!("  {name} = {v}"),
                    None => println!("  {name} = none"),
                }
            }
            for f in &manifest.fit_failures {
                println!("  fit failure: {} ({})", f.series, f.reason);
            }
        }
        Command::Compare { manifest_a, manifest_b } => {
            let a = RunManifest::load(&manifest_a)?;
            let b = RunManifest::load(&manifest_b)?;
            let report = experiments::compare_runs(&a, &b)?;
            print!("{}", report.render());
        }
    }
    Ok(ExitCode::SUCCESS)
}
