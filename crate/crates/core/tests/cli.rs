use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rdm-chaos"));
    c.env_remove("RDM_CHAOS_OUT");
    c
}

#[test]
fn lists_every_experiment() {
    let out = bin().arg("list-experiments").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["spin-proto", "rotors", "harper-pair", "intervals", "hybrid", "spectral-check"] {
        assert!(text.contains(name), "{name} missing from\n{text}");
    }
}

#[test]
fn unknown_key_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "experiment = \"intervals\"\nbogus = 1\n").unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn oversized_system_exits_with_capacity_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    fs::write(&cfg, "experiment = \"spin-proto\"\nn_spins = 16\nkept_spins = 8\n").unwrap();
    let out = bin().arg("--out-dir").arg(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!dir.path().join("spin-proto-0").exists());
}

#[test]
fn run_honours_seed_and_env_root_then_compares() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("check.toml");
    fs::write(&cfg, "experiment = \"spectral-check\"\nseed = 1\nn = 4\ntime_points = 10\n").unwrap();
    let out = bin()
        .env("RDM_CHAOS_OUT", dir.path())
        .args(["--seed", "42", "run"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("spectral-check-42");
    assert!(run.join("tr_rho2.csv").is_file());
    let manifest = run.join("manifest.json");
    assert!(manifest.is_file());

    // spectral-check has no ordered metrics, so there is nothing to compare
    let out = bin().arg("compare").arg(&manifest).arg(&manifest).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn identical_runs_show_no_separation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spin.toml");
    fs::write(
        &cfg,
        "experiment = \"spin-proto\"\nn_spins = 5\nkept_spins = 2\n[evolution]\nsteps = 512\n[diagnostics]\nmax_lag = 100\n",
    )
    .unwrap();
    let out = bin().arg("--out-dir").arg(dir.path()).arg("run").arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = dir.path().join("spin-proto-0").join("manifest.json");
    let out = bin().arg("compare").arg(&manifest).arg(&manifest).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.to_lowercase().contains("no separation"), "{text}");
}
