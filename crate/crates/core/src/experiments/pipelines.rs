//! One function per experiment. Each fills in the config values it resolves
//! (such as the sample interval) so the manifest echo is complete.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::*;
use super::output::RunWriter;
use crate::classical::{
    lyapunov_largest, section_crossings, section_thickness, HarperFlow, PhasePoint4, SampledHarperFlow,
    SectionPoint,
};
use crate::diagnostics::{
    energy_interval_distribution, matrix_autocorrelation, mean_level_spacing, nnlsd, power_spectrum,
    series_autocorrelation, trace_rho_squared_spectral, AutocorrResult, IntervalHistogram,
};
use crate::dynamics::{
    anti_alias_dt, collect_records, evolve_density_spectral, evolve_floquet, evolve_state_spectral,
    extract_series, EvolutionPlan, Observable, TimeSeries,
};
use crate::error::{Error, Result};
use crate::hamiltonians::{
    build_coupled_harper, build_floquet_coupled_rotors, build_goe, build_harper, coherent_state_with_width,
    hybrid_hamiltonian, rotor_momentum_basis, CoupledHarperParams, GoeParams, RotorCoupling, RotorParams,
    SplitRotorFloquet, TorusParams,
};
use crate::linalg::{
    eigh, random_pure_product, BipartiteDims, HermitianOperator, Spectrum, StateVector, UnitaryOperator,
};

/// Neighbours used for the local thickness of a section.
const THICKNESS_WINDOW: usize = 50;
/// Crossings per orbit entering the thickness estimate (the cost is quadratic).
const THICKNESS_POINTS: usize = 2000;
/// Recurrence threshold on the autocorrelation tail.
const RECURRENCE_LEVEL: f64 = 0.5;

fn initial_state(
    initial: &mut InitialState,
    dims: BipartiteDims,
    run_seed: u64,
    tori: Option<(&TorusParams, &TorusParams)>,
    w: &mut RunWriter,
) -> Result<StateVector> {
    match initial {
        InitialState::RandomProduct { seed } => {
            let s = *seed.get_or_insert(run_seed);
            w.seed("initial_state", s);
            Ok(random_pure_product(dims, s))
        }
        InitialState::CoherentProduct { q1, p1, q2, p2, width } => {
            let (ta, tb) = tori.ok_or_else(|| {
                Error::Validation("initial.kind: coherent-product needs phase-space subsystems".into())
            })?;
            let a = coherent_state_with_width(ta, *q1, *p1, *width)?;
            let b = coherent_state_with_width(tb, *q2, *p2, *width)?;
            Ok(a.kron(&b))
        }
        InitialState::Basis { index } => StateVector::basis(dims.composite(), *index),
    }
}

fn spectral_series(
    spec: &Spectrum,
    psi: &StateVector,
    dt: f64,
    ev: &EvolutionSection,
    hbar: f64,
    dims: BipartiteDims,
    observables: &[Observable],
) -> Result<Vec<TimeSeries>> {
    let plan = EvolutionPlan::spectral(dt, ev.steps, hbar, dims)?.checking_every(ev.check_every);
    let records = collect_records(evolve_state_spectral(spec, psi, plan)?)?;
    observables.iter().map(|&o| extract_series(&records, o)).collect()
}

fn matrix_lag(d: &DiagnosticsSection, dim: usize) -> usize {
    d.matrix_max_lag.unwrap_or(dim - 1).min(dim - 1)
}

fn goe_sigma(sigma: Option<f64>, n: usize) -> f64 {
    sigma.unwrap_or(1.0 / (n as f64).sqrt())
}

fn tail_stats(ac: &AutocorrResult, start: usize) -> (f64, usize) {
    let tail = ac.values.get(start..).unwrap_or(&[]);
    let max = tail.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (max, tail.iter().filter(|&&c| c > RECURRENCE_LEVEL).count())
}

fn check_matrix_lag(d: &DiagnosticsSection, dim: usize) -> Result<()> {
    match d.matrix_max_lag {
        Some(l) if l == 0 || l >= dim => Err(Error::Validation(format!(
            "diagnostics.matrix_max_lag: must be in 1..{dim}, got {l}"
        ))),
        _ => Ok(()),
    }
}

pub(crate) fn spin_proto(c: &mut SpinProtoConfig, w: &mut RunWriter) -> Result<()> {
    let dims = BipartiteDims::spins(c.n_spins, c.kept_spins)?;
    let n = dims.composite();
    check_matrix_lag(&c.diagnostics, n)?;
    let sigma = goe_sigma(c.sigma, n);
    c.sigma = Some(sigma);
    w.seed("goe", c.seed);
    let goe = build_goe(&GoeParams { n, sigma, seed: c.seed })?;
    let torus = TorusParams::square(n, c.hbar, c.gamma1, c.gamma2)?;
    let harper = build_harper(&torus)?;
    w.default_value("harper_period", torus.period_p);
    let (sc, sr) = rayon::join(|| eigh(&goe), || eigh(&harper));
    let (sc, sr) = (sc?, sr?);
    let dt = c
        .evolution
        .dt
        .unwrap_or_else(|| anti_alias_dt(&sc, c.hbar).min(anti_alias_dt(&sr, c.hbar)));
    c.evolution.dt = Some(dt);
    w.default_value("dt_rule", "smaller anti-aliasing interval of the two spectra");
    let psi = initial_state(&mut c.initial, dims, c.seed, None, w)?;
    let obs = [Observable::Linear];
    let (lc, lr) = rayon::join(
        || spectral_series(&sc, &psi, dt, &c.evolution, c.hbar, dims, &obs),
        || spectral_series(&sr, &psi, dt, &c.evolution, c.hbar, dims, &obs),
    );
    let mlag = matrix_lag(&c.diagnostics, n);
    let systems: [(&str, &HermitianOperator, TimeSeries); 2] =
        [("chaotic", &goe, lc?.remove(0)), ("regular", &harper, lr?.remove(0))];
    for (tag, h, s) in systems {
        w.series(&format!("s_l_{tag}.csv"), &s)?;
        let ac = series_autocorrelation(&s, c.diagnostics.max_lag)?;
        w.autocorrelation(&format!("s_l_autocorr_{tag}"), &format!("s_l_{tag}"), &ac, dt)?;
        let ps = power_spectrum(&s)?;
        w.spectrum(&format!("power_spectrum_{tag}"), &format!("s_l_{tag}"), &ps)?;
        let ah = matrix_autocorrelation(h.matrix(), mlag, false)?;
        w.autocorrelation(&format!("a_h_{tag}"), &format!("a_h_{tag}"), &ah, 1.0)?;
    }
    w.metric("dt", dt);
    Ok(())
}

pub(crate) fn rotors(c: &mut RotorsConfig, w: &mut RunWriter) -> Result<()> {
    let mut params = RotorParams::new(c.n, c.k1, c.k2, c.tau, c.coupling)?.with_coupling_mode(c.coupling_mode);
    if let Some(h) = c.hbar {
        params = params.with_hbar(h)?;
    }
    c.hbar = Some(params.hbar);
    let dims = BipartiteDims::new(c.n, c.n)?;
    check_matrix_lag(&c.diagnostics, dims.composite())?;
    let u = build_floquet_coupled_rotors(&params)?;
    w.metric("unitarity_residual", u.residual());
    // each rotor is a torus with angle period 2π and momentum period Nħ
    let torus = TorusParams::new(c.n, c.n as f64 * params.hbar, TAU, 1.0, 1.0)?;
    let psi = initial_state(&mut c.initial, dims, c.seed, Some((&torus, &torus)), w)?;
    let plan = EvolutionPlan::floquet(c.tau, c.evolution.steps, dims)?.checking_every(c.evolution.check_every);
    c.evolution.dt = Some(c.tau);
    let records = if c.coupling_mode == RotorCoupling::Kicked {
        let split = SplitRotorFloquet::new(&params)?;
        let recs = collect_records(evolve_floquet(&split, &psi, plan)?)?;
        recs
    } else {
        collect_records(evolve_floquet(&u, &psi, plan)?)?
    };
    let s = extract_series(&records, Observable::VonNeumann)?;
    w.series("s_vn.csv", &s)?;
    let ac = series_autocorrelation(&s, c.diagnostics.max_lag)?;
    w.autocorrelation("s_vn_autocorr", "s_vn", &ac, c.tau)?;
    let (max_tail, recurrences) = tail_stats(&ac, c.diagnostics.tail_start);
    w.metric("s_vn_tail_max_abs", max_tail);
    w.metric("s_vn_tail_recurrences", recurrences as f64);
    w.default_value(
        "floquet_stepping",
        if c.coupling_mode == RotorCoupling::Kicked { "split-operator FFT" } else { "dense one-period operator" },
    );
    w.default_value("recurrence_level", RECURRENCE_LEVEL);

    let um = rotor_momentum_basis(&u, c.n)?;
    let au = matrix_autocorrelation(um.matrix(), matrix_lag(&c.diagnostics, dims.composite()), true)?;
    w.autocorrelation("a_u", "a_u", &au, 1.0)?;
    w.default_value("a_u_basis", "ordered momentum basis, modulus of the entries");
    Ok(())
}

fn harper_torus(c: &HarperPairConfig) -> Result<TorusParams> {
    match c.n {
        Some(n) => TorusParams::new(n, c.period_p, c.period_q, c.gamma1, c.gamma2),
        None => TorusParams::from_hbar(c.hbar, c.period_p, c.period_q, c.gamma1, c.gamma2),
    }
}

fn section_orbit(flow: &HarperFlow, cl: &ClassicalSection, x0: PhasePoint4) -> Result<Vec<SectionPoint>> {
    section_crossings(x0, flow, cl.dt, cl.steps, cl.section_q2, cl.max_crossings)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub(crate) fn harper_pair(c: &mut HarperPairConfig, w: &mut RunWriter) -> Result<()> {
    let torus = harper_torus(c)?;
    c.n = Some(torus.n);
    c.hbar = torus.hbar();
    let params = CoupledHarperParams {
        torus,
        coupling: c.coupling,
    };
    let dims = BipartiteDims::new(torus.n, torus.n)?;
    check_matrix_lag(&c.diagnostics, dims.composite())?;
    let h = build_coupled_harper(&params)?;
    let spec = eigh(&h)?;
    let hbar = torus.hbar();
    let dt = c.evolution.dt.unwrap_or_else(|| anti_alias_dt(&spec, hbar));
    c.evolution.dt = Some(dt);
    let psi = initial_state(&mut c.initial, dims, c.seed, Some((&torus, &torus)), w)?;
    let mut series = spectral_series(
        &spec,
        &psi,
        dt,
        &c.evolution,
        hbar,
        dims,
        &[Observable::Linear, Observable::Purity],
    )?;
    let purity = series.pop().expect("two observables");
    let s_l = series.pop().expect("two observables");
    w.series("s_l.csv", &s_l)?;
    w.series("tr_rho2.csv", &purity)?;
    let ac = series_autocorrelation(&s_l, c.diagnostics.max_lag)?;
    w.autocorrelation("s_l_autocorr", "s_l", &ac, dt)?;
    let ps = power_spectrum(&purity)?;
    w.spectrum("power_spectrum", "tr_rho2", &ps)?;
    let ah = matrix_autocorrelation(h.matrix(), matrix_lag(&c.diagnostics, dims.composite()), false)?;
    w.autocorrelation("a_h", "a_h", &ah, 1.0)?;
    w.metric("dt", dt);

    classical_harper(c, &params, w)
}

fn classical_harper(c: &HarperPairConfig, params: &CoupledHarperParams, w: &mut RunWriter) -> Result<()> {
    let cl = &c.classical;
    let flow = HarperFlow::from(params);
    let orbit_seed = c.seed.wrapping_add(1);
    w.seed("classical_orbits", orbit_seed);
    let mut rng = ChaCha8Rng::seed_from_u64(orbit_seed);
    let starts: Vec<PhasePoint4> = (0..cl.orbits.max(cl.lyapunov_orbits))
        .map(|_| {
            let mut x = || rng.random::<f64>() * TAU;
            PhasePoint4::new(x(), x(), x(), x())
        })
        .collect();

    let sections: Vec<Vec<SectionPoint>> = starts[..cl.orbits]
        .par_iter()
        .map(|&x0| section_orbit(&flow, cl, x0))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (k, sec) in sections.iter().enumerate() {
        rows.extend(sec.iter().map(|s| vec![k as f64, s.q1, s.p1, s.crossing_time]));
    }
    w.csv("poincare.csv", &["orbit", "q1", "p1", "t"], rows)?;
    let crossing_orbits: Vec<&Vec<SectionPoint>> =
        sections.iter().filter(|s| s.len() > THICKNESS_WINDOW).collect();
    w.metric("section_orbits_used", crossing_orbits.len() as f64);
    w.metric(
        "section_crossings",
        sections.iter().map(|s| s.len()).sum::<usize>() as f64,
    );
    let thickness: Vec<f64> = crossing_orbits
        .par_iter()
        .map(|s| median(section_thickness(&s[..s.len().min(THICKNESS_POINTS)], THICKNESS_WINDOW)))
        .collect();
    w.metric("section_thickness_median", median(thickness));
    w.default_value("section_thickness_window", THICKNESS_WINDOW);
    w.default_value("section_thickness_points", THICKNESS_POINTS);

    if cl.lyapunov_orbits > 0 {
        let system = SampledHarperFlow { flow, dt: cl.dt };
        let lyap: Vec<f64> = starts[..cl.lyapunov_orbits]
            .par_iter()
            .map(|&x0| lyapunov_largest(&system, x0, cl.lyapunov_steps))
            .collect::<Result<_>>()?;
        w.csv(
            "lyapunov.csv",
            &["orbit", "lambda"],
            lyap.iter().enumerate().map(|(k, &l)| vec![k as f64, l]),
        )?;
        w.metric("lyapunov", lyap.iter().sum::<f64>() / lyap.len() as f64);
    }
    Ok(())
}

fn pool_histograms(hs: &[IntervalHistogram]) -> IntervalHistogram {
    let mut out = hs[0].clone();
    for h in &hs[1..] {
        for (a, b) in out.counts.iter_mut().zip(&h.counts) {
            *a += b;
        }
        out.total_pairs += h.total_pairs;
    }
    out
}

fn histogram_rows(h: &IntervalHistogram) -> impl Iterator<Item = Vec<f64>> + '_ {
    let d = h.density();
    (0..h.counts.len()).map(move |k| vec![h.bin_edges[k], h.bin_edges[k + 1], h.counts[k] as f64, d[k]])
}

/// Quantile of all pairwise level intervals, in units of the mean spacing.
fn interval_quantile(spec: &Spectrum, q: f64) -> f64 {
    let e = spec.eigenvalues();
    let mut gaps: Vec<f64> = (0..e.len())
        .flat_map(|a| (0..a).map(move |b| e[a] - e[b]))
        .collect();
    gaps.sort_by(f64::total_cmp);
    let idx = ((q * gaps.len() as f64).ceil() as usize).clamp(1, gaps.len()) - 1;
    gaps[idx] / mean_level_spacing(spec)
}

fn poisson_spectrum(n: usize, seed: u64) -> Result<Spectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * n as f64).collect();
    levels.sort_by(f64::total_cmp);
    Spectrum::new(levels, UnitaryOperator::identity(n))
}

pub(crate) fn intervals(c: &mut IntervalsConfig, w: &mut RunWriter) -> Result<()> {
    let sigma = goe_sigma(c.sigma, c.n);
    c.sigma = Some(sigma);
    let bins = c.diagnostics.nnlsd_bins;
    let seeds: Vec<u64> = (0..c.samples as u64).map(|k| c.seed.wrapping_add(k)).collect();
    w.seed("goe_first", c.seed);
    w.default_value("goe_seeds", format!("{}..{}", c.seed, c.seed.wrapping_add(c.samples as u64)));
    let poisson_seed = c.seed ^ 0x005E_ED0F_9015_5011;
    w.seed("poisson_first", poisson_seed);
    let goe_specs: Vec<Spectrum> = seeds
        .par_iter()
        .map(|&s| eigh(&build_goe(&GoeParams { n: c.n, sigma, seed: s })?))
        .collect::<Result<_>>()?;
    let poisson: Vec<Spectrum> = (0..c.samples as u64)
        .map(|k| poisson_spectrum(c.n, poisson_seed.wrapping_add(k)))
        .collect::<Result<_>>()?;
    let torus = TorusParams::square(c.n, c.hbar, c.gamma1, c.gamma2)?;
    let harper = eigh(&build_harper(&torus)?)?;

    let goe_nn = pool_histograms(&goe_specs.iter().map(|s| nnlsd(s, bins)).collect::<Result<Vec<_>>>()?);
    let poi_nn = pool_histograms(&poisson.iter().map(|s| nnlsd(s, bins)).collect::<Result<Vec<_>>>()?);
    let harper_nn = nnlsd(&harper, bins)?;
    let header = ["s_lo", "s_hi", "count", "density"];
    w.csv("nnlsd_goe.csv", &header, histogram_rows(&goe_nn))?;
    w.csv("nnlsd_poisson.csv", &header, histogram_rows(&poi_nn))?;
    w.csv("nnlsd_harper.csv", &header, histogram_rows(&harper_nn))?;
    w.metric("nnlsd_first_bin_goe", goe_nn.first_bin_fraction());
    w.metric("nnlsd_first_bin_poisson", poi_nn.first_bin_fraction());
    w.metric("nnlsd_first_bin_harper", harper_nn.first_bin_fraction());

    let ib = c.diagnostics.interval_bins;
    let goe = &goe_specs[0];
    let omega_goe = energy_interval_distribution(goe, c.hbar, ib)?;
    let omega_harper = energy_interval_distribution(&harper, c.hbar, ib)?;
    let header = ["omega_lo", "omega_hi", "count", "density"];
    w.csv("omega_goe.csv", &header, histogram_rows(&omega_goe))?;
    w.csv("omega_harper.csv", &header, histogram_rows(&omega_harper))?;
    // supports in units of each system's own mean spacing
    let rel_goe = omega_goe.support() / (mean_level_spacing(goe) / c.hbar);
    let rel_harper = omega_harper.support() / (mean_level_spacing(&harper) / c.hbar);
    w.metric("omega_support_goe", rel_goe);
    w.metric("omega_support_harper", rel_harper);
    w.metric("omega_support_ratio", rel_goe / rel_harper);
    w.metric(
        "omega_q95_ratio",
        interval_quantile(goe, 0.95) / interval_quantile(&harper, 0.95),
    );
    Ok(())
}

pub(crate) fn hybrid(c: &mut HybridConfig, w: &mut RunWriter) -> Result<()> {
    let dims = BipartiteDims::spins(c.n_spins, c.kept_spins)?;
    let n = dims.composite();
    let sigma = goe_sigma(c.sigma, n);
    c.sigma = Some(sigma);
    w.seed("goe", c.seed);
    let goe = build_goe(&GoeParams { n, sigma, seed: c.seed })?;
    let harper = build_harper(&TorusParams::square(n, c.hbar, c.gamma1, c.gamma2)?)?;
    let (sc, sr) = rayon::join(|| eigh(&goe), || eigh(&harper));
    let (sc, sr) = (sc?, sr?);
    let h_rc = hybrid_hamiltonian(&sr, &sc)?;
    let h_cr = hybrid_hamiltonian(&sc, &sr)?;
    let (s_rc, s_cr) = rayon::join(|| eigh(&h_rc), || eigh(&h_cr));
    let (s_rc, s_cr) = (s_rc?, s_cr?);
    let max_diff = |a: &Spectrum, b: &Spectrum| {
        a.eigenvalues()
            .iter()
            .zip(b.eigenvalues())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    w.metric("spectrum_error_rc", max_diff(&s_rc, &sr));
    w.metric("spectrum_error_cr", max_diff(&s_cr, &sc));

    let dt = c
        .evolution
        .dt
        .unwrap_or_else(|| anti_alias_dt(&sc, c.hbar).min(anti_alias_dt(&sr, c.hbar)));
    c.evolution.dt = Some(dt);
    let psi = initial_state(&mut c.initial, dims, c.seed, None, w)?;
    let systems: [(&str, &Spectrum); 4] = [("r", &sr), ("rc", &s_rc), ("cr", &s_cr), ("c", &sc)];
    let series: Vec<TimeSeries> = systems
        .par_iter()
        .map(|(_, s)| spectral_series(s, &psi, dt, &c.evolution, c.hbar, dims, &[Observable::Linear]).map(|mut v| v.remove(0)))
        .collect::<Result<_>>()?;
    let mut prs = Vec::new();
    for ((tag, _), s) in systems.iter().zip(&series) {
        w.series(&format!("s_l_{tag}.csv"), s)?;
        let ps = power_spectrum(s)?;
        w.spectrum(&format!("power_spectrum_{tag}"), tag, &ps)?;
        prs.push(ps.participation_ratio);
    }
    w.metric("pr_chain_holds", f64::from(u8::from(prs.windows(2).all(|p| p[0] < p[1]))));
    w.metric("dt", dt);
    Ok(())
}

pub(crate) fn spectral_check(c: &mut SpectralCheckConfig, w: &mut RunWriter) -> Result<()> {
    // a square torus of side 2π, so ħ = 2π/N
    let torus = TorusParams::new(c.n, TAU, TAU, c.gamma1, c.gamma2)?;
    let params = CoupledHarperParams {
        torus,
        coupling: c.coupling,
    };
    let dims = BipartiteDims::new(c.n, c.n)?;
    let spec = eigh(&build_coupled_harper(&params)?)?;
    let hbar = torus.hbar();
    let dt = c.dt.unwrap_or_else(|| anti_alias_dt(&spec, hbar));
    c.dt = Some(dt);
    let psi = initial_state(&mut c.initial, dims, c.seed, Some((&torus, &torus)), w)?;
    let rho0 = psi.density();
    let times: Vec<f64> = (0..c.time_points).map(|k| k as f64 * dt).collect();
    let spectral = trace_rho_squared_spectral(&spec, &rho0, dims, hbar, &times)?;
    let plan = EvolutionPlan::spectral(dt, c.time_points - 1, hbar, dims)?;
    let direct = extract_series(
        &collect_records(evolve_density_spectral(&spec, &rho0, plan)?)?,
        Observable::Purity,
    )?;
    let diffs: Vec<f64> = spectral
        .values
        .iter()
        .zip(&direct.values)
        .map(|(a, b)| (a - b).abs())
        .collect();
    w.csv(
        "tr_rho2.csv",
        &["t", "spectral", "direct", "abs_diff"],
        (0..times.len()).map(|k| vec![times[k], spectral.values[k], direct.values[k], diffs[k]]),
    )?;
    w.metric("max_abs_diff", diffs.iter().cloned().fold(0.0, f64::max));
    w.metric("dim", dims.composite() as f64);
    Ok(())
}
