//! Classical counterparts: the standard map, coupled kicked rotors, the
//! coupled Harper flow, Poincaré sections and Lyapunov estimates.
//!
//! All coordinates are 2π-periodic scaled angles. Maps kick first and then
//! drift.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::diagnostics::autocorr::{autocorrelation_of, AutocorrResult};
use crate::error::{Error, Result};
use crate::hamiltonians::{CoupledHarperParams, RotorParams};

/// Separation of the Benettin twin trajectories.
pub const LYAPUNOV_D0: f64 = 1e-8;
pub const MIN_LYAPUNOV_STEPS: usize = 1000;
pub const DEFAULT_FLOW_DT: f64 = 1e-2;
/// Relative energy drift allowed per `steps·dt²`.
pub const ENERGY_DRIFT_COEFF: f64 = 1e-6;

/// Maps onto `[0, 2π)`.
pub fn wrap(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Maps onto `(−π, π]`.
pub fn wrap_signed(x: f64) -> f64 {
    let w = wrap(x);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint2 {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint2 {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q: wrap(q), p: wrap(p) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint4 {
    pub q1: f64,
    pub p1: f64,
    pub q2: f64,
    pub p2: f64,
}

impl PhasePoint4 {
    pub fn new(q1: f64, p1: f64, q2: f64, p2: f64) -> Self {
        Self {
            q1: wrap(q1),
            p1: wrap(p1),
            q2: wrap(q2),
            p2: wrap(p2),
        }
    }
}

/// Fixed-size state view used by the generic Lyapunov estimator.
pub trait PhasePoint: Copy {
    const DIM: usize;
    fn coords(&self) -> [f64; 4];
    fn from_coords(c: &[f64]) -> Self;
}

impl PhasePoint for PhasePoint2 {
    const DIM: usize = 2;
    fn coords(&self) -> [f64; 4] {
        [self.q, self.p, 0.0, 0.0]
    }
    fn from_coords(c: &[f64]) -> Self {
        Self::new(c[0], c[1])
    }
}

impl PhasePoint for PhasePoint4 {
    const DIM: usize = 4;
    fn coords(&self) -> [f64; 4] {
        [self.q1, self.p1, self.q2, self.p2]
    }
    fn from_coords(c: &[f64]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

/// Uniformly sampled orbit; `points[k]` is at time `k·dt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<P> {
    pub dt: f64,
    pub points: Vec<P>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub q1: f64,
    pub p1: f64,
    pub crossing_time: f64,
}

/// `p' = p + K sin q`, `q' = q + τ p'`.
pub fn standard_map_step(x: PhasePoint2, k: f64, tau: f64) -> PhasePoint2 {
    let p = wrap(x.p + k * x.q.sin());
    PhasePoint2::new(x.q + tau * p, p)
}

/// Kicked-rotor parameters of the classical coupled map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotorMap {
    pub k1: f64,
    pub k2: f64,
    pub tau: f64,
    pub coupling: f64,
}

impl From<&RotorParams> for RotorMap {
    fn from(p: &RotorParams) -> Self {
        Self {
            k1: p.k1,
            k2: p.k2,
            tau: p.tau,
            coupling: p.coupling,
        }
    }
}

/// Kick by `−∇V` with `V = K1 cos q1 + K2 cos q2 + c sin q1 sin q2`, then drift.
pub fn coupled_rotor_map_step(x: PhasePoint4, params: &RotorMap) -> PhasePoint4 {
    let RotorMap { k1, k2, tau, coupling } = *params;
    let (s1, c1) = x.q1.sin_cos();
    let (s2, c2) = x.q2.sin_cos();
    let p1 = wrap(x.p1 + tau * (k1 * s1 - coupling * c1 * s2));
    let p2 = wrap(x.p2 + tau * (k2 * s2 - coupling * s1 * c2));
    PhasePoint4::new(x.q1 + tau * p1, p1, x.q2 + tau * p2, p2)
}

/// Classical coupled Harper Hamiltonian
/// `γ1(cos p1 + cos p2) + γ2(cos q1 + cos q2) + c sin q1 sin q2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarperFlow {
    pub gamma1: f64,
    pub gamma2: f64,
    pub coupling: f64,
}

impl From<&CoupledHarperParams> for HarperFlow {
    fn from(p: &CoupledHarperParams) -> Self {
        Self {
            gamma1: p.torus.gamma1,
            gamma2: p.torus.gamma2,
            coupling: p.coupling,
        }
    }
}

// Sixth-order symmetric composition of second-order steps.
const COMPOSITION: [f64; 7] = {
    const W1: f64 = -1.177_679_984_178_87;
    const W2: f64 = 0.235_573_213_359_357;
    const W3: f64 = 0.784_513_610_477_560;
    const W0: f64 = 1.0 - 2.0 * (W1 + W2 + W3);
    [W3, W2, W1, W0, W1, W2, W3]
};

impl HarperFlow {
    pub fn energy(&self, x: &PhasePoint4) -> f64 {
        self.gamma1 * (x.p1.cos() + x.p2.cos())
            + self.gamma2 * (x.q1.cos() + x.q2.cos())
            + self.coupling * x.q1.sin() * x.q2.sin()
    }

    /// Energy of the first oscillator alone, `γ1 cos p1 + γ2 cos q1`.
    pub fn first_energy(&self, x: &PhasePoint4) -> f64 {
        self.gamma1 * x.p1.cos() + self.gamma2 * x.q1.cos()
    }

    pub fn second_energy(&self, x: &PhasePoint4) -> f64 {
        self.gamma1 * x.p2.cos() + self.gamma2 * x.q2.cos()
    }

    fn half_kick(&self, c: &mut [f64; 4], h: f64) {
        let (s1, c1) = c[0].sin_cos();
        let (s2, c2) = c[2].sin_cos();
        c[1] += h * (self.gamma2 * s1 - self.coupling * c1 * s2);
        c[3] += h * (self.gamma2 * s2 - self.coupling * s1 * c2);
    }

    fn drift(&self, c: &mut [f64; 4], h: f64) {
        c[0] -= h * self.gamma1 * c[1].sin();
        c[2] -= h * self.gamma1 * c[3].sin();
    }

    /// One step of size `dt`; negative `dt` integrates backwards.
    pub fn step(&self, x: PhasePoint4, dt: f64) -> PhasePoint4 {
        let mut c = x.coords();
        for w in COMPOSITION {
            let h = w * dt;
            self.half_kick(&mut c, 0.5 * h);
            self.drift(&mut c, h);
            self.half_kick(&mut c, 0.5 * h);
        }
        PhasePoint4::from_coords(&c)
    }
}

/// Integrates the coupled Harper flow, failing if the energy wanders more
/// than `1e-6·max(|H0|, γ1+γ2)·steps·dt²` from its initial value.
pub fn coupled_harper_flow(x0: PhasePoint4, flow: &HarperFlow, dt: f64, steps: usize) -> Result<Trajectory<PhasePoint4>> {
    if !(dt.is_finite() && dt != 0.0) {
        return Err(Error::Validation(format!("flow step must be non-zero and finite, got {dt}")));
    }
    let h0 = flow.energy(&x0);
    let scale = h0.abs().max(flow.gamma1.abs() + flow.gamma2.abs());
    let bound = ENERGY_DRIFT_COEFF * scale * steps as f64 * dt * dt;
    let mut points = Vec::with_capacity(steps + 1);
    points.push(x0);
    let mut x = x0;
    for k in 1..=steps {
        x = flow.step(x, dt);
        let drift = (flow.energy(&x) - h0).abs();
        if drift > bound {
            return Err(Error::Integrator(format!(
                "energy drift {drift:.3e} exceeds {bound:.3e} at step {k}; reduce dt (now {dt})"
            )));
        }
        points.push(x);
    }
    Ok(Trajectory { dt: dt.abs(), points })
}

fn crossing(a: PhasePoint4, b: PhasePoint4, k: usize, dt: f64, q2_star: f64) -> Option<SectionPoint> {
    let step = wrap_signed(b.q2 - a.q2);
    let before = wrap_signed(a.q2 - q2_star);
    if !(step > 0.0 && before < 0.0 && before + step >= 0.0) {
        return None;
    }
    let f = -before / step;
    Some(SectionPoint {
        q1: wrap(a.q1 + f * wrap_signed(b.q1 - a.q1)),
        p1: wrap(a.p1 + f * wrap_signed(b.p1 - a.p1)),
        crossing_time: (k as f64 + f) * dt,
    })
}

/// Crossings of `q2 = q2*` with `q2` increasing; `(q1, p1)` and the time are
/// linearly interpolated between samples.
pub fn poincare_section(traj: &Trajectory<PhasePoint4>, q2_star: f64) -> Vec<SectionPoint> {
    traj.points
        .windows(2)
        .enumerate()
        .filter_map(|(k, w)| crossing(w[0], w[1], k, traj.dt, q2_star))
        .collect()
}

/// Section crossings of one orbit without storing it. Stops after
/// `max_crossings` crossings or `max_steps` steps, with the same energy check
/// as [`coupled_harper_flow`].
pub fn section_crossings(
    x0: PhasePoint4,
    flow: &HarperFlow,
    dt: f64,
    max_steps: usize,
    q2_star: f64,
    max_crossings: usize,
) -> Result<Vec<SectionPoint>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Validation(format!("flow step must be positive and finite, got {dt}")));
    }
    let h0 = flow.energy(&x0);
    let scale = h0.abs().max(flow.gamma1.abs() + flow.gamma2.abs());
    let bound = ENERGY_DRIFT_COEFF * scale * max_steps as f64 * dt * dt;
    let mut out = Vec::new();
    let mut x = x0;
    for k in 0..max_steps {
        if out.len() >= max_crossings {
            break;
        }
        let next = flow.step(x, dt);
        if let Some(s) = crossing(x, next, k, dt, q2_star) {
            out.push(s);
        }
        x = next;
    }
    let drift = (flow.energy(&x) - h0).abs();
    if drift > bound {
        return Err(Error::Integrator(format!(
            "energy drift {drift:.3e} exceeds {bound:.3e}; reduce dt (now {dt})"
        )));
    }
    Ok(out)
}

/// A deterministic phase-space dynamics usable by [`lyapunov_largest`].
pub trait ClassicalSystem {
    type Point: PhasePoint;
    fn advance(&self, x: Self::Point) -> Self::Point;
    /// Time represented by one call to `advance`.
    fn time_step(&self) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardMap {
    pub k: f64,
    pub tau: f64,
}

impl ClassicalSystem for StandardMap {
    type Point = PhasePoint2;
    fn advance(&self, x: PhasePoint2) -> PhasePoint2 {
        standard_map_step(x, self.k, self.tau)
    }
    fn time_step(&self) -> f64 {
        1.0
    }
}

impl ClassicalSystem for RotorMap {
    type Point = PhasePoint4;
    fn advance(&self, x: PhasePoint4) -> PhasePoint4 {
        coupled_rotor_map_step(x, self)
    }
    fn time_step(&self) -> f64 {
        1.0
    }
}

/// The Harper flow sampled at a fixed step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledHarperFlow {
    pub flow: HarperFlow,
    pub dt: f64,
}

impl ClassicalSystem for SampledHarperFlow {
    type Point = PhasePoint4;
    fn advance(&self, x: PhasePoint4) -> PhasePoint4 {
        self.flow.step(x, self.dt)
    }
    fn time_step(&self) -> f64 {
        self.dt
    }
}

/// Benettin estimate of the largest Lyapunov exponent: a twin orbit at
/// distance `LYAPUNOV_D0` is renormalized back after every step. Returns
/// the rate per unit time (per iteration for maps).
pub fn lyapunov_largest<S: ClassicalSystem>(system: &S, x0: S::Point, steps: usize) -> Result<f64> {
    if steps < MIN_LYAPUNOV_STEPS {
        return Err(Error::Validation(format!(
            "Lyapunov estimate needs at least {MIN_LYAPUNOV_STEPS} steps, got {steps}"
        )));
    }
    let dim = S::Point::DIM;
    let dir = 1.0 / (dim as f64).sqrt();
    let offset = |x: &S::Point, d: &[f64; 4]| {
        let c = x.coords();
        let shifted: Vec<f64> = (0..dim).map(|i| c[i] + d[i]).collect();
        S::Point::from_coords(&shifted)
    };
    let mut x = x0;
    let mut y = offset(&x0, &[LYAPUNOV_D0 * dir; 4]);
    let mut log_sum = 0.0;
    for _ in 0..steps {
        x = system.advance(x);
        y = system.advance(y);
        let (cx, cy) = (x.coords(), y.coords());
        let mut d = [0.0; 4];
        for i in 0..dim {
            d[i] = wrap_signed(cy[i] - cx[i]);
        }
        let r = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            // orbits merged to rounding; restart the offset
            y = offset(&x, &[LYAPUNOV_D0 * dir; 4]);
            continue;
        }
        log_sum += (r / LYAPUNOV_D0).ln();
        for v in d.iter_mut() {
            *v *= LYAPUNOV_D0 / r;
        }
        y = offset(&x, &d);
    }
    Ok(log_sum / (steps as f64 * system.time_step()))
}

/// Iterates `system` for `steps` steps from `x0`.
pub fn orbit<S: ClassicalSystem>(system: &S, x0: S::Point, steps: usize) -> Trajectory<S::Point> {
    let mut points = Vec::with_capacity(steps + 1);
    let mut x = x0;
    points.push(x);
    for _ in 0..steps {
        x = system.advance(x);
        points.push(x);
    }
    Trajectory {
        dt: system.time_step(),
        points,
    }
}

/// Autocorrelation of `observable` sampled along the orbit.
pub fn classical_autocorrelation<P>(
    traj: &Trajectory<P>,
    observable: impl Fn(&P) -> f64,
    max_lag: usize,
) -> Result<AutocorrResult> {
    let values: Vec<f64> = traj.points.iter().map(observable).collect();
    autocorrelation_of(&values, max_lag)
}

/// Largest to smallest singular-value ratio of the local point cloud around
/// each section point, using its `window` nearest neighbours. Small values
/// mean the points lie on curves.
pub fn section_thickness(points: &[SectionPoint], window: usize) -> Vec<f64> {
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|s| (wrap_signed(s.q1), wrap_signed(s.p1)))
        .collect();
    coords
        .iter()
        .map(|&(q, p)| {
            let mut near: Vec<(f64, (f64, f64))> = coords
                .iter()
                .map(|&(q2, p2)| {
                    let (dq, dp) = (wrap_signed(q2 - q), wrap_signed(p2 - p));
                    (dq * dq + dp * dp, (dq, dp))
                })
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            let take = &near[..window.min(near.len())];
            let n = take.len() as f64;
            let (mq, mp) = take
                .iter()
                .fold((0.0, 0.0), |acc, (_, (dq, dp))| (acc.0 + dq / n, acc.1 + dp / n));
            let (mut sqq, mut spp, mut sqp) = (0.0, 0.0, 0.0);
            for (_, (dq, dp)) in take {
                let (a, b) = (dq - mq, dp - mp);
                sqq += a * a;
                spp += b * b;
                sqp += a * b;
            }
            // eigenvalues of the 2x2 scatter matrix are squared singular values
            let tr = sqq + spp;
            let disc = ((sqq - spp).powi(2) + 4.0 * sqp * sqp).sqrt();
            let (l1, l2) = (0.5 * (tr + disc), (0.5 * (tr - disc)).max(0.0));
            if l1 > 0.0 {
                (l2 / l1).sqrt()
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn jacobian_det<P: PhasePoint>(f: impl Fn(P) -> P, x: P) -> f64 {
        let n = P::DIM;
        let h = 1e-6;
        let base = x.coords();
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut plus = base;
            let mut minus = base;
            plus[j] += h;
            minus[j] -= h;
            let (fp, fm) = (f(P::from_coords(&plus)).coords(), f(P::from_coords(&minus)).coords());
            for i in 0..n {
                jac[i][j] = wrap_signed(fp[i] - fm[i]) / (2.0 * h);
            }
        }
        // Gaussian elimination with partial pivoting
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n).max_by(|&a, &b| jac[a][c].abs().total_cmp(&jac[b][c].abs())).unwrap();
            if piv != c {
                jac.swap(piv, c);
                det = -det;
            }
            det *= jac[c][c];
            for r in c + 1..n {
                let f = jac[r][c] / jac[c][c];
                for k in c..n {
                    jac[r][k] -= f * jac[c][k];
                }
            }
        }
        det
    }

    fn random_point4(rng: &mut ChaCha8Rng) -> PhasePoint4 {
        PhasePoint4::new(
            rng.random::<f64>() * TAU,
            rng.random::<f64>() * TAU,
            rng.random::<f64>() * TAU,
            rng.random::<f64>() * TAU,
        )
    }

    fn circular_distance(a: &PhasePoint4, b: &PhasePoint4) -> f64 {
        let (ca, cb) = (a.coords(), b.coords());
        (0..4).map(|i| wrap_signed(ca[i] - cb[i]).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn free_rotor() {
        let x = PhasePoint2::new(0.3, 0.7);
        let y = standard_map_step(x, 0.0, 1.0);
        assert_eq!(y.p, 0.7);
        assert!((y.q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maps_preserve_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rotors = RotorMap {
            k1: 1.5,
            k2: 0.7,
            tau: 1.0,
            coupling: 2.0,
        };
        for _ in 0..100 {
            // keep away from the wrap seam so differences stay local
            let x = PhasePoint2::new(1.0 + 4.0 * rng.random::<f64>(), 1.0 + 4.0 * rng.random::<f64>());
            let det = jacobian_det(|y| standard_map_step(y, 3.0, 1.0), x);
            assert!((det - 1.0).abs() < 1e-6, "{det}");
            let x4 = random_point4(&mut rng);
            let det = jacobian_det(|y| coupled_rotor_map_step(y, &rotors), x4);
            assert!((det - 1.0).abs() < 1e-6, "{det}");
            let flow = HarperFlow {
                gamma1: 2.0,
                gamma2: 2.0,
                coupling: 10.0,
            };
            let det = jacobian_det(|y| flow.step(y, 0.05), x4);
            assert!((det - 1.0).abs() < 1e-6, "{det}");
        }
    }

    #[test]
    fn strongly_kicked_twins_separate() {
        let a = PhasePoint2::new(1.0, 2.0);
        let mut x = a;
        let mut y = PhasePoint2::new(1.0 + 1e-8, 2.0);
        let mut reached = None;
        for k in 1..=40 {
            x = standard_map_step(x, 10.0, 1.0);
            y = standard_map_step(y, 10.0, 1.0);
            let d = wrap_signed(x.q - y.q).hypot(wrap_signed(x.p - y.p));
            if d > 0.1 {
                reached = Some(k);
                break;
            }
        }
        assert!(reached.is_some());
    }

    #[test]
    fn uncoupled_rotors_are_two_standard_maps() {
        let params = RotorMap {
            k1: 1.2,
            k2: 3.4,
            tau: 1.0,
            coupling: 0.0,
        };
        let mut x = PhasePoint4::new(0.1, 0.2, 0.3, 0.4);
        let mut a = PhasePoint2::new(0.1, 0.2);
        let mut b = PhasePoint2::new(0.3, 0.4);
        for _ in 0..100 {
            x = coupled_rotor_map_step(x, &params);
            a = standard_map_step(a, 1.2, 1.0);
            b = standard_map_step(b, 3.4, 1.0);
        }
        assert_eq!((x.q1, x.p1, x.q2, x.p2), (a.q, a.p, b.q, b.p));
    }

    #[test]
    fn free_rotors_keep_momenta() {
        let params = RotorMap {
            k1: 0.0,
            k2: 0.0,
            tau: 1.0,
            coupling: 0.0,
        };
        let x0 = PhasePoint4::new(0.1, 0.2, 0.3, 0.4);
        let x = (0..50).fold(x0, |x, _| coupled_rotor_map_step(x, &params));
        assert_eq!((x.p1, x.p2), (0.2, 0.4));
    }

    #[test]
    fn uncoupled_harper_conserves_each_energy() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 0.0,
        };
        let x0 = PhasePoint4::new(0.5, 1.0, 2.0, 0.3);
        let traj = coupled_harper_flow(x0, &flow, 1e-3, 10_000).unwrap();
        let (e1, e2) = (flow.first_energy(&x0), flow.second_energy(&x0));
        for x in &traj.points {
            assert!((flow.first_energy(x) - e1).abs() < 1e-8);
            assert!((flow.second_energy(x) - e2).abs() < 1e-8);
        }
    }

    #[test]
    fn harper_reverses_in_time() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 10.0,
        };
        let x0 = PhasePoint4::new(0.5, 0.5, 0.5, 0.5);
        let fwd = coupled_harper_flow(x0, &flow, 1e-2, 500).unwrap();
        let end = *fwd.points.last().unwrap();
        let back = coupled_harper_flow(end, &flow, -1e-2, 500).unwrap();
        assert!(circular_distance(back.points.last().unwrap(), &x0) < 1e-9);
    }

    #[test]
    fn small_coupling_matches_product_of_components() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 1e-12,
        };
        let free = HarperFlow { coupling: 0.0, ..flow };
        let x0 = PhasePoint4::new(0.4, 1.1, 2.5, 0.2);
        let a = coupled_harper_flow(x0, &flow, 1e-2, 1000).unwrap();
        let b = coupled_harper_flow(x0, &free, 1e-2, 1000).unwrap();
        assert!(circular_distance(a.points.last().unwrap(), b.points.last().unwrap()) < 1e-9);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 10.0,
        };
        let x0 = PhasePoint4::new(0.5, 0.5, 0.5, 0.5);
        assert!(matches!(
            coupled_harper_flow(x0, &flow, 0.5, 200),
            Err(Error::Integrator(_))
        ));
        assert!(coupled_harper_flow(x0, &flow, 0.0, 10).is_err());
    }

    #[test]
    fn section_of_oscillation() {
        let dt = 0.01;
        let points = (0..(4.0 * TAU / dt) as usize)
            .map(|k| {
                let t = k as f64 * dt;
                PhasePoint4 {
                    q1: 1.0,
                    p1: wrap(t),
                    q2: t.sin(),
                    p2: 0.0,
                }
            })
            .collect();
        let traj = Trajectory { dt, points };
        let sec = poincare_section(&traj, 0.0);
        // upward zeros at t = 2π, 4π, 6π (t = 0 sits on the plane)
        assert_eq!(sec.len(), 3);
        for (i, s) in sec.iter().enumerate() {
            assert!((s.crossing_time - TAU * (i + 1) as f64).abs() < 1e-4);
        }
        let flat = Trajectory {
            dt,
            points: vec![PhasePoint4::new(0.0, 0.0, 1.0, 0.0); 10],
        };
        assert!(poincare_section(&flat, 0.0).is_empty());
    }

    #[test]
    fn section_handles_wrap() {
        let points = vec![PhasePoint4::new(0.0, 0.0, TAU - 0.1, 0.0), PhasePoint4::new(0.2, 0.0, 0.1, 0.0)];
        let sec = poincare_section(&Trajectory { dt: 1.0, points }, 0.0);
        assert_eq!(sec.len(), 1);
        assert!((sec[0].q1 - 0.1).abs() < 1e-12);
        assert!((sec[0].crossing_time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weakly_coupled_sections_are_curves() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 0.1,
        };
        // distinct oscillator amplitudes keep clear of the 1:1 resonance
        let traj = coupled_harper_flow(PhasePoint4::new(0.5, 0.5, 1.0, 0.2), &flow, 2e-2, 1_000_000).unwrap();
        let sec = poincare_section(&traj, 0.0);
        assert!(sec.len() > 5000, "{} crossings", sec.len());
        let thick = section_thickness(&sec, 50);
        let worst = thick.iter().cloned().fold(0.0, f64::max);
        assert!(worst < 0.05, "{worst}");
    }

    #[test]
    fn lyapunov_of_standard_map() {
        let lam = lyapunov_largest(&StandardMap { k: 0.0, tau: 1.0 }, PhasePoint2::new(0.3, 0.4), 20_000).unwrap();
        assert!(lam <= 0.01, "{lam}");
        let lam = lyapunov_largest(&StandardMap { k: 10.0, tau: 1.0 }, PhasePoint2::new(0.3, 0.4), 100_000).unwrap();
        assert!((lam - 5f64.ln()).abs() < 0.2 * 5f64.ln(), "{lam}");
        assert!(lyapunov_largest(&StandardMap { k: 1.0, tau: 1.0 }, PhasePoint2::new(0.3, 0.4), 10).is_err());
    }

    #[test]
    fn harper_lyapunov_separates_couplings() {
        let x0 = PhasePoint4::new(0.5, 0.5, 1.0, 0.2);
        let strong = SampledHarperFlow {
            flow: HarperFlow {
                gamma1: 2.0,
                gamma2: 2.0,
                coupling: 10.0,
            },
            dt: 1e-2,
        };
        let weak = SampledHarperFlow {
            flow: HarperFlow { coupling: 0.1, ..strong.flow },
            dt: 1e-2,
        };
        let l_strong = lyapunov_largest(&strong, x0, 100_000).unwrap();
        let l_weak = lyapunov_largest(&weak, x0, 300_000).unwrap();
        assert!(l_strong > 0.05, "{l_strong}");
        assert!(l_weak < 0.02, "{l_weak}");
    }

    #[test]
    fn classical_autocorrelations() {
        let rot = orbit(&StandardMap { k: 0.0, tau: 1.0 }, PhasePoint2::new(0.0, 0.37), 20_000);
        let ac = classical_autocorrelation(&rot, |x| x.q.cos(), 200).unwrap();
        let recurrences = ac.values[1..].iter().filter(|v| v.abs() > 0.5).count();
        assert!(recurrences > 50);

        let chaos = orbit(&StandardMap { k: 10.0, tau: 1.0 }, PhasePoint2::new(0.3, 0.4), 100_000);
        let ac = classical_autocorrelation(&chaos, |x| x.q.cos(), 200).unwrap();
        assert!(ac.values[20..].iter().all(|v| *v < 0.1));

        let frozen = orbit(&StandardMap { k: 0.0, tau: 1.0 }, PhasePoint2::new(0.5, 0.0), 100);
        assert!(matches!(
            classical_autocorrelation(&frozen, |x| x.q.cos(), 10),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn streamed_section_matches_stored_orbit() {
        let flow = HarperFlow {
            gamma1: 2.0,
            gamma2: 2.0,
            coupling: 10.0,
        };
        let x0 = PhasePoint4::new(0.3, 1.1, 2.0, 0.4);
        let traj = coupled_harper_flow(x0, &flow, 1e-2, 20_000).unwrap();
        let stored = poincare_section(&traj, 0.0);
        assert!(stored.len() > 10);
        let streamed = section_crossings(x0, &flow, 1e-2, 20_000, 0.0, usize::MAX).unwrap();
        assert_eq!(stored, streamed);
        let capped = section_crossings(x0, &flow, 1e-2, 20_000, 0.0, 5).unwrap();
        assert_eq!(&stored[..5], &capped[..]);
    }
}
