//! Cross-resonance Hamiltonian tomography.
//!
//! With the control held in `|0⟩` or `|1⟩` the target precesses about a
//! fixed axis `n±`, whose components are `b ± a` of the effective
//! interaction. Target Bloch trajectories over a grid of pulse lengths are
//! fitted for `n±`, and the six rates follow as half-sums and
//! half-differences.

use nalgebra::{Matrix3, Vector3};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::{cr_effective_time, CRCoefficients, DeviceConfig};
use crate::dynamics::{propagate, SimOptions};
use crate::error::{Error, Result};
use crate::pulse::{cr, PulseSchedule};
use crate::qcore::{expectation, parity_expectation, rotate_for_measurement, sample_counts, ObservableSum, PauliTerm, StateVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TomographySettings {
    /// Shots per measured observable; `None` reads exact expectations.
    pub shots: Option<u64>,
    pub seed: u64,
    /// RMS residual above which the fit is rejected. `None` picks 1e-6
    /// noiseless and `5/√shots` with sampling.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyReport {
    /// Fitted rates at the probed amplitude, rad/s.
    pub coefficients: CRCoefficients,
    /// Precession vector with the control in `|0⟩` and `|1⟩`, rad/s.
    pub generators: [[f64; 3]; 2],
    /// RMS difference between fitted and observed Bloch components.
    pub residual: f64,
    pub durations: Vec<usize>,
}

/// Pulse lengths used by default: 12 points from 256 dt in steps of 64.
pub fn default_durations() -> Vec<usize> {
    (0..12).map(|k| 256 + 64 * k).collect()
}

/// Bloch vector `r0` rotated by `exp(-iτ n·σ)`.
fn precess(n: [f64; 3], tau: f64, r0: [f64; 3]) -> [f64; 3] {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if norm == 0.0 {
        return r0;
    }
    let k = n.map(|v| v / norm);
    let phi = 2.0 * norm * tau;
    let (c, s) = (phi.cos(), phi.sin());
    let dot = k[0] * r0[0] + k[1] * r0[1] + k[2] * r0[2];
    let cross = [k[1] * r0[2] - k[2] * r0[1], k[2] * r0[0] - k[0] * r0[2], k[0] * r0[1] - k[1] * r0[0]];
    [0, 1, 2].map(|i| r0[i] * c + cross[i] * s + k[i] * dot * (1.0 - c))
}

const PREPS: [[f64; 3]; 2] = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];

/// Observed target Bloch vectors, indexed `[duration][prep]`.
type Trajectory = Vec<[[f64; 3]; 2]>;

fn target_state(control_one: bool, prep: usize) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = if prep == 0 { [C64::new(1.0, 0.0), C64::new(0.0, 0.0)] } else { [C64::new(s, 0.0), C64::new(s, 0.0)] };
    let z = C64::new(0.0, 0.0);
    let amps = if control_one { vec![z, z, t[0], t[1]] } else { vec![t[0], t[1], z, z] };
    StateVector::new(amps).expect("four amplitudes")
}

fn measure(state: &StateVector, settings: &TomographySettings, seed: &mut ChaCha8Rng) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (i, l) in ["IX", "IY", "IZ"].iter().enumerate() {
        out[i] = match settings.shots {
            None => expectation(state, &ObservableSum::new(2, [PauliTerm::new(1.0, *l)?])?)?,
            Some(shots) => {
                let rotated = rotate_for_measurement(state, l)?;
                parity_expectation(&sample_counts(&rotated, shots, seed.next_u64()), &[1])
            }
        };
    }
    Ok(out)
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let m = Matrix3::from_fn(|i, j| a[i][j]);
    let x = m.lu().solve(&Vector3::from(b))?;
    Some([x[0], x[1], x[2]])
}

/// Residual vector of a precession model `q` (in units of `1/tau_ref`).
fn residuals(q: [f64; 3], taus: &[f64], data: &Trajectory) -> Vec<f64> {
    let mut r = Vec::with_capacity(taus.len() * 6);
    for (tau, obs) in taus.iter().zip(data) {
        for (prep, r0) in PREPS.iter().enumerate() {
            let m = precess(q, *tau, *r0);
            r.extend((0..3).map(|i| m[i] - obs[prep][i]));
        }
    }
    r
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Levenberg-Marquardt on the three precession components.
fn fit_precession(start: [f64; 3], taus: &[f64], data: &Trajectory) -> ([f64; 3], f64) {
    let mut q = start;
    let mut r = residuals(q, taus, data);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let h = 1e-7;
        let jac: Vec<Vec<f64>> = (0..3)
            .map(|k| {
                let (mut up, mut dn) = (q, q);
                up[k] += h;
                dn[k] -= h;
                let (ru, rd) = (residuals(up, taus, data), residuals(dn, taus, data));
                ru.iter().zip(&rd).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            })
            .collect();
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                jtj[i][j] = jac[i].iter().zip(&jac[j]).map(|(a, b)| a * b).sum();
            }
            jtr[i] = jac[i].iter().zip(&r).map(|(a, b)| a * b).sum();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj;
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let Some(step) = solve3(a, jtr.map(|v| -v)) else { break };
            let trial = [q[0] + step[0], q[1] + step[1], q[2] + step[2]];
            let rt = residuals(trial, taus, data);
            let ct = cost(&rt);
            if ct < c {
                let gain = c - ct;
                q = trial;
                r = rt;
                c = ct;
                lambda = (lambda / 3.0).max(1e-15);
                improved = gain > 1e-30 && gain > 1e-16 * c;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (q, c)
}

/// Starting guesses: the axis-angle of the rotation seen at each duration.
fn initial_guesses(taus: &[f64], data: &Trajectory) -> Vec<[f64; 3]> {
    let mut out = vec![[0.0; 3]];
    for (tau, obs) in taus.iter().zip(data) {
        let (rz, rx) = (obs[0], obs[1]);
        let ry = [rz[1] * rx[2] - rz[2] * rx[1], rz[2] * rx[0] - rz[0] * rx[2], rz[0] * rx[1] - rz[1] * rx[0]];
        // columns of the rotation are the images of x, y, z
        let m = |i: usize, j: usize| [rx, ry, rz][j][i];
        let cos_phi = ((m(0, 0) + m(1, 1) + m(2, 2) - 1.0) / 2.0).clamp(-1.0, 1.0);
        let phi = cos_phi.acos();
        let axis = [m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)];
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if len > 1e-6 && phi > 1e-3 {
            out.push(axis.map(|a| a / len * phi / (2.0 * tau)));
        }
    }
    out
}

/// Fits the effective CR rates of edge `(0, 1)` of `cfg` at amplitude
/// `amp` from simulated target trajectories.
pub fn cr_tomography(
    cfg: &DeviceConfig,
    amp: f64,
    durations: &[usize],
    opts: &SimOptions,
    settings: &TomographySettings,
) -> Result<TomographyReport> {
    let mut distinct = durations.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 6 {
        return Err(Error::Validation(format!(
            "tomography needs at least 6 distinct durations, got {}",
            distinct.len()
        )));
    }
    if settings.shots == Some(0) {
        return Err(Error::Validation("shots must be positive".into()));
    }
    let taus_s: Vec<f64> = durations.iter().map(|&d| cr_effective_time(cfg, d)).collect();
    let tau_ref = taus_s.iter().cloned().fold(0.0, f64::max);
    let taus: Vec<f64> = taus_s.iter().map(|t| t / tau_ref).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);

    let mut generators = [[0.0; 3]; 2];
    let mut total_cost = 0.0;
    let mut n_obs = 0usize;
    for (c, generator) in generators.iter_mut().enumerate() {
        let mut data: Trajectory = Vec::with_capacity(durations.len());
        for &d in durations {
            let block = cr(0, 1, amp, 0.0, d, cfg)?;
            let mut s = PulseSchedule::new(2);
            s.append(&block)?;
            let mut obs = [[0.0; 3]; 2];
            for (prep, o) in obs.iter_mut().enumerate() {
                let out = propagate(&s, cfg, opts, &target_state(c == 1, prep))?;
                *o = measure(&out.final_state, settings, &mut rng)?;
            }
            data.push(obs);
        }
        let (q, cst) = initial_guesses(&taus, &data)
            .into_iter()
            .map(|g| fit_precession(g, &taus, &data))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least the zero guess");
        *generator = q.map(|v| v / tau_ref);
        total_cost += cst;
        n_obs += durations.len() * 6;
    }
    let residual = (total_cost / n_obs as f64).sqrt();
    let tolerance = settings
        .tolerance
        .unwrap_or_else(|| settings.shots.map_or(1e-6, |s| 5.0 / (s as f64).sqrt()));
    if residual > tolerance {
        return Err(Error::Tomography { residual, tolerance });
    }
    let [p, m] = generators;
    let coefficients = CRCoefficients {
        a_x: 0.5 * (p[0] - m[0]),
        a_y: 0.5 * (p[1] - m[1]),
        a_z: 0.5 * (p[2] - m[2]),
        b_x: 0.5 * (p[0] + m[0]),
        b_y: 0.5 * (p[1] + m[1]),
        b_z: 0.5 * (p[2] + m[2]),
    };
    Ok(TomographyReport {
        coefficients,
        generators,
        residual,
        durations: durations.to_vec(),
    })
}
