//! Expectation values of Pauli observables on simulated pulse schedules.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::DeviceConfig;
use crate::dynamics::{propagate, SimOptions};
use crate::error::{Error, Result};
use crate::pulse::{lower_gate, Gate, PulseSchedule};
use crate::qcore::{
    bitstring, expectation, parity_expectation, rotate_for_measurement, sample_counts, ObservableSum, PauliTerm,
    StateVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    #[default]
    Exact,
    Shots,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One measurement setting per non-identity term.
    #[default]
    PerTerm,
    /// Terms that agree letter-by-letter wherever both act share a setting.
    Qubitwise,
}

/// How measurement-basis rotations are applied before sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementBasis {
    /// Exact matrix rotations.
    #[default]
    Ideal,
    /// Rotations lowered to pulses and simulated with the ansatz.
    Lowered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorConfig {
    pub mode: EstimatorMode,
    pub shots: u64,
    pub seed: u64,
    pub grouping: Grouping,
    pub basis: MeasurementBasis,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            mode: EstimatorMode::Exact,
            shots: 1024,
            seed: 0,
            grouping: Grouping::PerTerm,
            basis: MeasurementBasis::Ideal,
        }
    }
}

impl EstimatorConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn shots(shots: u64, seed: u64) -> Self {
        EstimatorConfig {
            mode: EstimatorMode::Shots,
            shots,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == EstimatorMode::Shots && self.shots == 0 {
            return Err(Error::Validation("shots must be positive in shots mode".into()));
        }
        Ok(())
    }
}

/// Seed of the `i`-th independent stream derived from `seed`.
pub fn derived_seed(seed: u64, i: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng.next_u64()
}

/// Extends `obs` with identities on qubits `obs.n_qubits()..n`.
fn pad(obs: &ObservableSum, n: usize) -> Result<ObservableSum> {
    if obs.n_qubits() > n {
        return Err(Error::Validation(format!(
            "{}-qubit observable on a {n}-qubit schedule",
            obs.n_qubits()
        )));
    }
    if obs.n_qubits() == n {
        return Ok(obs.clone());
    }
    let extra = "I".repeat(n - obs.n_qubits());
    let terms = obs
        .terms()
        .iter()
        .map(|t| PauliTerm::new(t.coefficient, format!("{}{extra}", t.letters)))
        .collect::<Result<Vec<_>>>()?;
    ObservableSum::new(n, terms)
}

struct Group {
    /// Measurement letter per qubit (`Z` where no term acts).
    setting: Vec<u8>,
    terms: Vec<usize>,
}

fn group_terms(obs: &ObservableSum, grouping: Grouping) -> Vec<Group> {
    let n = obs.n_qubits();
    let mut groups: Vec<Group> = Vec::new();
    for (i, t) in obs.terms().iter().enumerate() {
        if t.is_identity() {
            continue;
        }
        let letters = t.letters.as_bytes();
        let fits = |g: &Group| {
            letters
                .iter()
                .zip(&g.setting)
                .all(|(&l, &s)| l == b'I' || s == b'*' || s == l)
        };
        let slot = match grouping {
            Grouping::PerTerm => None,
            Grouping::Qubitwise => groups.iter().position(fits),
        };
        let g = match slot {
            Some(k) => &mut groups[k],
            None => {
                groups.push(Group {
                    setting: vec![b'*'; n],
                    terms: Vec::new(),
                });
                groups.last_mut().expect("just pushed")
            }
        };
        for (s, &l) in g.setting.iter_mut().zip(letters) {
            if l != b'I' {
                *s = l;
            }
        }
        g.terms.push(i);
    }
    for g in &mut groups {
        g.setting.iter_mut().filter(|s| **s == b'*').for_each(|s| *s = b'Z');
    }
    groups
}

/// Pulses that rotate each measured axis onto `Z`.
fn lowered_rotation(setting: &[u8], cfg: &DeviceConfig) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(cfg.n_qubits);
    for (q, &l) in setting.iter().enumerate() {
        let gate = match l {
            b'X' => Gate::RY(-std::f64::consts::FRAC_PI_2),
            b'Y' => Gate::RX(std::f64::consts::FRAC_PI_2),
            _ => continue,
        };
        s.append(&lower_gate(gate, &[q], cfg)?)?;
    }
    Ok(s)
}

/// Register state after a bound schedule, from `|0…0⟩`.
pub fn final_state(schedule: &PulseSchedule, cfg: &DeviceConfig, sim: &SimOptions) -> Result<StateVector> {
    Ok(propagate(schedule, cfg, sim, &StateVector::zero(schedule.n_qubits()))?.final_state)
}

/// `⟨H⟩` after a bound schedule, exactly or from sampled measurements.
pub fn estimate(
    schedule: &PulseSchedule,
    cfg: &DeviceConfig,
    sim: &SimOptions,
    obs: &ObservableSum,
    est: &EstimatorConfig,
) -> Result<f64> {
    est.validate()?;
    let obs = pad(obs, schedule.n_qubits())?;
    if est.mode == EstimatorMode::Exact {
        return expectation(&final_state(schedule, cfg, sim)?, &obs);
    }
    let groups = group_terms(&obs, est.grouping);
    let base = match est.basis {
        MeasurementBasis::Ideal if !groups.is_empty() => Some(final_state(schedule, cfg, sim)?),
        _ => None,
    };
    let parts = groups
        .par_iter()
        .enumerate()
        .map(|(gi, g)| {
            let rotated = match &base {
                Some(state) => rotate_for_measurement(state, std::str::from_utf8(&g.setting).expect("ascii"))?,
                None => {
                    let mut s = schedule.clone();
                    s.append(&lowered_rotation(&g.setting, cfg)?)?;
                    final_state(&s, cfg, sim)?
                }
            };
            let counts = sample_counts(&rotated, est.shots, derived_seed(est.seed, gi as u64));
            Ok(g.terms
                .iter()
                .map(|&ti| {
                    let t = &obs.terms()[ti];
                    let support: Vec<usize> = t.letters.bytes().enumerate().filter(|(_, l)| *l != b'I').map(|(q, _)| q).collect();
                    t.coefficient * parity_expectation(&counts, &support)
                })
                .sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(obs.identity_coefficient() + parts.iter().sum::<f64>())
}

/// Most likely computational-basis outcome of `state`: the largest
/// probability in exact mode, the most frequent sample otherwise. Ties go
/// to the lowest index.
pub fn best_bitstring(state: &StateVector, est: &EstimatorConfig) -> Result<String> {
    est.validate()?;
    let n = state.dim().trailing_zeros() as usize;
    Ok(match est.mode {
        EstimatorMode::Exact => {
            let p = state.probabilities();
            let mut best = 0;
            for (i, &v) in p.iter().enumerate() {
                if v > p[best] + 1e-12 {
                    best = i;
                }
            }
            bitstring(best, n)
        }
        EstimatorMode::Shots => {
            let counts = sample_counts(state, est.shots, derived_seed(est.seed, u64::MAX));
            let top = counts.values().copied().max().unwrap_or(0);
            counts
                .into_iter()
                .find(|(_, c)| *c == top)
                .map(|(b, _)| b)
                .unwrap_or_else(|| bitstring(0, n))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{lower_circuit, snp, GateOp};

    fn h2() -> ObservableSum {
        crate::problems::parse_pauli_hamiltonian(
            "-0.349833417518 II\n-0.388747588092 IZ\n0.181771536577 YY\n0.388747588092 ZI\n-0.011177144763 ZZ\n",
        )
        .unwrap()
        .observable
    }

    fn random_state_schedule(cfg: &DeviceConfig) -> PulseSchedule {
        let ops: Vec<GateOp> = ["ry 1.1 0", "rx 0.4 1", "cx 0 1", "ry -0.7 1", "rz 0.3 0"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        lower_circuit(&ops, cfg).unwrap()
    }

    #[test]
    fn zero_ansatz_gives_z_coefficient_sum() {
        let cfg = DeviceConfig::line(2);
        let h = h2();
        let e = estimate(&PulseSchedule::new(2), &cfg, &SimOptions::default(), &h, &EstimatorConfig::exact()).unwrap();
        // ⟨00|H|00⟩ is the sum of I/Z coefficients
        let want: f64 = h.terms().iter().filter(|t| !t.letters.contains(['X', 'Y'])).map(|t| t.coefficient).sum();
        assert!((e - want).abs() < 1e-12);
        let zero_amp = snp(0, 0.0, 0.0, &cfg).unwrap();
        let e2 = estimate(&zero_amp, &cfg, &SimOptions::default(), &h, &EstimatorConfig::exact()).unwrap();
        assert!((e2 - want).abs() < 1e-12);
    }

    #[test]
    fn identity_term_is_exact_in_both_modes() {
        let cfg = DeviceConfig::line(2);
        let obs = ObservableSum::new(2, [PauliTerm::new(0.73, "II").unwrap()]).unwrap();
        let s = random_state_schedule(&cfg);
        for est in [EstimatorConfig::exact(), EstimatorConfig::shots(10, 1)] {
            assert_eq!(estimate(&s, &cfg, &SimOptions::default(), &obs, &est).unwrap(), 0.73);
        }
    }

    #[test]
    fn shots_converge_to_exact() {
        let cfg = DeviceConfig::line(2);
        let s = random_state_schedule(&cfg);
        let h = h2();
        let sim = SimOptions::default();
        let exact = estimate(&s, &cfg, &sim, &h, &EstimatorConfig::exact()).unwrap();
        let shots = 1_000_000;
        let noisy = estimate(&s, &cfg, &sim, &h, &EstimatorConfig::shots(shots, 9)).unwrap();
        // standard error bound: Σ|c_k| / √shots
        let se: f64 = h.terms().iter().filter(|t| !t.is_identity()).map(|t| t.coefficient.abs()).sum::<f64>() / (shots as f64).sqrt();
        assert!((noisy - exact).abs() <= 3.0 * se, "{noisy} {exact} {se}");
    }

    #[test]
    fn x_on_plus_via_lowered_rotation() {
        let cfg = DeviceConfig::line(1);
        let plus = lower_gate(Gate::H, &[0], &cfg).unwrap();
        let obs = ObservableSum::new(1, [PauliTerm::new(1.0, "X").unwrap()]).unwrap();
        for basis in [MeasurementBasis::Ideal, MeasurementBasis::Lowered] {
            let est = EstimatorConfig {
                basis,
                ..EstimatorConfig::shots(4096, 2)
            };
            let e = estimate(&plus, &cfg, &SimOptions::default(), &obs, &est).unwrap();
            assert!((e - 1.0).abs() < 3.0 / 64.0 + 1e-3, "{basis:?} {e}");
        }
    }

    #[test]
    fn lowered_basis_tracks_ideal_for_y() {
        let cfg = DeviceConfig::line(1);
        let s = lower_gate(Gate::RX(-1.0), &[0], &cfg).unwrap();
        let obs = ObservableSum::new(1, [PauliTerm::new(1.0, "Y").unwrap()]).unwrap();
        let exact = estimate(&s, &cfg, &SimOptions::default(), &obs, &EstimatorConfig::exact()).unwrap();
        assert!((exact - 1.0f64.sin()).abs() < 1e-2);
        let est = EstimatorConfig {
            basis: MeasurementBasis::Lowered,
            ..EstimatorConfig::shots(20000, 4)
        };
        let e = estimate(&s, &cfg, &SimOptions::default(), &obs, &est).unwrap();
        assert!((e - exact).abs() < 0.03, "{e} {exact}");
    }

    #[test]
    fn qubitwise_grouping_merges_compatible_terms() {
        let obs = ObservableSum::new(
            3,
            ["ZZI", "ZIZ", "IXI", "XXI", "III"].map(|l| PauliTerm::new(1.0, l).unwrap()),
        )
        .unwrap();
        let g = group_terms(&obs, Grouping::Qubitwise);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].setting, b"ZZZ");
        assert_eq!(g[1].setting, b"XXZ");
        assert_eq!(group_terms(&obs, Grouping::PerTerm).len(), 4);
    }

    #[test]
    fn grouping_does_not_change_the_estimate_much() {
        let cfg = DeviceConfig::line(2);
        let s = random_state_schedule(&cfg);
        let h = h2();
        let sim = SimOptions::default();
        let exact = estimate(&s, &cfg, &sim, &h, &EstimatorConfig::exact()).unwrap();
        let est = EstimatorConfig {
            grouping: Grouping::Qubitwise,
            ..EstimatorConfig::shots(200_000, 3)
        };
        let e = estimate(&s, &cfg, &sim, &h, &est).unwrap();
        assert!((e - exact).abs() < 0.01);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = DeviceConfig::line(2);
        let s = random_state_schedule(&cfg);
        let sim = SimOptions::default();
        let a = estimate(&s, &cfg, &sim, &h2(), &EstimatorConfig::shots(500, 11)).unwrap();
        let b = estimate(&s, &cfg, &sim, &h2(), &EstimatorConfig::shots(500, 11)).unwrap();
        let c = estimate(&s, &cfg, &sim, &h2(), &EstimatorConfig::shots(500, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn observable_padding_and_limits() {
        let cfg = DeviceConfig::line(2);
        let obs = ObservableSum::new(1, [PauliTerm::new(1.0, "Z").unwrap()]).unwrap();
        let x0 = lower_gate(Gate::X, &[0], &cfg).unwrap();
        let e = estimate(&x0, &cfg, &SimOptions::default(), &obs, &EstimatorConfig::exact()).unwrap();
        assert!((e + 1.0).abs() < 1e-3);
        let big = ObservableSum::new(3, [PauliTerm::new(1.0, "ZZZ").unwrap()]).unwrap();
        assert!(estimate(&x0, &cfg, &SimOptions::default(), &big, &EstimatorConfig::exact()).is_err());
        assert!(EstimatorConfig::shots(0, 0).validate().is_err());
    }

    #[test]
    fn best_bitstring_modes() {
        let s = StateVector::from_bitstring("101").unwrap();
        assert_eq!(best_bitstring(&s, &EstimatorConfig::exact()).unwrap(), "101");
        assert_eq!(best_bitstring(&s, &EstimatorConfig::shots(16, 0)).unwrap(), "101");
    }
}
