//! Grow, train the new layer, freeze, repeat.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::genome::{grow, prune, AnsatzGenome, GrowthPolicy};
use crate::device::DeviceConfig;
use crate::dynamics::SimOptions;
use crate::error::{Error, Result};
use crate::optimizer::{Bounds, OptimizerSettings, Termination};
use crate::problems::{derived_seed, estimate, EstimatorConfig, EstimatorMode};
use crate::pulse::PulseSchedule;
use crate::qcore::ObservableSum;

/// Observable to minimize, with its exact ground energy when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub hamiltonian: ObservableSum,
    pub reference: Option<f64>,
}

impl Task {
    /// `1 − |E − E_ref| / |E_ref|`, when a reference exists.
    pub fn accuracy(&self, energy: f64) -> Option<f64> {
        self.reference.map(|r| 1.0 - (energy - r).abs() / r.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainSettings {
    pub optimizer: OptimizerSettings,
    pub policy: GrowthPolicy,
    /// Stop once a step improves the best energy by less than this.
    pub stop_epsilon: f64,
    /// Prune after the last step with this amplitude threshold.
    pub prune_eps: Option<f64>,
    pub estimator: EstimatorConfig,
    pub sim: SimOptions,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            optimizer: OptimizerSettings::default(),
            policy: GrowthPolicy::default(),
            stop_epsilon: 1e-3,
            prune_eps: None,
            estimator: EstimatorConfig::exact(),
            sim: SimOptions::default(),
        }
    }
}

/// Energy of bound schedules. In shot mode every call draws from its own
/// seed stream, so repeated calls are independent but reproducible.
pub struct EnergyObjective<'a> {
    pub hamiltonian: &'a ObservableSum,
    pub device: &'a DeviceConfig,
    pub sim: SimOptions,
    pub estimator: EstimatorConfig,
    calls: Cell<u64>,
}

impl<'a> EnergyObjective<'a> {
    pub fn new(hamiltonian: &'a ObservableSum, device: &'a DeviceConfig, sim: SimOptions, estimator: EstimatorConfig) -> Self {
        EnergyObjective {
            hamiltonian,
            device,
            sim,
            estimator,
            calls: Cell::new(0),
        }
    }

    pub fn energy(&self, schedule: &PulseSchedule) -> Result<f64> {
        let mut est = self.estimator;
        if est.mode == EstimatorMode::Shots {
            let i = self.calls.get();
            self.calls.set(i + 1);
            est.seed = derived_seed(self.estimator.seed, i);
        }
        estimate(schedule, self.device, &self.sim, self.hamiltonian, &est)
    }

    /// Energy, with failures mapped to NaN so the optimizer rejects them.
    pub fn energy_or_nan(&self, schedule: Result<PulseSchedule>) -> f64 {
        match schedule.and_then(|s| self.energy(&s)) {
            Ok(e) => e,
            Err(e) => {
                log::warn!("evaluation failed: {e}");
                f64::NAN
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// `snp`, `cr` or `gate`.
    pub kind: String,
    /// Parameters trained in this step.
    pub appended: Vec<String>,
    pub start_energy: f64,
    pub best_energy: f64,
    /// Accepted evaluations: trained values and energy.
    pub trace: Vec<(Vec<f64>, f64)>,
    pub n_evals: usize,
    pub duration_ns: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub eps: f64,
    pub removed_pulses: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    pub duration_before_ns: f64,
    pub duration_after_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task: String,
    pub device: String,
    pub seed: u64,
    /// Energy of the empty ansatz, `⟨0…0|H|0…0⟩`.
    pub zero_energy: f64,
    pub steps: Vec<StepRecord>,
    pub best_energy: f64,
    pub reference: Option<f64>,
    pub accuracy: Option<f64>,
    pub duration_ns: f64,
    pub snp_count: usize,
    pub cr_count: usize,
    pub prune: Option<PruneRecord>,
}

fn layer_label(g: &AnsatzGenome) -> String {
    g.blocks
        .last()
        .map(|b| format!("{:?}", b.kind).to_ascii_lowercase())
        .unwrap_or_default()
}

/// Trains the genome's partial list with everything else held fixed, and
/// returns the genome at the best values seen.
pub fn train_step(
    g: &AnsatzGenome,
    objective: &EnergyObjective<'_>,
    optimizer: &OptimizerSettings,
) -> Result<(AnsatzGenome, StepRecord)> {
    let free = g.partial_indices();
    if free.is_empty() {
        return Err(Error::Validation("the genome has no trainable parameters".into()));
    }
    let cfg = objective.device;
    let bounds = Bounds::new(free.iter().map(|&i| (g.params[i].lo, g.params[i].hi)))?;
    let x0: Vec<f64> = free.iter().map(|&i| g.params[i].value).collect();
    let base = g.values();
    let full = |x: &[f64]| {
        let mut v = base.clone();
        for (&i, &xi) in free.iter().zip(x) {
            v[i] = xi;
        }
        v
    };
    let report = optimizer.minimize(|x| objective.energy_or_nan(g.render_values(cfg, &full(x))), &x0, &bounds)?;
    let start_energy = match report.trace.first() {
        Some((x, e)) if *x == x0 => *e,
        _ => return Err(Error::Evaluation("optimizer did not start at the current values".into())),
    };

    let mut out = g.clone();
    for (&i, &v) in free.iter().zip(&report.best_x) {
        out.params[i].value = v;
    }
    let step = StepRecord {
        step: g.steps(),
        kind: layer_label(g),
        appended: free.iter().map(|&i| g.params[i].name.clone()).collect(),
        start_energy,
        best_energy: report.best_f,
        n_evals: report.n_evals,
        duration_ns: cfg.nanoseconds(out.render_bound(cfg)?.duration()),
        termination: report.termination,
        trace: report.trace,
    };
    Ok((out, step))
}

/// Progressive training from an empty genome.
pub fn run_progressive(task: &Task, device: &DeviceConfig, settings: &TrainSettings, seed: u64) -> Result<(AnsatzGenome, RunRecord)> {
    device.validate()?;
    if task.hamiltonian.n_qubits() > device.n_qubits {
        return Err(Error::Validation(format!(
            "task `{}` needs {} qubits, device `{}` has {}",
            task.id,
            task.hamiltonian.n_qubits(),
            device.name,
            device.n_qubits
        )));
    }
    if !(settings.stop_epsilon >= 0.0) {
        return Err(Error::Validation(format!("stop_epsilon must be non-negative, got {}", settings.stop_epsilon)));
    }
    let mut est = settings.estimator;
    est.seed = seed;
    let objective = EnergyObjective::new(&task.hamiltonian, device, settings.sim, est);

    let mut g = AnsatzGenome::new(device.n_qubits);
    let zero_energy = objective.energy(&g.render_bound(device)?)?;
    let mut best = zero_energy;
    let mut steps = Vec::new();
    while g.steps() < settings.policy.max_steps {
        g = grow(&g, &settings.policy, device)?;
        let (trained, rec) = train_step(&g, &objective, &settings.optimizer)?;
        g = trained;
        let improvement = best - rec.best_energy;
        best = best.min(rec.best_energy);
        log::info!(
            "{} step {}: {:.6} -> {:.6} in {} evals",
            task.id,
            rec.step,
            rec.start_energy,
            rec.best_energy,
            rec.n_evals
        );
        steps.push(rec);
        if improvement < settings.stop_epsilon {
            log::info!("{}: improvement {improvement:.2e} below the stop threshold", task.id);
            break;
        }
    }

    let mut prune_rec = None;
    if let Some(eps) = settings.prune_eps {
        let before = g.render_bound(device)?;
        let pruned = prune(&g, eps)?;
        let after = pruned.render_bound(device)?;
        let (n0, n1) = (g.pulse_counts(), pruned.pulse_counts());
        prune_rec = Some(PruneRecord {
            eps,
            removed_pulses: (n0.0 + n0.1) - (n1.0 + n1.1),
            energy_before: objective.energy(&before)?,
            energy_after: objective.energy(&after)?,
            duration_before_ns: device.nanoseconds(before.duration()),
            duration_after_ns: device.nanoseconds(after.duration()),
        });
        g = pruned;
    }

    let (snp_count, cr_count) = g.pulse_counts();
    let record = RunRecord {
        task: task.id.clone(),
        device: device.name.clone(),
        seed,
        zero_energy,
        steps,
        best_energy: best,
        reference: task.reference,
        accuracy: task.accuracy(best),
        duration_ns: device.nanoseconds(g.render_bound(device)?.duration()),
        snp_count,
        cr_count,
        prune: prune_rec,
    };
    Ok((g, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::load_molecule;
    use std::path::Path;

    fn h2() -> Task {
        let m = load_molecule(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/molecules/h2_0.75.ham"), true).unwrap();
        Task {
            id: m.label,
            hamiltonian: m.hamiltonian,
            reference: Some(m.fci_reference),
        }
    }

    #[test]
    fn first_step_beats_the_empty_ansatz() {
        let task = h2();
        let cfg = DeviceConfig::line(2);
        let obj = EnergyObjective::new(&task.hamiltonian, &cfg, SimOptions::default(), EstimatorConfig::exact());
        let g = grow(&AnsatzGenome::new(2), &GrowthPolicy::default(), &cfg).unwrap();
        let zero = task.hamiltonian.identity_coefficient()
            + task
                .hamiltonian
                .terms()
                .iter()
                .filter(|t| !t.is_identity() && t.letters.bytes().all(|b| b == b'I' || b == b'Z'))
                .map(|t| t.coefficient)
                .sum::<f64>();
        let (trained, rec) = train_step(&g, &obj, &OptimizerSettings::default()).unwrap();
        assert!((rec.start_energy - zero).abs() < 1e-9, "{} vs {zero}", rec.start_energy);
        assert!(rec.best_energy <= -0.5 && rec.best_energy < zero, "{}", rec.best_energy);
        assert!(rec.n_evals <= 50);
        for p in &trained.params {
            assert!(p.value >= p.lo && p.value <= p.hi);
        }
    }

    #[test]
    fn frozen_values_are_untouched() {
        let task = h2();
        let cfg = DeviceConfig::line(2);
        let obj = EnergyObjective::new(&task.hamiltonian, &cfg, SimOptions::default(), EstimatorConfig::exact());
        let mut g = grow(&AnsatzGenome::new(2), &GrowthPolicy::default(), &cfg).unwrap();
        g.set_value("s1_q0_amp", 0.123456789).unwrap();
        g.set_value("s1_q1_det", -3.21e5).unwrap();
        g = grow(&g, &GrowthPolicy::default(), &cfg).unwrap();
        let frozen: Vec<u64> = g.params.iter().filter(|p| p.frozen).map(|p| p.value.to_bits()).collect();
        let (t, rec) = train_step(&g, &obj, &OptimizerSettings { max_evals: 12, ..Default::default() }).unwrap();
        let after: Vec<u64> = t.params.iter().filter(|p| p.frozen).map(|p| p.value.to_bits()).collect();
        assert_eq!(frozen, after);
        assert_eq!(rec.appended, vec!["s2_e01_amp", "s2_e01_det"]);
    }

    #[test]
    fn constant_observable_terminates_in_bounds() {
        let task = Task {
            id: "zero".into(),
            hamiltonian: ObservableSum::zero(2),
            reference: None,
        };
        let (g, rec) = run_progressive(&task, &DeviceConfig::line(2), &TrainSettings::default(), 0).unwrap();
        assert_eq!(rec.best_energy, 0.0);
        assert!(g.params.iter().all(|p| p.value >= p.lo && p.value <= p.hi));
        assert_eq!(rec.steps.len(), 1);
    }

    #[test]
    fn infinite_threshold_runs_one_step() {
        let settings = TrainSettings {
            stop_epsilon: f64::INFINITY,
            optimizer: OptimizerSettings { max_evals: 10, ..Default::default() },
            ..Default::default()
        };
        let (_, rec) = run_progressive(&h2(), &DeviceConfig::line(2), &settings, 1).unwrap();
        assert_eq!(rec.steps.len(), 1);
    }

    #[test]
    fn two_steps_are_continuous_and_monotone() {
        let settings = TrainSettings {
            stop_epsilon: -0.0,
            ..Default::default()
        };
        let (g, rec) = run_progressive(&h2(), &DeviceConfig::line(2), &settings, 3).unwrap();
        assert_eq!(rec.steps.len(), 2);
        assert!((rec.steps[1].start_energy - rec.steps[0].best_energy).abs() < 1e-9);
        assert!(rec.steps[1].best_energy <= rec.steps[0].best_energy);
        assert!(rec.best_energy <= -1.10, "{}", rec.best_energy);
        assert!(rec.steps[1].duration_ns >= rec.steps[0].duration_ns);
        assert_eq!(g.pulse_counts(), (rec.snp_count, rec.cr_count));
    }

    #[test]
    fn shot_mode_is_reproducible() {
        let settings = TrainSettings {
            estimator: EstimatorConfig::shots(256, 0),
            optimizer: OptimizerSettings { max_evals: 8, ..Default::default() },
            policy: GrowthPolicy { max_steps: 1, ..Default::default() },
            ..Default::default()
        };
        let a = run_progressive(&h2(), &DeviceConfig::line(2), &settings, 5).unwrap().1;
        let b = run_progressive(&h2(), &DeviceConfig::line(2), &settings, 5).unwrap().1;
        let c = run_progressive(&h2(), &DeviceConfig::line(2), &settings, 6).unwrap().1;
        assert_eq!(a, b);
        assert_ne!(a.steps[0].trace, c.steps[0].trace);
    }
}
