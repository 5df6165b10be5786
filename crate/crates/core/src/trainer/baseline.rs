//! Gate-level reference ansätze, trained over rotation angles only.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::progressive::{EnergyObjective, RunRecord, StepRecord, Task, TrainSettings};
use crate::device::DeviceConfig;
use crate::error::{Error, Result};
use crate::optimizer::Bounds;
use crate::pulse::{lower_circuit, Gate, GateOp, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaselineKind {
    /// Ry layers separated by CX entanglers, closing with a Ry layer.
    RealAmplitude,
    /// Ry layers separated by CZ entanglers, closing with a Ry layer.
    TwoLocalRyCz,
    /// One Ry layer followed by CX entanglers.
    TwoGate,
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "realamplitude" | "realamplitudes" => Ok(BaselineKind::RealAmplitude),
            "twolocalrycz" | "twolocal" => Ok(BaselineKind::TwoLocalRyCz),
            "twogate" => Ok(BaselineKind::TwoGate),
            other => Err(Error::Validation(format!("unsupported baseline `{other}`"))),
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineKind::RealAmplitude => "real_amplitude",
            BaselineKind::TwoLocalRyCz => "two_local_ry_cz",
            BaselineKind::TwoGate => "two_gate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateSlot {
    /// Ry on `qubit` by angle parameter `param`.
    Rotation { qubit: usize, param: usize },
    Entangler { gate: Gate, control: usize, target: usize },
}

/// Angle-parameterized circuit lowered to fixed calibrated pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateAnsatz {
    pub kind: BaselineKind,
    pub n_qubits: usize,
    pub slots: Vec<GateSlot>,
    pub n_params: usize,
}

pub fn build_gate_baseline(kind: BaselineKind, n_qubits: usize, layers: usize, device: &DeviceConfig) -> Result<GateAnsatz> {
    if n_qubits == 0 || n_qubits > device.n_qubits {
        return Err(Error::Validation(format!(
            "{n_qubits}-qubit baseline on a {}-qubit device",
            device.n_qubits
        )));
    }
    if layers == 0 {
        return Err(Error::Validation("a baseline needs at least one layer".into()));
    }
    let edges: Vec<(usize, usize)> = device.edges().into_iter().filter(|&(_, t)| t < n_qubits).collect();
    let entangler = match kind {
        BaselineKind::TwoLocalRyCz => Gate::CZ,
        _ => Gate::CX,
    };
    let mut slots = Vec::new();
    let mut n_params = 0;
    let mut rotations = |slots: &mut Vec<GateSlot>| {
        for qubit in 0..n_qubits {
            slots.push(GateSlot::Rotation { qubit, param: n_params });
            n_params += 1;
        }
    };
    let reps = if kind == BaselineKind::TwoGate { 1 } else { layers };
    for _ in 0..reps {
        rotations(&mut slots);
        for &(control, target) in &edges {
            slots.push(GateSlot::Entangler {
                gate: entangler,
                control,
                target,
            });
        }
    }
    if kind != BaselineKind::TwoGate {
        rotations(&mut slots);
    }
    Ok(GateAnsatz {
        kind,
        n_qubits,
        slots,
        n_params,
    })
}

impl GateAnsatz {
    pub fn circuit(&self, angles: &[f64]) -> Result<Vec<GateOp>> {
        if angles.len() != self.n_params {
            return Err(Error::Binding(format!("expected {} angles, got {}", self.n_params, angles.len())));
        }
        Ok(self
            .slots
            .iter()
            .map(|s| match *s {
                GateSlot::Rotation { qubit, param } => GateOp {
                    gate: Gate::RY(angles[param]),
                    qubits: vec![qubit],
                },
                GateSlot::Entangler { gate, control, target } => GateOp {
                    gate,
                    qubits: vec![control, target],
                },
            })
            .collect())
    }

    /// Lowered pulse schedule for `angles`.
    pub fn render(&self, angles: &[f64], device: &DeviceConfig) -> Result<PulseSchedule> {
        lower_circuit(&self.circuit(angles)?, device)
    }

    pub fn count(&self, two_qubit: bool) -> usize {
        self.slots
            .iter()
            .filter(|s| matches!(s, GateSlot::Entangler { .. }) == two_qubit)
            .count()
    }

    pub fn bounds(&self) -> Bounds {
        Bounds::uniform(self.n_params, -PI, PI).expect("finite bounds")
    }
}

/// Trains all angles from zero in one optimizer run.
pub fn train_baseline(
    ansatz: &GateAnsatz,
    task: &Task,
    device: &DeviceConfig,
    settings: &TrainSettings,
    seed: u64,
) -> Result<(Vec<f64>, RunRecord)> {
    let mut est = settings.estimator;
    est.seed = seed;
    let objective = EnergyObjective::new(&task.hamiltonian, device, settings.sim, est);
    let x0 = vec![0.0; ansatz.n_params];
    let zero_energy = objective.energy(&ansatz.render(&x0, device)?)?;
    let report = settings
        .optimizer
        .minimize(|x| objective.energy_or_nan(ansatz.render(x, device)), &x0, &ansatz.bounds())?;
    let duration_ns = device.nanoseconds(ansatz.render(&report.best_x, device)?.duration());
    let step = StepRecord {
        step: 1,
        kind: "gate".into(),
        appended: (0..ansatz.n_params).map(|i| format!("theta{i}")).collect(),
        start_energy: report.trace.first().map(|t| t.1).unwrap_or(zero_energy),
        best_energy: report.best_f,
        trace: report.trace,
        n_evals: report.n_evals,
        duration_ns,
        termination: report.termination,
    };
    let record = RunRecord {
        task: task.id.clone(),
        device: device.name.clone(),
        seed,
        zero_energy,
        best_energy: report.best_f,
        reference: task.reference,
        accuracy: task.accuracy(report.best_f),
        duration_ns,
        snp_count: ansatz.count(false),
        cr_count: ansatz.count(true),
        prune: None,
        steps: vec![step],
    };
    Ok((report.best_x, record))
}
