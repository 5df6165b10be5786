//! Time evolution of a register under a pulse schedule.
//!
//! Two device models are available. [`Model::Effective`] keeps only the qubit
//! register and represents a control line by its effective cross-resonance
//! interaction; it can be stepped in the rotating frame with or without the
//! rotating-wave approximation, or in the lab frame. [`Model::Full`] evolves
//! the register together with a truncated bus resonator in the lab frame and
//! reports the result in the dressed interaction picture, with any weight
//! left outside the computational subspace returned as leakage.
//!
//! Virtual-Z phases accumulated on each drive frame are folded back into
//! the returned state, so a lowered `RZ` acts as the gate it names.

mod compile;
mod effective;
mod full;
mod local;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::{rotating_frame, DeviceConfig, Frame};
use crate::error::{Error, Result};
use crate::pulse::PulseSchedule;
use crate::qcore::{matexp_hermitian, pauli_matrix, CMatrix, ObservableSum, PauliTerm, StateVector, C64};

use compile::compile;
use local::apply_local;

const SQRT3_6: f64 = 0.288_675_134_594_812_9;

/// Gauss nodes of the fourth-order commutator-free step, as fractions of it.
pub(crate) const CF4_NODES: [f64; 2] = [0.5 - SQRT3_6, 0.5 + SQRT3_6];
/// Small and large mixing weights of the two exponentials.
pub(crate) const CF4_WEIGHTS: [f64; 2] = [0.25 - SQRT3_6, 0.25 + SQRT3_6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Register plus bus resonator.
    Full,
    /// Register with effective cross-resonance terms.
    #[default]
    Effective,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Model::Full),
            "effective" | "eff" => Ok(Model::Effective),
            other => Err(Error::Validation(format!("unknown model `{other}` (expected full or effective)"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Full => "full",
            Model::Effective => "effective",
        })
    }
}

/// Reference frame for the effective model. The full model always runs in
/// the lab frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMode {
    /// Rotating frame, counter-rotating terms dropped. One exact step per
    /// sample.
    #[default]
    Rwa,
    /// Rotating frame keeping the counter-rotating terms.
    Rotating,
    /// Lab frame; the result is mapped back to the rotating frame.
    Lab,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    pub model: Model,
    pub frame: FrameMode,
    /// Integrator substeps per sample (ignored under RWA).
    pub substeps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            model: Model::Effective,
            frame: FrameMode::Rwa,
            substeps: 16,
        }
    }
}

impl SimOptions {
    pub fn with_model(model: Model) -> Self {
        SimOptions {
            model,
            ..Self::default()
        }
    }

    pub fn with_frame(frame: FrameMode) -> Self {
        SimOptions {
            frame,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    /// Normalized register state in the rotating frame.
    pub final_state: StateVector,
    /// Population lost from the computational subspace (full model only).
    pub leakage: f64,
    /// Schedule length in samples.
    pub duration: usize,
}

fn frame_for(cfg: &DeviceConfig, n: usize) -> Result<Frame> {
    let mut frame = rotating_frame(cfg)?;
    frame.qubit_omega.truncate(n);
    Ok(frame)
}

/// Applies `RZ(φ_q)` for each qubit's accumulated frame phase.
fn undo_frame_phase(state: &mut [C64], n: usize, phases: &[f64]) {
    for (q, &phi) in phases.iter().enumerate() {
        if phi == 0.0 {
            continue;
        }
        let rz = CMatrix::from_diag(&[C64::from_polar(1.0, -0.5 * phi), C64::from_polar(1.0, 0.5 * phi)]);
        apply_local(state, n, &[q], &rz);
    }
}

fn check_options(opts: &SimOptions) -> Result<()> {
    if opts.substeps == 0 {
        return Err(Error::Validation("substeps must be at least 1".into()));
    }
    Ok(())
}

/// Evolves every column of `states` (register amplitudes) through the
/// schedule. Returns the leakage of each.
fn evolve(schedule: &PulseSchedule, cfg: &DeviceConfig, opts: &SimOptions, states: &mut [Vec<C64>]) -> Result<Vec<f64>> {
    check_options(opts)?;
    let compiled = compile(schedule, cfg)?;
    let n = compiled.n_qubits;
    let dim = 1usize << n;
    if let Some(s) = states.iter().find(|s| s.len() != dim) {
        return Err(Error::Validation(format!(
            "initial state has dimension {} but the schedule acts on {n} qubits",
            s.len()
        )));
    }
    let frame = frame_for(cfg, n)?;
    let leakage = match opts.model {
        Model::Effective => {
            effective::run(&compiled, cfg, &frame, opts.frame, opts.substeps, states);
            vec![0.0; states.len()]
        }
        Model::Full => {
            let model = full::FullModel::new(cfg, n)?;
            let mut lab: Vec<Vec<C64>> = states.iter().map(|s| model.embed(s)).collect();
            model.run(&compiled, cfg, &frame, opts.substeps, &mut lab);
            let t = compiled.n_samples as f64 * cfg.dt;
            let mut leak = Vec::with_capacity(states.len());
            for (s, l) in states.iter_mut().zip(&lab) {
                let before: f64 = s.iter().map(|a| a.norm_sqr()).sum();
                *s = model.project(l, t);
                let after: f64 = s.iter().map(|a| a.norm_sqr()).sum();
                leak.push((before - after).max(0.0));
            }
            leak
        }
    };
    for s in states.iter_mut() {
        undo_frame_phase(s, n, &compiled.frame_phase);
    }
    Ok(leakage)
}

/// Final register state after `schedule`, starting from `initial`.
pub fn propagate(
    schedule: &PulseSchedule,
    cfg: &DeviceConfig,
    opts: &SimOptions,
    initial: &StateVector,
) -> Result<PropagationResult> {
    let mut states = vec![initial.amplitudes().to_vec()];
    let leakage = evolve(schedule, cfg, opts, &mut states)?;
    let amplitudes = states.pop().expect("one state");
    Ok(PropagationResult {
        final_state: StateVector::normalized(amplitudes)?,
        leakage: leakage[0],
        duration: schedule.duration(),
    })
}

/// Register propagator of `schedule`. Under the full model this is the
/// computational block, unitary only up to leakage.
pub fn propagate_unitary(schedule: &PulseSchedule, cfg: &DeviceConfig, opts: &SimOptions) -> Result<CMatrix> {
    let dim = 1usize << schedule.n_qubits();
    let mut states: Vec<Vec<C64>> = (0..dim).map(|j| StateVector::basis(dim, j).into_amplitudes()).collect();
    evolve(schedule, cfg, opts, &mut states)?;
    let mut u = CMatrix::zeros(dim, dim);
    for (j, col) in states.iter().enumerate() {
        u.set_column(j, col);
    }
    Ok(u)
}

/// Two-qubit Hamiltonian `Σ c_k P_k` over the effective CR operators in the
/// order `ZX, ZY, ZZ, IX, IY, IZ`, with the control as qubit 0.
pub fn effective_hamiltonian(c: [f64; 6]) -> ObservableSum {
    let labels = ["ZX", "ZY", "ZZ", "IX", "IY", "IZ"];
    let terms: Vec<PauliTerm> = labels
        .iter()
        .zip(c)
        .map(|(l, v)| PauliTerm::new(v, *l).expect("static label"))
        .collect();
    ObservableSum::new(2, terms).expect("two-qubit terms")
}

/// `exp(-i t H)` for the effective Hamiltonian with coefficients `c` (rad/s).
pub fn evolve_effective(c: [f64; 6], t: f64) -> Result<CMatrix> {
    let h = effective_hamiltonian(c).to_matrix()?;
    matexp_hermitian(&h, t)
}

/// Average gate fidelity `(|tr(U†V)|² + d) / (d(d+1))`. For a non-unitary
/// `v` (a leaky block) this is the usual lower-order estimate.
pub fn fidelity(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() || !u.is_square() {
        return Err(Error::Validation(format!(
            "fidelity needs square matrices of equal size, got {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    let d = u.rows() as f64;
    let overlap = u.dagger().matmul(v).trace().norm_sqr();
    Ok((overlap + d) / (d * (d + 1.0)))
}

/// `|⟨a|b⟩|²`.
pub fn state_fidelity(a: &StateVector, b: &StateVector) -> f64 {
    a.overlap(b)
}

/// Pauli operator on `n` qubits, e.g. `pauli("ZX")`.
pub fn pauli(label: &str) -> CMatrix {
    pauli_matrix(&PauliTerm::new(1.0, label).expect("valid label")).expect("small register")
}

#[cfg(test)]
mod tests;
