//! Register-plus-bus propagation in the lab frame, reported in the dressed
//! interaction picture.

use super::compile::Compiled;
use super::{CF4_NODES, CF4_WEIGHTS};
use crate::device::{dressed_levels, static_hamiltonian, DeviceConfig, DressedLevels, Frame};
use crate::error::{Error, Result};
use crate::pulse::Channel;
use crate::qcore::eigen::expm_unchecked;
use crate::qcore::{CMatrix, C64};

pub(crate) struct FullModel {
    drift: CMatrix,
    levels: DressedLevels,
    cutoff: usize,
    n: usize,
}

impl FullModel {
    pub fn new(cfg: &DeviceConfig, n: usize) -> Result<Self> {
        if n != cfg.n_qubits {
            return Err(Error::Validation(format!(
                "the full model simulates the whole {}-qubit device; schedule has {n}",
                cfg.n_qubits
            )));
        }
        let drift = static_hamiltonian(cfg)?;
        let levels = dressed_levels(cfg)?;
        Ok(FullModel {
            drift,
            levels,
            cutoff: cfg.bus_cutoff,
            n,
        })
    }

    /// Register amplitudes placed on the dressed states with an empty bus.
    pub fn embed(&self, register: &[C64]) -> Vec<C64> {
        let dim = self.drift.rows();
        let mut out = vec![C64::new(0.0, 0.0); dim];
        for (reg, &c) in register.iter().enumerate() {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let v = self.levels.vector_of(reg * self.cutoff);
            for (o, x) in out.iter_mut().zip(&v) {
                *o += c * x;
            }
        }
        out
    }

    /// Projects a lab-frame state at time `t` onto the dressed empty-bus
    /// states, removing their free evolution. Returns the register
    /// amplitudes (not renormalized).
    pub fn project(&self, state: &[C64], t: f64) -> Vec<C64> {
        let e0 = self.levels.energy_of(0);
        (0..1usize << self.n)
            .map(|reg| {
                let bare = reg * self.cutoff;
                let v = self.levels.vector_of(bare);
                let overlap: C64 = v.iter().zip(state).map(|(a, b)| a.conj() * b).sum();
                overlap * C64::from_polar(1.0, (self.levels.energy_of(bare) - e0) * t)
            })
            .collect()
    }

    fn hamiltonian(&self, compiled: &Compiled, cfg: &DeviceConfig, frame: &Frame, active: &[usize], k: usize, t: f64) -> CMatrix {
        let mut h = self.drift.clone();
        let dim = h.rows();
        for &ti in active {
            let track = &compiled.tracks[ti];
            let driven = match track.channel {
                Channel::Drive { qubit } => qubit,
                Channel::Control { control, .. } => control,
            };
            let s = track.value(k, t);
            let coeff = cfg.drive_scale() * (s * C64::from_polar(1.0, frame.channel_omega(&track.channel) * t)).re;
            let bit = 1usize << (self.n - 1 - driven);
            for i in 0..dim {
                let (reg, m) = (i / self.cutoff, i % self.cutoff);
                h[((reg ^ bit) * self.cutoff + m, i)] += C64::new(coeff, 0.0);
            }
        }
        h
    }

    pub fn run(&self, compiled: &Compiled, cfg: &DeviceConfig, frame: &Frame, substeps: usize, states: &mut [Vec<C64>]) {
        let dt = cfg.dt;
        let idle = expm_unchecked(&self.drift, dt);
        let step = dt / substeps as f64;
        for k in 0..compiled.n_samples {
            let active: Vec<usize> = (0..compiled.tracks.len())
                .filter(|&i| compiled.tracks[i].active(k))
                .collect();
            if active.is_empty() {
                for s in states.iter_mut() {
                    *s = idle.matvec(s);
                }
                continue;
            }
            for j in 0..substeps {
                let t0 = k as f64 * dt + j as f64 * step;
                let h1 = self.hamiltonian(compiled, cfg, frame, &active, k, t0 + CF4_NODES[0] * step);
                let h2 = self.hamiltonian(compiled, cfg, frame, &active, k, t0 + CF4_NODES[1] * step);
                let [w_small, w_big] = CF4_WEIGHTS;
                let u1 = expm_unchecked(&(&h1.scale_real(w_big) + &h2.scale_real(w_small)), step);
                let u2 = expm_unchecked(&(&h1.scale_real(w_small) + &h2.scale_real(w_big)), step);
                let u = u2.matmul(&u1);
                for s in states.iter_mut() {
                    *s = u.matvec(s);
                }
            }
        }
    }
}
