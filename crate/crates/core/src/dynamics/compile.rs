//! Flattens a bound schedule into per-channel sample tracks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::device::DeviceConfig;
use crate::error::{Error, Result};
use crate::pulse::{sample_unchecked, Channel, Op, PulseSchedule};
use crate::qcore::C64;

const AMP_SLACK: f64 = 1e-9;

/// Oscillator offset in force for a sample: detuning in Hz and the start of
/// its epoch in seconds. The modulation phase is measured from the epoch.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Epoch {
    pub detuning: f64,
    pub start: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Track {
    pub channel: Channel,
    /// Delivered envelope (phase and saturation applied), zero when idle.
    pub values: Vec<C64>,
    pub epochs: Vec<Epoch>,
}

impl Track {
    /// Envelope at time `t` (seconds) within sample `k`, with the detuning
    /// modulation evaluated at `t`.
    #[inline]
    pub fn value(&self, k: usize, t: f64) -> C64 {
        let v = self.values[k];
        let e = self.epochs[k];
        if v == C64::new(0.0, 0.0) || e.detuning == 0.0 {
            v
        } else {
            v * C64::from_polar(1.0, 2.0 * PI * e.detuning * (t - e.start))
        }
    }

    #[inline]
    pub fn active(&self, k: usize) -> bool {
        self.values[k] != C64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub n_qubits: usize,
    pub n_samples: usize,
    pub tracks: Vec<Track>,
    /// Accumulated virtual-Z phase of each qubit's drive frame.
    pub frame_phase: Vec<f64>,
}

pub(crate) fn compile(schedule: &PulseSchedule, cfg: &DeviceConfig) -> Result<Compiled> {
    let n = schedule.n_qubits();
    if n > cfg.n_qubits {
        return Err(Error::Validation(format!(
            "schedule uses {n} qubits but the device has {}",
            cfg.n_qubits
        )));
    }
    if !schedule.is_bound() {
        let names: Vec<&str> = schedule.params().names().collect();
        return Err(Error::Binding(format!("schedule has unbound parameters: {}", names.join(", "))));
    }
    let n_samples = schedule.duration();
    let mut tracks: BTreeMap<Channel, Track> = BTreeMap::new();
    let mut phase: BTreeMap<Channel, f64> = BTreeMap::new();
    let mut epoch: BTreeMap<Channel, (f64, usize)> = BTreeMap::new();

    for inst in schedule.instructions() {
        for ch in inst.op.channels() {
            if let Channel::Control { control, target } = ch {
                if !cfg.is_edge(control, target) {
                    return Err(Error::Topology(control, target));
                }
            }
        }
        match &inst.op {
            Op::ShiftPhase { channel, phase: p } => {
                *phase.entry(*channel).or_default() += p.fixed().expect("bound");
            }
            Op::SetDetuning { channel, detuning } => {
                let d = detuning.fixed().expect("bound");
                if d.abs() > cfg.detuning_max * (1.0 + AMP_SLACK) {
                    return Err(Error::Validation(format!(
                        "detuning {d} Hz on {channel} exceeds detuning_max {}",
                        cfg.detuning_max
                    )));
                }
                epoch.insert(*channel, (d, inst.start));
            }
            Op::Play { channel, envelope } => {
                let amp = envelope.amp.fixed().expect("bound");
                if amp.abs() > cfg.amp_max * (1.0 + AMP_SLACK) {
                    return Err(Error::Validation(format!(
                        "amplitude {amp} on {channel} exceeds amp_max {}",
                        cfg.amp_max
                    )));
                }
                let track = tracks.entry(*channel).or_insert_with(|| Track {
                    channel: *channel,
                    values: vec![C64::new(0.0, 0.0); n_samples],
                    epochs: vec![Epoch::default(); n_samples],
                });
                if amp == 0.0 {
                    continue;
                }
                let rot = C64::from_polar(1.0, phase.get(channel).copied().unwrap_or(0.0));
                let (det, start) = epoch.get(channel).copied().unwrap_or((0.0, 0));
                let ep = Epoch {
                    detuning: det,
                    start: start as f64 * cfg.dt,
                };
                for j in 0..envelope.duration {
                    let raw = sample_unchecked(envelope, amp, j);
                    let mag = raw.norm();
                    let delivered = if mag == 0.0 {
                        raw
                    } else {
                        raw * (cfg.realized_amplitude(mag) / mag)
                    };
                    track.values[inst.start + j] = delivered * rot;
                    track.epochs[inst.start + j] = ep;
                }
            }
            Op::Delay { .. } | Op::Barrier { .. } => {}
        }
    }

    let frame_phase = (0..n)
        .map(|q| phase.get(&Channel::drive(q)).copied().unwrap_or(0.0))
        .collect();
    Ok(Compiled {
        n_qubits: n,
        n_samples,
        tracks: tracks.into_values().collect(),
        frame_phase,
    })
}
