//! Parametric pulse schedules: envelopes, channels, timing, binding and
//! lowering of gates to pulses.

mod blocks;
mod envelope;
mod lower;
mod schedule;

pub use blocks::{cr, duration_of, snp};
pub(crate) use envelope::sample_unchecked;
pub use envelope::{sample_envelope, Envelope, EnvelopeKind};
pub use lower::{
    cx_half_amplitude, lower_circuit, lower_gate, lower_onto, rotation_amplitude, wrap_angle, Gate, GateOp,
};
pub use schedule::{Channel, Instruction, Op, ParamKind, ParamSpace, ParamSpec, PulseSchedule, Value};
