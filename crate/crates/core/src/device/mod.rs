//! Transmon register, bus resonator and effective cross-resonance model.

mod config;
mod hamiltonian;

pub use config::{load_device, AmpMap, CRCoefficients, DeviceConfig};
pub use hamiltonian::{
    calibrate_pi_half, cr_effective_time, cr_envelope, drag_envelope, dressed_levels, drive_hamiltonian,
    effective_cr, full_dimension, rotating_frame, static_hamiltonian, DressedLevels, Frame,
};
