use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::Envelope;

/// Coefficients of the two-qubit cross-resonance Hamiltonian
/// `a·(Z ⊗ σ) + b·(I ⊗ σ)` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CRCoefficients {
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    pub b_x: f64,
    pub b_y: f64,
    pub b_z: f64,
}

impl CRCoefficients {
    pub fn scaled(&self, s: f64) -> Self {
        CRCoefficients {
            a_x: self.a_x * s,
            a_y: self.a_y * s,
            a_z: self.a_z * s,
            b_x: self.b_x * s,
            b_y: self.b_y * s,
            b_z: self.b_z * s,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.a_x, self.a_y, self.a_z, self.b_x, self.b_y, self.b_z]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        CRCoefficients {
            a_x: v[0],
            a_y: v[1],
            a_z: v[2],
            b_x: v[3],
            b_y: v[4],
            b_z: v[5],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Envelope phase that turns the transverse `a` term into pure `Z⊗X`.
    pub fn zx_alignment_angle(&self) -> f64 {
        self.a_y.atan2(self.a_x)
    }
}

/// How gate angles map to pulse amplitudes when lowering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpMap {
    /// Amplitude proportional to rotation angle.
    #[default]
    Linear,
    /// Inverts the configured drive saturation.
    Arcsine,
}

fn default_name() -> String {
    "device".into()
}
fn default_bus_freq() -> f64 {
    7.0e9
}
fn default_bus_cutoff() -> usize {
    3
}
fn default_dt() -> f64 {
    2.0 / 9.0 * 1e-9
}
fn default_snp_duration() -> usize {
    160
}
fn default_rx_duration() -> usize {
    320
}
fn default_cr_duration() -> usize {
    736
}
fn default_cx_cr_duration() -> usize {
    448
}
fn default_cr_sigma() -> f64 {
    64.0
}
fn default_amp_max() -> f64 {
    0.4
}
fn default_detuning_max() -> f64 {
    2.0e6
}
fn default_cr_rates() -> CRCoefficients {
    // per unit amplitude; chosen so a 70.4 ns flat CR at amplitude 0.2
    // leaves the control-|0⟩ block near identity and rotates the
    // control-|1⟩ block by about 0.46 rad about X
    CRCoefficients {
        a_x: 1.805e7,
        a_y: 7.95e5,
        a_z: 1.21e6,
        b_x: -1.485e7,
        b_y: 1.35e5,
        b_z: -7.1e5,
    }
}

/// Transmon register coupled to a shared bus resonator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub n_qubits: usize,
    /// Qubit transition frequencies, Hz.
    pub qubit_freq: Vec<f64>,
    /// Qubit-bus couplings, Hz. Empty means uncoupled.
    #[serde(default)]
    pub coupling: Vec<f64>,
    /// Bus resonator frequency, Hz.
    #[serde(default = "default_bus_freq")]
    pub bus_freq: f64,
    #[serde(default = "default_bus_cutoff")]
    pub bus_cutoff: usize,
    /// Sample period, seconds.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Rabi rate (rad/s) per unit envelope amplitude. Derived from the
    /// calibration convention when absent.
    #[serde(default)]
    pub drive_scale: Option<f64>,
    pub topology: Vec<[usize; 2]>,
    #[serde(default = "default_snp_duration")]
    pub snp_duration: usize,
    #[serde(default = "default_rx_duration")]
    pub rx_gate_duration: usize,
    #[serde(default = "default_cr_duration")]
    pub cr_duration: usize,
    /// Duration of each echo half of a lowered CX.
    #[serde(default = "default_cx_cr_duration")]
    pub cx_cr_duration: usize,
    #[serde(default = "default_cr_sigma")]
    pub cr_sigma: f64,
    #[serde(default = "default_amp_max")]
    pub amp_max: f64,
    /// Detuning bound, Hz.
    #[serde(default = "default_detuning_max")]
    pub detuning_max: f64,
    /// DRAG quadrature coefficient, samples.
    #[serde(default)]
    pub drag_beta: f64,
    /// Effective CR coefficients per unit amplitude, rad/s.
    #[serde(default = "default_cr_rates")]
    pub cr_rates: CRCoefficients,
    /// Saturation amplitude of the drive chain; `None` means linear.
    #[serde(default)]
    pub drive_saturation: Option<f64>,
    #[serde(default)]
    pub amp_map: AmpMap,
}

impl DeviceConfig {
    /// Minimal uncoupled device on `n_qubits` in a line, all defaults.
    pub fn line(n_qubits: usize) -> Self {
        DeviceConfig {
            name: format!("line{n_qubits}"),
            n_qubits,
            qubit_freq: (0..n_qubits).map(|q| 5.0e9 + 0.1e9 * q as f64).collect(),
            coupling: Vec::new(),
            bus_freq: default_bus_freq(),
            bus_cutoff: default_bus_cutoff(),
            dt: default_dt(),
            drive_scale: None,
            topology: (1..n_qubits).map(|q| [q - 1, q]).collect(),
            snp_duration: default_snp_duration(),
            rx_gate_duration: default_rx_duration(),
            cr_duration: default_cr_duration(),
            cx_cr_duration: default_cx_cr_duration(),
            cr_sigma: default_cr_sigma(),
            amp_max: default_amp_max(),
            detuning_max: default_detuning_max(),
            drag_beta: 0.0,
            cr_rates: default_cr_rates(),
            drive_saturation: None,
            amp_map: AmpMap::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.n_qubits == 0 {
            return bad("n_qubits must be positive".into());
        }
        if self.qubit_freq.len() != self.n_qubits {
            return bad(format!("qubit_freq has {} entries for {} qubits", self.qubit_freq.len(), self.n_qubits));
        }
        if let Some(f) = self.qubit_freq.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
            return bad(format!("qubit_freq entries must be positive, got {f}"));
        }
        if !self.coupling.is_empty() && self.coupling.len() != self.n_qubits {
            return bad(format!("coupling has {} entries for {} qubits", self.coupling.len(), self.n_qubits));
        }
        if self.coupling.iter().any(|g| !g.is_finite()) {
            return bad("coupling entries must be finite".into());
        }
        if !(self.bus_freq > 0.0 && self.bus_freq.is_finite()) {
            return bad(format!("bus_freq must be positive, got {}", self.bus_freq));
        }
        if self.bus_cutoff == 0 || self.bus_cutoff > 8 {
            return bad(format!("bus_cutoff must be in 1..=8, got {}", self.bus_cutoff));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if let Some(s) = self.drive_scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("drive_scale must be positive, got {s}"));
            }
        }
        for e in &self.topology {
            if e[0] >= self.n_qubits || e[1] >= self.n_qubits || e[0] == e[1] {
                return bad(format!("topology edge ({}, {}) is invalid for {} qubits", e[0], e[1], self.n_qubits));
            }
        }
        for (name, d) in [
            ("snp_duration", self.snp_duration),
            ("rx_gate_duration", self.rx_gate_duration),
            ("cr_duration", self.cr_duration),
            ("cx_cr_duration", self.cx_cr_duration),
        ] {
            if d == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        for (name, d) in [("cr_duration", self.cr_duration), ("cx_cr_duration", self.cx_cr_duration)] {
            if (d as f64) <= 4.0 * self.cr_sigma {
                return bad(format!("{name} {d} leaves no flat top with cr_sigma {}", self.cr_sigma));
            }
        }
        if !(self.cr_sigma > 0.0) {
            return bad("cr_sigma must be positive".into());
        }
        if !(self.amp_max > 0.0 && self.amp_max <= 1.0) {
            return bad(format!("amp_max must be in (0, 1], got {}", self.amp_max));
        }
        if !(self.detuning_max >= 0.0 && self.detuning_max.is_finite()) {
            return bad(format!("detuning_max must be non-negative, got {}", self.detuning_max));
        }
        if !self.drag_beta.is_finite() || !self.cr_rates.is_finite() {
            return bad("drag_beta and cr_rates must be finite".into());
        }
        if let Some(a) = self.drive_saturation {
            if !(a > 0.0) {
                return bad(format!("drive_saturation must be positive, got {a}"));
            }
        }
        if self.amp_map == AmpMap::Arcsine && self.drive_saturation.is_none() {
            return bad("amp_map \"arcsine\" needs drive_saturation".into());
        }
        Ok(())
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.topology
            .iter()
            .any(|e| (e[0] == a && e[1] == b) || (e[0] == b && e[1] == a))
    }

    /// Undirected edges as `(low, high)`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .topology
            .iter()
            .map(|e| (e[0].min(e[1]), e[0].max(e[1])))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn coupling_hz(&self, q: usize) -> f64 {
        self.coupling.get(q).copied().unwrap_or(0.0)
    }

    pub fn has_coupling(&self) -> bool {
        self.coupling.iter().any(|&g| g != 0.0)
    }

    /// Rabi rate per unit amplitude, rad/s.
    pub fn drive_scale(&self) -> f64 {
        self.drive_scale.unwrap_or_else(|| {
            // a 160-sample Gaussian (sigma 40) at amplitude 0.2 is a pi/2 turn
            let area = Envelope::gaussian(160, 40.0, 0.2).unit_area();
            FRAC_PI_2 / (0.2 * area * self.dt)
        })
    }

    /// Amplitude actually delivered for a commanded amplitude `a`.
    pub fn realized_amplitude(&self, a: f64) -> f64 {
        match self.drive_saturation {
            Some(s) => s * (a / s).clamp(-FRAC_PI_2, FRAC_PI_2).sin(),
            None => a,
        }
    }

    /// Commanded amplitude that delivers `target` under the lowering map.
    pub fn command_amplitude(&self, target: f64) -> f64 {
        match (self.amp_map, self.drive_saturation) {
            (AmpMap::Arcsine, Some(s)) => s * (target / s).clamp(-1.0, 1.0).asin(),
            _ => target,
        }
    }

    pub fn nanoseconds(&self, samples: usize) -> f64 {
        samples as f64 * self.dt * 1e9
    }
}

/// Loads and validates a JSON device description.
pub fn load_device(path: impl AsRef<Path>) -> Result<DeviceConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let cfg: DeviceConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    cfg.validate()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    log::info!(
        "device `{}`: {} qubits, dt {:.4} ns, drive_scale {:.4e} rad/s, snp {} dt, cr {} dt, amp_max {}, detuning_max {} Hz",
        cfg.name,
        cfg.n_qubits,
        cfg.dt * 1e9,
        cfg.drive_scale(),
        cfg.snp_duration,
        cfg.cr_duration,
        cfg.amp_max,
        cfg.detuning_max
    );
    Ok(cfg)
}
