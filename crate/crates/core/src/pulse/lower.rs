use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::schedule::{Channel, PulseSchedule};
use crate::device::{calibrate_pi_half, cr_effective_time, cr_envelope, drag_envelope, DeviceConfig};
use crate::error::{Error, Result};

/// Gates that can be lowered to pulses. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", content = "angle", rename_all = "lowercase")]
pub enum Gate {
    RX(f64),
    RY(f64),
    RZ(f64),
    H,
    X,
    CX,
    CZ,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::CX | Gate::CZ => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::RX(t) => write!(f, "rx({t})"),
            Gate::RY(t) => write!(f, "ry({t})"),
            Gate::RZ(t) => write!(f, "rz({t})"),
            Gate::H => write!(f, "h"),
            Gate::X => write!(f, "x"),
            Gate::CX => write!(f, "cx"),
            Gate::CZ => write!(f, "cz"),
        }
    }
}

/// A gate applied to specific qubits, parsed from text such as `cx 0 1` or
/// `rx 1.5708 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub gate: Gate,
    pub qubits: Vec<usize>,
}

impl FromStr for GateOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = |m: &str| Error::Validation(format!("cannot parse gate `{s}`: {m}"));
        let (name, rest) = parts.split_first().ok_or_else(|| bad("empty"))?;
        let name = name.to_ascii_lowercase();
        let (gate, qubit_args) = match name.as_str() {
            "rx" | "ry" | "rz" => {
                let (angle, qs) = rest.split_first().ok_or_else(|| bad("missing angle"))?;
                let a: f64 = angle.parse().map_err(|_| bad("angle is not a number"))?;
                let g = match name.as_str() {
                    "rx" => Gate::RX(a),
                    "ry" => Gate::RY(a),
                    _ => Gate::RZ(a),
                };
                (g, qs)
            }
            "h" => (Gate::H, rest),
            "x" => (Gate::X, rest),
            "cx" | "cnot" => (Gate::CX, rest),
            "cz" => (Gate::CZ, rest),
            other => return Err(Error::Lowering(format!("unsupported gate `{other}`"))),
        };
        let qubits = qubit_args
            .iter()
            .map(|q| q.parse::<usize>().map_err(|_| bad("qubit is not an index")))
            .collect::<Result<Vec<_>>>()?;
        if qubits.len() != gate.arity() {
            return Err(bad(&format!("expected {} qubit(s)", gate.arity())));
        }
        Ok(GateOp { gate, qubits })
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Amplitude of a `duration`-sample Drag pulse rotating by `theta`, under
/// the device's linear (or arcsine-corrected) angle map.
pub fn rotation_amplitude(cfg: &DeviceConfig, duration: usize, theta: f64) -> f64 {
    let linear = calibrate_pi_half(cfg, duration) * wrap_angle(theta) / FRAC_PI_2;
    cfg.command_amplitude(linear)
}

/// Amplitude of each echo half of a lowered CX (a π/4 ZX turn per half).
pub fn cx_half_amplitude(cfg: &DeviceConfig) -> Result<f64> {
    let r = &cfg.cr_rates;
    let rate = r.a_x.hypot(r.a_y);
    if rate == 0.0 {
        return Err(Error::Lowering("device has no ZX interaction to build a CX from".into()));
    }
    let amp = cfg.command_amplitude(FRAC_PI_8 / (rate * cr_effective_time(cfg, cfg.cx_cr_duration)));
    if amp.abs() > cfg.amp_max {
        return Err(Error::Lowering(format!(
            "CX needs CR amplitude {amp:.3} above amp_max {}; lengthen cx_cr_duration",
            cfg.amp_max
        )));
    }
    Ok(amp)
}

fn check_qubits(op: &GateOp, cfg: &DeviceConfig) -> Result<()> {
    if op.qubits.len() != op.gate.arity() {
        return Err(Error::Lowering(format!("{} takes {} qubit(s)", op.gate, op.gate.arity())));
    }
    if let Some(q) = op.qubits.iter().find(|&&q| q >= cfg.n_qubits) {
        return Err(Error::Validation(format!("qubit {q} is not on the {}-qubit device", cfg.n_qubits)));
    }
    if op.gate.arity() == 2 {
        let (a, b) = (op.qubits[0], op.qubits[1]);
        if a == b || !cfg.is_edge(a, b) {
            return Err(Error::Topology(a, b));
        }
    }
    Ok(())
}

fn rx_pulse(s: &mut PulseSchedule, q: usize, theta: f64, cfg: &DeviceConfig) -> Result<()> {
    let d = cfg.rx_gate_duration;
    s.play(Channel::drive(q), drag_envelope(cfg, d, rotation_amplitude(cfg, d, theta)))?;
    Ok(())
}

fn virtual_z(s: &mut PulseSchedule, q: usize, theta: f64, cfg: &DeviceConfig) -> Result<()> {
    s.shift_phase(Channel::drive(q), theta)?;
    // control lines that oscillate in this qubit's frame follow it
    for (a, b) in cfg.edges() {
        for (c, t) in [(a, b), (b, a)] {
            if t == q {
                s.shift_phase(Channel::control(c, t), theta)?;
            }
        }
    }
    Ok(())
}

fn ry_pulse(s: &mut PulseSchedule, q: usize, theta: f64, cfg: &DeviceConfig) -> Result<()> {
    s.shift_phase(Channel::drive(q), -FRAC_PI_2)?;
    rx_pulse(s, q, theta, cfg)?;
    s.shift_phase(Channel::drive(q), FRAC_PI_2)?;
    Ok(())
}

fn hadamard(s: &mut PulseSchedule, q: usize, cfg: &DeviceConfig) -> Result<()> {
    // H = X · RY(π/2) up to phase
    ry_pulse(s, q, FRAC_PI_2, cfg)?;
    rx_pulse(s, q, PI, cfg)
}

fn cnot(s: &mut PulseSchedule, c: usize, t: usize, cfg: &DeviceConfig) -> Result<()> {
    let amp = cx_half_amplitude(cfg)?;
    let angle = cfg.cr_rates.zx_alignment_angle();
    let ch = Channel::control(c, t);
    let pi_amp = 2.0 * calibrate_pi_half(cfg, cfg.snp_duration);
    let x_c = drag_envelope(cfg, cfg.snp_duration, cfg.command_amplitude(pi_amp));
    // echoed ZX(π/2): CR(+) · Xπ · CR(−) · Xπ
    s.play(ch, cr_envelope(cfg, cfg.cx_cr_duration, amp).with_angle(angle))?;
    s.play(Channel::drive(c), x_c.clone())?;
    s.play(ch, cr_envelope(cfg, cfg.cx_cr_duration, -amp).with_angle(angle))?;
    s.play(Channel::drive(c), x_c)?;
    // CNOT ∝ RZ_c(−π/2) · RX_t(−π/2) · ZX(π/2)
    let rx_amp = rotation_amplitude(cfg, cfg.snp_duration, -FRAC_PI_2);
    s.play(Channel::drive(t), drag_envelope(cfg, cfg.snp_duration, rx_amp))?;
    virtual_z(s, c, -FRAC_PI_2, cfg)
}

/// Lowers one gate onto `s`, as early as its qubits allow.
pub fn lower_onto(s: &mut PulseSchedule, op: &GateOp, cfg: &DeviceConfig) -> Result<()> {
    check_qubits(op, cfg)?;
    let q = op.qubits[0];
    match op.gate {
        Gate::RX(theta) => rx_pulse(s, q, theta, cfg),
        Gate::RY(theta) => ry_pulse(s, q, theta, cfg),
        Gate::RZ(theta) => virtual_z(s, q, theta, cfg),
        Gate::X => rx_pulse(s, q, PI, cfg),
        Gate::H => hadamard(s, q, cfg),
        Gate::CX => cnot(s, q, op.qubits[1], cfg),
        Gate::CZ => {
            let t = op.qubits[1];
            hadamard(s, t, cfg)?;
            cnot(s, q, t, cfg)?;
            hadamard(s, t, cfg)
        }
    }
}

/// Pulse schedule implementing `gate` on `qubits`.
pub fn lower_gate(gate: Gate, qubits: &[usize], cfg: &DeviceConfig) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(cfg.n_qubits);
    lower_onto(
        &mut s,
        &GateOp {
            gate,
            qubits: qubits.to_vec(),
        },
        cfg,
    )?;
    Ok(s)
}

/// Lowers a gate sequence in order.
pub fn lower_circuit(ops: &[GateOp], cfg: &DeviceConfig) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(cfg.n_qubits);
    for op in ops {
        lower_onto(&mut s, op, cfg)?;
    }
    Ok(s)
}
