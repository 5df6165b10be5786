use super::schedule::{Channel, ParamKind, PulseSchedule, Value};
use crate::device::{cr_envelope, drag_envelope, DeviceConfig};
use crate::error::{Error, Result};

fn declare_amp(s: &mut PulseSchedule, v: &Value, cfg: &DeviceConfig) -> Result<()> {
    if let Value::Param(name) = v {
        s.declare(name.clone(), ParamKind::Amplitude, 0.0, cfg.amp_max)?;
    }
    Ok(())
}

fn declare_detuning(s: &mut PulseSchedule, v: &Value, cfg: &DeviceConfig) -> Result<()> {
    if let Value::Param(name) = v {
        s.declare(name.clone(), ParamKind::Detuning, -cfg.detuning_max, cfg.detuning_max)?;
    }
    Ok(())
}

/// Single-qubit native pulse: a DRAG pulse on the qubit's drive line,
/// preceded by its oscillator detuning. Parameter references are declared
/// with the device's default bounds.
pub fn snp(qubit: usize, amp: impl Into<Value>, detuning: impl Into<Value>, cfg: &DeviceConfig) -> Result<PulseSchedule> {
    if qubit >= cfg.n_qubits {
        return Err(Error::Validation(format!("qubit {qubit} is not on the {}-qubit device", cfg.n_qubits)));
    }
    let (amp, detuning) = (amp.into(), detuning.into());
    let mut s = PulseSchedule::new(cfg.n_qubits);
    declare_amp(&mut s, &amp, cfg)?;
    declare_detuning(&mut s, &detuning, cfg)?;
    let ch = Channel::drive(qubit);
    s.set_detuning(ch, detuning)?;
    let mut env = drag_envelope(cfg, cfg.snp_duration, 0.0);
    env.amp = amp;
    s.play(ch, env)?;
    Ok(s)
}

/// Cross-resonance pulse: a flat-top pulse on the control line of
/// `(control, target)`, oscillating at the target's frequency.
pub fn cr(
    control: usize,
    target: usize,
    amp: impl Into<Value>,
    detuning: impl Into<Value>,
    duration: usize,
    cfg: &DeviceConfig,
) -> Result<PulseSchedule> {
    if control >= cfg.n_qubits || target >= cfg.n_qubits || !cfg.is_edge(control, target) {
        return Err(Error::Topology(control, target));
    }
    let (amp, detuning) = (amp.into(), detuning.into());
    let mut s = PulseSchedule::new(cfg.n_qubits);
    declare_amp(&mut s, &amp, cfg)?;
    declare_detuning(&mut s, &detuning, cfg)?;
    let ch = Channel::control(control, target);
    s.set_detuning(ch, detuning)?;
    let mut env = cr_envelope(cfg, duration, 0.0);
    env.amp = amp;
    env.validate()?;
    s.play(ch, env)?;
    Ok(s)
}

/// Critical-path length as `(samples, nanoseconds)`.
pub fn duration_of(s: &PulseSchedule, cfg: &DeviceConfig) -> (usize, f64) {
    let d = s.duration();
    (d, cfg.nanoseconds(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_like() -> DeviceConfig {
        DeviceConfig::line(2)
    }

    fn ns_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 0.1
    }

    #[test]
    fn snp_block_is_160_samples() {
        let cfg = paper_like();
        let s = snp(0, "a0", "f0", &cfg).unwrap();
        let (d, ns) = duration_of(&s, &cfg);
        assert_eq!(d, 160);
        assert!(ns_close(ns, 35.6));
        assert_eq!(s.params().len(), 2);
    }

    #[test]
    fn two_snp_layers() {
        let cfg = paper_like();
        let mut s = PulseSchedule::new(2);
        for layer in 0..2 {
            for q in 0..2 {
                s.append(&snp(q, Value::param(format!("a{layer}{q}")), 0.0, &cfg).unwrap()).unwrap();
            }
        }
        let (d, ns) = duration_of(&s, &cfg);
        assert_eq!(d, 320);
        assert!(ns_close(ns, 71.1));
    }

    #[test]
    fn cr_block_duration() {
        let cfg = paper_like();
        let s = cr(0, 1, "a", "f", 736, &cfg).unwrap();
        assert!(ns_close(duration_of(&s, &cfg).1, 163.6));
    }

    #[test]
    fn cr_then_snp_layer() {
        let cfg = paper_like();
        let mut s = cr(0, 1, "a", 0.0, 736, &cfg).unwrap();
        s.append(&snp(0, "b", 0.0, &cfg).unwrap()).unwrap();
        s.append(&snp(1, "c", 0.0, &cfg).unwrap()).unwrap();
        assert!(ns_close(duration_of(&s, &cfg).1, 199.1));
    }

    #[test]
    fn cr_off_topology_is_rejected() {
        let cfg = DeviceConfig::line(3);
        assert!(matches!(cr(0, 2, 0.1, 0.0, 736, &cfg), Err(Error::Topology(0, 2))));
    }

    #[test]
    fn snp_unknown_qubit() {
        assert!(snp(5, 0.1, 0.0, &paper_like()).is_err());
    }
}
