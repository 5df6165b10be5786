// Lowers a few gates to calibrated pulses and reports their durations.

use pulseforge::device::DeviceConfig;
use pulseforge::pulse::{duration_of, lower_gate, Gate};

/// `(gate, samples, ns)` rows.
pub fn run_example() -> pulseforge::Result<Vec<(String, usize, f64)>> {
    let cfg = DeviceConfig::line(2);
    let mut rows = Vec::new();
    for (gate, qubits) in [
        (Gate::X, vec![0]),
        (Gate::H, vec![1]),
        (Gate::RZ(0.3), vec![0]),
        (Gate::CX, vec![0, 1]),
        (Gate::CZ, vec![0, 1]),
    ] {
        let s = lower_gate(gate, &qubits, &cfg)?;
        let (samples, ns) = duration_of(&s, &cfg);
        rows.push((gate.to_string(), samples, ns));
    }
    Ok(rows)
}

fn main() -> pulseforge::Result<()> {
    for (g, samples, ns) in run_example()? {
        println!("{g:<8} {samples:>5} samples  {ns:>7.1} ns");
    }
    Ok(())
}
