// Drives qubit 0 with single native pulses of rising amplitude and prints
// the excited-state population.

use pulseforge::device::DeviceConfig;
use pulseforge::dynamics::{propagate, SimOptions};
use pulseforge::pulse::snp;
use pulseforge::qcore::StateVector;

/// `(amplitude, P(1))` pairs.
pub fn run_example() -> pulseforge::Result<Vec<(f64, f64)>> {
    let cfg = DeviceConfig::line(1);
    let mut out = Vec::new();
    for k in 0..=8 {
        let amp = 0.05 * k as f64;
        let s = snp(0, amp, 0.0, &cfg)?;
        let r = propagate(&s, &cfg, &SimOptions::default(), &StateVector::zero(1))?;
        out.push((amp, r.final_state.probabilities()[1]));
    }
    Ok(out)
}

fn main() -> pulseforge::Result<()> {
    for (amp, p1) in run_example()? {
        println!("amp {amp:.2}  P(1) {p1:.4}");
    }
    Ok(())
}
