// Runs the lowered CX·H·H·CX identity with every oscillator detuned and
// prints P(00) across ±2 MHz.

use pulseforge::device::DeviceConfig;
use pulseforge::dynamics::SimOptions;
use pulseforge::experiments::{verify_sweep, VerifyRow};

pub fn run_example() -> pulseforge::Result<Vec<VerifyRow>> {
    verify_sweep(&DeviceConfig::line(2), &SimOptions::default(), 2e6, 21)
}

fn main() -> pulseforge::Result<()> {
    for r in run_example()? {
        println!("{:>+9.0} Hz  P00 {:.4}  P01 {:.4}  P10 {:.4}  P11 {:.4}", r.detuning_hz, r.p00, r.p01, r.p10, r.p11);
    }
    Ok(())
}
