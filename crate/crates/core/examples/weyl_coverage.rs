// Weyl-chamber reach of one CR pulse against two CR pulses with
// single-qubit pulses in between.

use pulseforge::analysis::{coverage_scan, multi_cr_schedule, single_cr_schedule, weyl_coordinates};
use pulseforge::device::{CRCoefficients, DeviceConfig};
use pulseforge::dynamics::{propagate_unitary, SimOptions};
use pulseforge::pulse::{lower_gate, Gate};

pub struct Coverage {
    pub cnot: [f64; 3],
    pub single_span: [f64; 3],
    pub multi_span: [f64; 3],
    pub max_c3: f64,
}

pub fn run_example() -> pulseforge::Result<Coverage> {
    let cfg = DeviceConfig::line(2);
    let opts = SimOptions::default();
    let cnot = {
        let s = lower_gate(Gate::CX, &[0, 1], &cfg)?;
        weyl_coordinates(&propagate_unitary(&s, &cfg, &opts)?)?.as_array()
    };
    let mut zx = cfg.clone();
    zx.cr_rates = CRCoefficients::from_array([2.5e7, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let single = coverage_scan(&single_cr_schedule(&cfg)?, &cfg, &opts, 100, 1)?;
    let multi = coverage_scan(&multi_cr_schedule(&zx)?, &zx, &opts, 100, 1)?;
    Ok(Coverage {
        cnot,
        single_span: single.span(),
        multi_span: multi.span(),
        max_c3: multi.max[2],
    })
}

fn main() -> pulseforge::Result<()> {
    let c = run_example()?;
    println!("lowered CX      {:.4?}", c.cnot);
    println!("single CR span  {:.4?}", c.single_span);
    println!("multi CR span   {:.4?}  max c3 {:.1e}", c.multi_span, c.max_c3);
    Ok(())
}
