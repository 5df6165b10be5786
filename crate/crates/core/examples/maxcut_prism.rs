// MaxCut on the triangular prism: pulse ansatz against a Ry/CZ circuit.

use pulseforge::experiments::{maxcut, ExperimentConfig, MaxcutResult};

pub fn run_example() -> pulseforge::Result<MaxcutResult> {
    let cfg = ExperimentConfig::load(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/configs/maxcut_prism.json"))?;
    maxcut(&cfg)
}

fn main() -> pulseforge::Result<()> {
    let r = run_example()?;
    println!("maximum cut {}", r.max_cut);
    println!("pulse {} ratio {:.4}", r.pulse_bitstring, r.pulse_ratio);
    println!("gate  {} ratio {:.4}", r.gate_bitstring, r.gate_ratio);
    println!("difference {:+.4}", r.difference);
    Ok(())
}
