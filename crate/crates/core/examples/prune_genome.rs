// Trains a three-layer H2 ansatz, then drops pulses that ended at zero
// amplitude.

use pulseforge::device::DeviceConfig;
use pulseforge::problems::load_molecule;
use pulseforge::trainer::{run_progressive, GrowthPolicy, PruneRecord, Task, TrainSettings};

pub fn run_example() -> pulseforge::Result<PruneRecord> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules/h2_0.75.ham");
    let m = load_molecule(path, true)?;
    let task = Task {
        id: "h2".into(),
        hamiltonian: m.hamiltonian,
        reference: Some(m.fci_reference),
    };
    let settings = TrainSettings {
        policy: GrowthPolicy {
            max_steps: 3,
            ..Default::default()
        },
        stop_epsilon: 0.0,
        prune_eps: Some(1e-3),
        ..Default::default()
    };
    let (_, rec) = run_progressive(&task, &DeviceConfig::line(2), &settings, 0)?;
    Ok(rec.prune.expect("pruning was requested"))
}

fn main() -> pulseforge::Result<()> {
    let p = run_example()?;
    println!(
        "removed {} pulses: {:.1} ns -> {:.1} ns, energy {:.6} -> {:.6} Ha",
        p.removed_pulses, p.duration_before_ns, p.duration_after_ns, p.energy_before, p.energy_after
    );
    Ok(())
}
