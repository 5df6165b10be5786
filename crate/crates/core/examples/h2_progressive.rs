// Progressive pulse VQE on H2 at 0.75 Å: a single-qubit layer, then a
// cross-resonance layer, each trained with the earlier one frozen.

use pulseforge::device::DeviceConfig;
use pulseforge::problems::load_molecule;
use pulseforge::trainer::{run_progressive, RunRecord, Task, TrainSettings};

pub fn run_example() -> pulseforge::Result<RunRecord> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules/h2_0.75.ham");
    let m = load_molecule(path, true)?;
    let task = Task {
        id: "h2".into(),
        hamiltonian: m.hamiltonian,
        reference: Some(m.fci_reference),
    };
    let settings = TrainSettings {
        stop_epsilon: 0.0,
        ..Default::default()
    };
    Ok(run_progressive(&task, &DeviceConfig::line(2), &settings, 0)?.1)
}

fn main() -> pulseforge::Result<()> {
    let r = run_example()?;
    println!("empty ansatz {:.6} Ha", r.zero_energy);
    for s in &r.steps {
        println!(
            "step {} ({}): {:.6} -> {:.6} Ha in {} evaluations, {:.1} ns",
            s.step, s.kind, s.start_energy, s.best_energy, s.n_evals, s.duration_ns
        );
    }
    println!("reference {:.6} Ha, accuracy {:.3}%", r.reference.unwrap_or(f64::NAN), 100.0 * r.accuracy.unwrap_or(f64::NAN));
    Ok(())
}
