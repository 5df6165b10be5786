// The one-layer Ry + CX reference circuit, lowered and trained on H2.

use pulseforge::device::DeviceConfig;
use pulseforge::problems::load_molecule;
use pulseforge::trainer::{build_gate_baseline, train_baseline, BaselineKind, RunRecord, Task, TrainSettings};

pub fn run_example() -> pulseforge::Result<RunRecord> {
    let cfg = DeviceConfig::line(2);
    let m = load_molecule(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules/h2_0.75.ham"), true)?;
    let task = Task {
        id: "h2-two_gate".into(),
        hamiltonian: m.hamiltonian,
        reference: Some(m.fci_reference),
    };
    let ansatz = build_gate_baseline(BaselineKind::TwoGate, 2, 1, &cfg)?;
    Ok(train_baseline(&ansatz, &task, &cfg, &TrainSettings::default(), 0)?.1)
}

fn main() -> pulseforge::Result<()> {
    let r = run_example()?;
    println!(
        "energy {:.6} Ha, {:.1} ns, {} single-qubit and {} two-qubit gates",
        r.best_energy, r.duration_ns, r.snp_count, r.cr_count
    );
    Ok(())
}
