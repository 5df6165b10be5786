// Pulse VQE across three HeH+ bond lengths.

use pulseforge::experiments::{dissociation, DissociationRow, ExperimentConfig};

pub fn run_example() -> pulseforge::Result<Vec<DissociationRow>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules");
    let cfg = ExperimentConfig {
        geometries: ["heh_plus_0.775.ham", "heh_plus_0.900.ham", "heh_plus_1.500.ham"]
            .iter()
            .map(|f| std::path::Path::new(dir).join(f))
            .collect(),
        ..Default::default()
    };
    dissociation(&cfg)
}

fn main() -> pulseforge::Result<()> {
    println!("bond_length  vqe_energy  fci_energy  accuracy");
    for r in run_example()? {
        println!("{:>11.3}  {:>10.6}  {:>10.6}  {:>7.3}%", r.bond_length, r.vqe_energy, r.fci_energy, 100.0 * r.accuracy);
    }
    Ok(())
}
