// Exact against sampled energy of a prepared state, grouped per term and
// qubit-wise.

use pulseforge::device::DeviceConfig;
use pulseforge::dynamics::SimOptions;
use pulseforge::problems::{estimate, load_molecule, EstimatorConfig, Grouping};
use pulseforge::pulse::snp;

/// `(exact, per-term sampled, qubit-wise sampled)`.
pub fn run_example() -> pulseforge::Result<(f64, f64, f64)> {
    let cfg = DeviceConfig::line(2);
    let h = load_molecule(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/molecules/h2_0.75.ham"), true)?.hamiltonian;
    let mut s = snp(0, 0.35, 0.0, &cfg)?;
    s.append(&snp(1, 0.1, 0.0, &cfg)?)?;
    let sim = SimOptions::default();
    let exact = estimate(&s, &cfg, &sim, &h, &EstimatorConfig::exact())?;
    let per_term = estimate(&s, &cfg, &sim, &h, &EstimatorConfig::shots(20_000, 3))?;
    let qubitwise = estimate(
        &s,
        &cfg,
        &sim,
        &h,
        &EstimatorConfig {
            grouping: Grouping::Qubitwise,
            ..EstimatorConfig::shots(20_000, 3)
        },
    )?;
    Ok((exact, per_term, qubitwise))
}

fn main() -> pulseforge::Result<()> {
    let (e, p, q) = run_example()?;
    println!("exact {e:.5}  per-term {p:.5}  qubit-wise {q:.5}");
    Ok(())
}
