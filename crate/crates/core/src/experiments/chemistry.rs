//! VQE runs, detuning sweeps and dissociation curves.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{write_csv, write_json, Check, Outcome};
use crate::error::{Error, Result};
use crate::problems::{load_graph, load_molecule, maxcut_to_ising};
use crate::pulse::ParamKind;
use crate::trainer::{
    build_gate_baseline, grow, run_progressive, train_baseline, write_runlog, AnsatzGenome, EnergyObjective, RunRecord,
    Task,
};

fn stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("task").to_string()
}

/// Reads a molecule or a graph (by its `.graph` extension) as a task named
/// after the file.
pub fn load_task(path: &Path) -> Result<Task> {
    if path.extension().is_some_and(|e| e == "graph") {
        let g = load_graph(path)?;
        return Ok(Task {
            id: stem(path),
            hamiltonian: maxcut_to_ising(&g)?,
            reference: Some(-(g.max_cut()?.0 as f64)),
        });
    }
    let m = load_molecule(path, true)?;
    Ok(Task {
        id: stem(path),
        hamiltonian: m.hamiltonian,
        reference: Some(m.fci_reference),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeRun {
    pub record: RunRecord,
    /// Trained genome of a pulse run.
    pub genome: Option<AnsatzGenome>,
    /// Trained angles of a gate baseline run.
    pub angles: Option<Vec<f64>>,
}

fn vqe_one(cfg: &ExperimentConfig, task: &Task, seed: u64) -> Result<VqeRun> {
    let device = cfg.device_or_line(task.hamiltonian.n_qubits())?;
    let settings = cfg.train_settings();
    match cfg.ansatz.baseline() {
        None => {
            let (g, record) = run_progressive(task, &device, &settings, seed)?;
            Ok(VqeRun {
                record,
                genome: Some(g),
                angles: None,
            })
        }
        Some(kind) => {
            let a = build_gate_baseline(kind, task.hamiltonian.n_qubits(), cfg.baseline_layers, &device)?;
            let mut t = task.clone();
            t.id = format!("{}-{kind}", task.id);
            let (x, record) = train_baseline(&a, &t, &device, &settings, seed)?;
            Ok(VqeRun {
                record,
                genome: None,
                angles: Some(x),
            })
        }
    }
}

/// One run per configured seed, spread over the worker pool.
pub fn vqe(cfg: &ExperimentConfig) -> Result<Vec<VqeRun>> {
    cfg.validate()?;
    let task = load_task(cfg.task_path()?)?;
    cfg.thread_pool()?
        .install(|| cfg.seeds.par_iter().map(|&s| vqe_one(cfg, &task, s)).collect())
}

pub fn cmd_vqe(cfg: &ExperimentConfig) -> Result<Outcome> {
    let runs = vqe(cfg)?;
    let hash = cfg.hash();
    let mut out = Outcome::default();
    for r in &runs {
        let (log, summary) = write_runlog(&cfg.output_dir, &r.record, &hash)?;
        out.files.extend([log, summary]);
        let rec = &r.record;
        println!(
            "{}\tseed {}\tenergy {:.6}\taccuracy {}\tduration {:.1} ns\tsnp {}\tcr {}",
            rec.task,
            rec.seed,
            rec.best_energy,
            rec.accuracy.map_or("-".into(), |a| format!("{:.4}%", 100.0 * a)),
            rec.duration_ns,
            rec.snp_count,
            rec.cr_count
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub detuning_hz: f64,
    pub energy: f64,
}

/// `points` values evenly spaced over `[−range, range]`; a single point is 0.
pub fn detuning_grid(range: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        n => (0..n).map(|k| -range + 2.0 * range * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Sweeps one detuning of a trained (or zero) ansatz. Returns the swept
/// parameter's name and the energies.
pub fn detuning_scan(cfg: &ExperimentConfig) -> Result<(String, Vec<ScanRow>)> {
    cfg.validate()?;
    let task = load_task(cfg.task_path()?)?;
    let device = cfg.device_or_line(task.hamiltonian.n_qubits())?;
    let seed = cfg.seeds[0];
    let g = if cfg.scan.train {
        run_progressive(&task, &device, &cfg.train_settings(), seed)?.0
    } else {
        grow(&AnsatzGenome::new(device.n_qubits), &cfg.policy, &device)?
    };
    let name = match &cfg.scan.parameter {
        Some(n) => n.clone(),
        None => g
            .blocks
            .last()
            .and_then(|b| b.pulses.first())
            .map(|p| g.params[p.detuning].name.clone())
            .ok_or_else(|| Error::Validation("the ansatz has no pulses to detune".into()))?,
    };
    let idx = g
        .params
        .iter()
        .position(|p| p.name == name && p.kind == ParamKind::Detuning)
        .ok_or_else(|| Error::Validation(format!("`{name}` is not a detuning parameter of the ansatz")))?;
    let mut est = cfg.estimator;
    est.seed = seed;
    let objective = EnergyObjective::new(&task.hamiltonian, &device, cfg.sim(), est);
    let rows = detuning_grid(cfg.scan.range_hz, cfg.scan.points)
        .into_iter()
        .map(|d| {
            let mut v = g.values();
            v[idx] = d;
            Ok(ScanRow {
                detuning_hz: d,
                energy: objective.energy(&g.render_values(&device, &v)?)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, rows))
}

pub fn cmd_scan_detuning(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (name, rows) = detuning_scan(cfg)?;
    let seed = cfg.seeds[0];
    let task = stem(cfg.task_path()?);
    let file = write_csv(&cfg.output_dir, &format!("scan_{task}_{seed}.csv"), &cfg.hash(), seed, &rows)?;
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.energy), b.max(r.energy)));
    let spread = hi - lo;
    println!("{task}\tswept {name}\tspread {spread:.6} Ha over {} points", rows.len());
    let mut out = Outcome {
        files: vec![file],
        ..Default::default()
    };
    if let Some(min) = cfg.scan.min_spread {
        out.checks.push(Check::new(
            "energy spread",
            spread >= min,
            format!("spread {spread:.4e} Ha, required {min:.4e}"),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissociationRow {
    pub bond_length: f64,
    pub vqe_energy: f64,
    pub fci_energy: f64,
    pub accuracy: f64,
}

/// Pulse VQE at every geometry that exists; missing files are skipped
/// with a warning.
pub fn dissociation(cfg: &ExperimentConfig) -> Result<Vec<DissociationRow>> {
    cfg.validate()?;
    let (present, missing): (Vec<_>, Vec<_>) = cfg.geometries.iter().partition(|p| p.exists());
    for p in &missing {
        log::warn!("skipping missing geometry {}", p.display());
    }
    if present.is_empty() {
        let shown = missing.first().map_or_else(|| Path::new("<none>").to_path_buf(), |p| p.to_path_buf());
        return Err(Error::io(
            shown,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no geometry file was found"),
        ));
    }
    let seed = cfg.seeds[0];
    let mut pulse = cfg.clone();
    pulse.ansatz = super::AnsatzChoice::Pulse;
    let mut rows = cfg.thread_pool()?.install(|| {
        present
            .par_iter()
            .map(|p| {
                let m = load_molecule(p, true)?;
                let task = Task {
                    id: stem(p),
                    hamiltonian: m.hamiltonian,
                    reference: Some(m.fci_reference),
                };
                let run = vqe_one(&pulse, &task, seed)?;
                Ok(DissociationRow {
                    bond_length: m.bond_length,
                    vqe_energy: run.record.best_energy,
                    fci_energy: m.fci_reference,
                    accuracy: task.accuracy(run.record.best_energy).unwrap_or(f64::NAN),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| a.bond_length.total_cmp(&b.bond_length));
    Ok(rows)
}

pub fn cmd_dissociation(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rows = dissociation(cfg)?;
    let seed = cfg.seeds[0];
    let file = write_csv(&cfg.output_dir, "dissociation.csv", &cfg.hash(), seed, &rows)?;
    for r in &rows {
        println!("{:.3}\t{:.6}\t{:.6}\t{:.4}%", r.bond_length, r.vqe_energy, r.fci_energy, 100.0 * r.accuracy);
    }
    // the variational energy can never fall below the exact ground energy
    let below: Vec<f64> = rows.iter().filter(|r| r.vqe_energy < r.fci_energy - 1e-6).map(|r| r.bond_length).collect();
    let best = rows.iter().min_by(|a, b| a.vqe_energy.total_cmp(&b.vqe_energy)).expect("at least one row");
    #[derive(Serialize)]
    struct Summary<'a> {
        minimum: &'a DissociationRow,
        rows: usize,
    }
    let summary = write_json(&cfg.output_dir, "dissociation.summary.json", &cfg.hash(), seed, &Summary { minimum: best, rows: rows.len() })?;
    Ok(Outcome {
        checks: vec![Check::new(
            "variational bound",
            below.is_empty(),
            format!("energies below the reference at bond lengths {below:?}"),
        )],
        files: vec![file, summary],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::GrowthPolicy;
    use std::path::PathBuf;

    fn data(p: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(detuning_grid(2e6, 1), vec![0.0]);
        let g = detuning_grid(2e6, 21);
        assert_eq!((g.len(), g[0], g[10], g[20]), (21, -2e6, 0.0, 2e6));
    }

    #[test]
    fn zero_ansatz_scan_is_flat() {
        let mut cfg = ExperimentConfig {
            task: Some(data("molecules/h2_0.75.ham")),
            ..Default::default()
        };
        cfg.scan.train = false;
        cfg.scan.points = 5;
        let (name, rows) = detuning_scan(&cfg).unwrap();
        assert_eq!(name, "s1_q0_det");
        assert!(rows.iter().all(|r| (r.energy - rows[0].energy).abs() < 1e-9));
    }

    #[test]
    fn unknown_scan_parameter() {
        let mut cfg = ExperimentConfig {
            task: Some(data("molecules/h2_0.75.ham")),
            ..Default::default()
        };
        cfg.scan.train = false;
        cfg.scan.parameter = Some("s1_q0_amp".into());
        assert!(detuning_scan(&cfg).unwrap_err().is_input_error());
    }

    #[test]
    fn short_bond_stays_above_reference() {
        let cfg = ExperimentConfig {
            geometries: vec![data("molecules/h2_0.10.ham"), data("molecules/missing.ham")],
            policy: GrowthPolicy {
                max_steps: 1,
                ..Default::default()
            },
            ..Default::default()
        };
        let rows = dissociation(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].vqe_energy >= rows[0].fci_energy - 1e-9);
        assert!((rows[0].fci_energy - 2.710).abs() < 1e-3);
    }

    #[test]
    fn all_geometries_missing() {
        let cfg = ExperimentConfig {
            geometries: vec![data("molecules/missing.ham")],
            ..Default::default()
        };
        assert!(dissociation(&cfg).unwrap_err().is_input_error());
    }
}
