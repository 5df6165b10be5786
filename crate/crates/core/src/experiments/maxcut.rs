//! Pulse ansatz against the Ry/CZ gate ansatz on a MaxCut instance.

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{write_json, Outcome};
use crate::error::Result;
use crate::problems::{approximation_ratio, best_bitstring, final_state, load_graph, maxcut_to_ising};
use crate::trainer::{build_gate_baseline, run_progressive, train_baseline, write_runlog, BaselineKind, RunRecord, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxcutResult {
    pub max_cut: usize,
    pub pulse_bitstring: String,
    pub pulse_ratio: f64,
    pub pulse_energy: f64,
    pub gate_bitstring: String,
    pub gate_ratio: f64,
    pub gate_energy: f64,
    /// `pulse_ratio − gate_ratio`.
    pub difference: f64,
    #[serde(skip)]
    pub records: Vec<RunRecord>,
}

/// Trains both ansätze on the cut observable and scores the most likely
/// outcome of each final state.
pub fn maxcut(cfg: &ExperimentConfig) -> Result<MaxcutResult> {
    cfg.validate()?;
    let path = cfg.task_path()?;
    let graph = load_graph(path)?;
    let n = graph.n_nodes();
    let max_cut = graph.max_cut()?.0;
    let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    let task = Task {
        id: id.clone(),
        hamiltonian: maxcut_to_ising(&graph)?,
        reference: Some(-(max_cut as f64)),
    };
    let device = cfg.device_or_line(n)?;
    let settings = cfg.train_settings();
    let seed = cfg.seeds[0];
    let mut est = cfg.estimator;
    est.seed = seed;

    let (g, pulse_rec) = run_progressive(&task, &device, &settings, seed)?;
    let pulse_state = final_state(&g.render_bound(&device)?, &device, &settings.sim)?;
    let pulse_bitstring = best_bitstring(&pulse_state, &est)?;

    let ansatz = build_gate_baseline(BaselineKind::TwoLocalRyCz, n, cfg.baseline_layers, &device)?;
    let gate_task = Task {
        id: format!("{id}-{}", BaselineKind::TwoLocalRyCz),
        ..task.clone()
    };
    let (angles, gate_rec) = train_baseline(&ansatz, &gate_task, &device, &settings, seed)?;
    let gate_state = final_state(&ansatz.render(&angles, &device)?, &device, &settings.sim)?;
    let gate_bitstring = best_bitstring(&gate_state, &est)?;

    let pulse_ratio = approximation_ratio(&graph, &pulse_bitstring)?;
    let gate_ratio = approximation_ratio(&graph, &gate_bitstring)?;
    Ok(MaxcutResult {
        max_cut,
        pulse_ratio,
        pulse_energy: pulse_rec.best_energy,
        pulse_bitstring,
        gate_ratio,
        gate_energy: gate_rec.best_energy,
        gate_bitstring,
        difference: pulse_ratio - gate_ratio,
        records: vec![pulse_rec, gate_rec],
    })
}

pub fn cmd_maxcut(cfg: &ExperimentConfig) -> Result<Outcome> {
    let r = maxcut(cfg)?;
    let hash = cfg.hash();
    let seed = cfg.seeds[0];
    let mut out = Outcome::default();
    for rec in &r.records {
        let (a, b) = write_runlog(&cfg.output_dir, rec, &hash)?;
        out.files.extend([a, b]);
    }
    let stem = cfg.task_path()?.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    out.files
        .push(write_json(&cfg.output_dir, &format!("maxcut_{stem}_{seed}.json"), &hash, seed, &r)?);
    println!(
        "pulse ratio {:.4} ({})\tgate ratio {:.4} ({})\tdifference {:+.4}",
        r.pulse_ratio, r.pulse_bitstring, r.gate_ratio, r.gate_bitstring, r.difference
    );
    Ok(out)
}
