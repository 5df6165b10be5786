//! Run persistence: one JSON line per optimizer evaluation plus a summary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::progressive::RunRecord;
use crate::error::{Error, Result};

#[derive(Serialize)]
struct EvalLine<'a> {
    config_hash: &'a str,
    seed: u64,
    step: usize,
    eval: usize,
    params: &'a [String],
    values: &'a [f64],
    energy: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: &'a str,
    #[serde(flatten)]
    run: SummaryBody<'a>,
}

#[derive(Serialize)]
struct SummaryBody<'a> {
    task: &'a str,
    device: &'a str,
    seed: u64,
    final_energy: f64,
    reference: Option<f64>,
    accuracy: Option<f64>,
    total_duration_ns: f64,
    snp_count: usize,
    cr_count: usize,
    step_best_energies: Vec<f64>,
    step_evals: Vec<usize>,
    prune: &'a Option<super::progressive::PruneRecord>,
}

/// `<task>_<device>_<seed>`.
pub fn run_stem(record: &RunRecord) -> String {
    let clean = |s: &str| s.replace(|c: char| !(c.is_ascii_alphanumeric() || c == '.' || c == '-'), "_");
    format!("{}_{}_{}", clean(&record.task), clean(&record.device), record.seed)
}

/// Writes `<stem>.runlog` and `<stem>.summary.json` into `dir`.
pub fn write_runlog(dir: &Path, record: &RunRecord, config_hash: &str) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stem = run_stem(record);
    let log_path = dir.join(format!("{stem}.runlog"));
    let mut out = Vec::new();
    for s in &record.steps {
        for (k, (values, energy)) in s.trace.iter().enumerate() {
            let line = EvalLine {
                config_hash,
                seed: record.seed,
                step: s.step,
                eval: k,
                params: &s.appended,
                values,
                energy: *energy,
            };
            serde_json::to_writer(&mut out, &line).map_err(|e| Error::json(&log_path, e))?;
            out.push(b'\n');
        }
    }
    write_file(&log_path, &out)?;

    let summary_path = dir.join(format!("{stem}.summary.json"));
    let summary = Summary {
        config_hash,
        run: SummaryBody {
            task: &record.task,
            device: &record.device,
            seed: record.seed,
            final_energy: record.best_energy,
            reference: record.reference,
            accuracy: record.accuracy,
            total_duration_ns: record.duration_ns,
            snp_count: record.snp_count,
            cr_count: record.cr_count,
            step_best_energies: record.steps.iter().map(|s| s.best_energy).collect(),
            step_evals: record.steps.iter().map(|s| s.n_evals).collect(),
            prune: &record.prune,
        },
    };
    let mut text = serde_json::to_vec_pretty(&summary).map_err(|e| Error::json(&summary_path, e))?;
    text.push(b'\n');
    write_file(&summary_path, &text)?;
    Ok((log_path, summary_path))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::Termination;
    use crate::trainer::progressive::StepRecord;

    fn record() -> RunRecord {
        RunRecord {
            task: "h2 0.75".into(),
            device: "line2".into(),
            seed: 7,
            zero_energy: 0.0,
            steps: vec![StepRecord {
                step: 1,
                kind: "snp".into(),
                appended: vec!["a".into()],
                start_energy: 0.0,
                best_energy: -1.0,
                trace: vec![(vec![0.0], 0.0), (vec![0.4], -1.0)],
                n_evals: 2,
                duration_ns: 35.6,
                termination: Termination::MaxEvals,
            }],
            best_energy: -1.0,
            reference: Some(-1.1),
            accuracy: Some(0.9),
            duration_ns: 35.6,
            snp_count: 1,
            cr_count: 0,
            prune: None,
        }
    }

    #[test]
    fn one_line_per_evaluation() {
        let dir = std::env::temp_dir().join(format!("runlog_test_{}", std::process::id()));
        let (log, summary) = write_runlog(&dir, &record(), "abc").unwrap();
        assert!(log.ends_with("h2_0.75_line2_7.runlog"));
        let text = std::fs::read_to_string(&log).unwrap();
        assert_eq!(text.lines().count(), 2);
        let v: serde_json::Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
        assert_eq!(v["energy"], -1.0);
        assert_eq!(v["config_hash"], "abc");
        let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
        assert_eq!(s["seed"], 7);
        assert_eq!(s["snp_count"], 1);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
