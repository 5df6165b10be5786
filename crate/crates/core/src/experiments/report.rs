//! Comparison table over run summaries.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::{write_csv, Outcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub run: String,
    /// Summary file the row came from.
    pub source: String,
    pub duration_ns: f64,
    pub snp_count: usize,
    pub cr_count: usize,
    pub energy: f64,
    pub accuracy: Option<f64>,
    /// Duration saved relative to the longest run, percent.
    pub duration_reduction_pct: f64,
}

#[derive(Deserialize)]
struct SummaryFile {
    task: String,
    device: String,
    seed: u64,
    final_energy: f64,
    accuracy: Option<f64>,
    total_duration_ns: f64,
    snp_count: usize,
    cr_count: usize,
}

fn read_summary(path: &Path) -> Result<SummaryFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::json(path, e))
}

/// One row per summary, in the given order.
pub fn report_rows(paths: &[impl AsRef<Path>]) -> Result<Vec<ReportRow>> {
    if paths.is_empty() {
        return Err(Error::Validation("no run summaries to report".into()));
    }
    let sums = paths
        .iter()
        .map(|p| Ok((p.as_ref(), read_summary(p.as_ref())?)))
        .collect::<Result<Vec<_>>>()?;
    let longest = sums.iter().map(|(_, s)| s.total_duration_ns).fold(0.0, f64::max);
    Ok(sums
        .into_iter()
        .map(|(path, s)| ReportRow {
            run: format!("{}_{}_{}", s.task, s.device, s.seed),
            source: path.display().to_string(),
            duration_reduction_pct: if longest > 0.0 {
                100.0 * (1.0 - s.total_duration_ns / longest)
            } else {
                0.0
            },
            duration_ns: s.total_duration_ns,
            snp_count: s.snp_count,
            cr_count: s.cr_count,
            energy: s.final_energy,
            accuracy: s.accuracy,
        })
        .collect())
}

pub fn cmd_report(cfg: &ExperimentConfig) -> Result<Outcome> {
    let rows = report_rows(&cfg.runlogs)?;
    let file = write_csv(&cfg.output_dir, "report.csv", &cfg.hash(), cfg.seeds[0], &rows)?;
    println!("source\tduration_ns\tsnp\tcr\tenergy\taccuracy\treduction");
    for r in &rows {
        println!(
            "{}\t{:.1}\t{}\t{}\t{:.6}\t{}\t{:.1}%",
            r.source,
            r.duration_ns,
            r.snp_count,
            r.cr_count,
            r.energy,
            r.accuracy.map_or("-".into(), |a| format!("{:.3}%", 100.0 * a)),
            r.duration_reduction_pct
        );
    }
    Ok(Outcome {
        checks: Vec::new(),
        files: vec![file],
    })
}
