//! Experiment commands behind the `pulseforge` binary.
//!
//! Each command has a pure computation returning typed results and a
//! `cmd_*` wrapper that writes CSV/JSON outputs and reports checks. Every
//! output file starts with the config hash and seed.

mod chemistry;
mod config;
mod hardware;
mod maxcut;
mod report;

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub use chemistry::{
    cmd_dissociation, cmd_scan_detuning, cmd_vqe, detuning_grid, detuning_scan, dissociation, load_task, vqe,
    DissociationRow, ScanRow, VqeRun,
};
pub use config::{
    AnsatzChoice, ExperimentConfig, ScanConfig, TomographyConfig, VerifyConfig, WeylBuilder, WeylConfig,
};
pub use hardware::{
    cmd_lower, cmd_tomography, cmd_verify, cmd_weyl, lower, verify_schedule, verify_sweep, weyl_scan, LowerResult,
    VerifyRow,
};
pub use maxcut::{cmd_maxcut, maxcut, MaxcutResult};
pub use report::{cmd_report, report_rows, ReportRow};

/// A pass/fail check asserted by a command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// Process exit code for a command result: input errors map to 2.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(e) if e.is_input_error() => 2,
        Err(_) => 1,
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, File)> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, f))
}

/// Writes serializable rows as CSV under a `# config_hash, seed` line.
pub(crate) fn write_csv<T: Serialize>(dir: &Path, name: &str, hash: &str, seed: u64, rows: &[T]) -> Result<PathBuf> {
    let (path, mut f) = create(dir, name)?;
    writeln!(f, "# config_hash: {hash}, seed: {seed}").map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::io(&path, std::io::Error::other(e.to_string())))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[derive(Serialize)]
struct Stamped<'a, T> {
    config_hash: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: &'a T,
}

/// Writes pretty JSON with the config hash and seed merged in.
pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, hash: &str, seed: u64, body: &T) -> Result<PathBuf> {
    let (path, mut f) = create(dir, name)?;
    let stamped = Stamped {
        config_hash: hash,
        seed,
        body,
    };
    serde_json::to_writer_pretty(&mut f, &stamped).map_err(|e| Error::json(&path, e))?;
    writeln!(f).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Reads back a CSV written by [`write_csv`].
pub fn read_csv<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let path = path.as_ref();
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}
