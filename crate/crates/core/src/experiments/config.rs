//! Experiment configuration: defaults, then a JSON file, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::device::{load_device, DeviceConfig};
use crate::dynamics::{Model, SimOptions};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerSettings;
use crate::problems::EstimatorConfig;
use crate::trainer::{BaselineKind, GrowthPolicy, TrainSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzChoice {
    #[default]
    Pulse,
    RealAmplitude,
    TwoLocalRyCz,
    TwoGate,
}

impl AnsatzChoice {
    pub fn baseline(self) -> Option<BaselineKind> {
        match self {
            AnsatzChoice::Pulse => None,
            AnsatzChoice::RealAmplitude => Some(BaselineKind::RealAmplitude),
            AnsatzChoice::TwoLocalRyCz => Some(BaselineKind::TwoLocalRyCz),
            AnsatzChoice::TwoGate => Some(BaselineKind::TwoGate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Genome parameter to sweep; the first detuning of the last trained
    /// layer when unset.
    pub parameter: Option<String>,
    /// Half-width of the symmetric grid, Hz.
    pub range_hz: f64,
    pub points: usize,
    /// Train the ansatz before sweeping. Off sweeps the zero ansatz.
    pub train: bool,
    /// Required max − min energy over the sweep, Hartree.
    pub min_spread: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            parameter: None,
            range_hz: 2.0e6,
            points: 21,
            train: true,
            min_spread: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub range_hz: f64,
    pub points: usize,
    /// Required `P(00)` at zero detuning.
    pub min_p00: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            range_hz: 2.0e6,
            points: 21,
            min_p00: 0.99,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeylBuilder {
    #[default]
    SingleCr,
    MultiCr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylConfig {
    pub builder: WeylBuilder,
    pub samples: usize,
}

impl Default for WeylConfig {
    fn default() -> Self {
        WeylConfig {
            builder: WeylBuilder::SingleCr,
            samples: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TomographyConfig {
    pub amp: f64,
    /// Shots per expectation value; exact expectations when unset.
    pub shots: Option<u64>,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        TomographyConfig { amp: 0.2, shots: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Molecule (`.ham`) or graph (`.graph`) file.
    pub task: Option<PathBuf>,
    /// Device JSON. A default uncoupled line device sized to the task is
    /// used when unset.
    pub device: Option<PathBuf>,
    pub model: Model,
    pub estimator: EstimatorConfig,
    pub optimizer: OptimizerSettings,
    pub policy: GrowthPolicy,
    pub stop_epsilon: f64,
    pub prune_eps: Option<f64>,
    pub ansatz: AnsatzChoice,
    pub baseline_layers: usize,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    /// Worker threads for independent runs; 0 uses every core.
    pub jobs: usize,
    pub scan: ScanConfig,
    pub verify: VerifyConfig,
    /// Geometry files for a dissociation curve.
    pub geometries: Vec<PathBuf>,
    pub weyl: WeylConfig,
    pub tomography: TomographyConfig,
    /// Gate lines such as `cx 0 1` to lower.
    pub gates: Vec<String>,
    /// Run summaries to tabulate.
    pub runlogs: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let t = TrainSettings::default();
        ExperimentConfig {
            task: None,
            device: None,
            model: Model::Effective,
            estimator: t.estimator,
            optimizer: t.optimizer,
            policy: t.policy,
            stop_epsilon: t.stop_epsilon,
            prune_eps: None,
            ansatz: AnsatzChoice::Pulse,
            baseline_layers: 1,
            seeds: vec![0],
            output_dir: PathBuf::from("out"),
            jobs: 0,
            scan: ScanConfig::default(),
            verify: VerifyConfig::default(),
            geometries: Vec::new(),
            weyl: WeylConfig::default(),
            tomography: TomographyConfig::default(),
            gates: Vec::new(),
            runlogs: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.task.as_mut().map(fix);
        cfg.device.as_mut().map(fix);
        fix(&mut cfg.output_dir);
        cfg.geometries.iter_mut().for_each(fix);
        cfg.runlogs.iter_mut().for_each(fix);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.estimator.validate()?;
        if self.seeds.is_empty() {
            return Err(Error::Validation("at least one seed is required".into()));
        }
        if self.scan.points == 0 || self.verify.points == 0 {
            return Err(Error::Validation("sweeps need at least one point".into()));
        }
        if !(self.scan.range_hz >= 0.0 && self.verify.range_hz >= 0.0) {
            return Err(Error::Validation("sweep ranges must be non-negative".into()));
        }
        for p in self.task.iter().chain(&self.device) {
            if !p.exists() {
                return Err(Error::io(p, std::io::Error::new(std::io::ErrorKind::NotFound, "file not found")));
            }
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the effective config.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("configs always serialize");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn sim(&self) -> SimOptions {
        SimOptions::with_model(self.model)
    }

    pub fn train_settings(&self) -> TrainSettings {
        TrainSettings {
            optimizer: self.optimizer,
            policy: self.policy.clone(),
            stop_epsilon: self.stop_epsilon,
            prune_eps: self.prune_eps,
            estimator: self.estimator,
            sim: self.sim(),
        }
    }

    /// The configured device, or an uncoupled line of `n_qubits`.
    pub fn device_or_line(&self, n_qubits: usize) -> Result<DeviceConfig> {
        match &self.device {
            Some(p) => load_device(p),
            None => Ok(DeviceConfig::line(n_qubits)),
        }
    }

    pub fn task_path(&self) -> Result<&Path> {
        self.task
            .as_deref()
            .ok_or_else(|| Error::Validation("this command needs a task file".into()))
    }

    pub fn thread_pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| Error::Validation(format!("cannot start {} workers: {e}", self.jobs)))
    }
}
