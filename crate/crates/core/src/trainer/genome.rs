//! Growable native-pulse ansatz.

use serde::{Deserialize, Serialize};

use crate::device::DeviceConfig;
use crate::error::{Error, Result};
use crate::pulse::{cr, snp, ParamKind, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    /// One single-qubit native pulse per qubit.
    Snp,
    /// One cross-resonance pulse per topology edge.
    Cr,
}

/// Where a pulse acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseTarget {
    Qubit(usize),
    Edge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSlot {
    pub target: PulseTarget,
    /// Index into the genome's parameters.
    pub amp: usize,
    pub detuning: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub step: usize,
    pub kind: LayerKind,
    pub pulses: Vec<PulseSlot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeParam {
    pub name: String,
    pub kind: ParamKind,
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    /// Frozen parameters are on the fixed list; the rest are trainable.
    pub frozen: bool,
}

/// Layer schedule of a progressive run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowthPolicy {
    pub max_steps: usize,
    /// Kind of the first layer; later layers alternate.
    pub first: LayerKind,
    /// Train detunings alongside amplitudes. When off they stay at 0.
    pub train_detuning: bool,
}

impl Default for GrowthPolicy {
    fn default() -> Self {
        GrowthPolicy {
            max_steps: 2,
            first: LayerKind::Snp,
            train_detuning: true,
        }
    }
}

impl GrowthPolicy {
    /// Layer kind of 1-based `step`.
    pub fn kind_of(&self, step: usize) -> LayerKind {
        match (self.first, step % 2 == 1) {
            (k, true) => k,
            (LayerKind::Snp, false) => LayerKind::Cr,
            (LayerKind::Cr, false) => LayerKind::Snp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzGenome {
    pub n_qubits: usize,
    pub blocks: Vec<Block>,
    pub params: Vec<GenomeParam>,
}

impl AnsatzGenome {
    pub fn new(n_qubits: usize) -> Self {
        AnsatzGenome {
            n_qubits,
            blocks: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.blocks.iter().map(|b| b.step).max().unwrap_or(0)
    }

    pub fn fixed_list(&self) -> Vec<&str> {
        self.params.iter().filter(|p| p.frozen).map(|p| p.name.as_str()).collect()
    }

    pub fn partial_list(&self) -> Vec<&str> {
        self.params.iter().filter(|p| !p.frozen).map(|p| p.name.as_str()).collect()
    }

    /// Indices of the trainable parameters.
    pub fn partial_indices(&self) -> Vec<usize> {
        (0..self.params.len()).filter(|&i| !self.params[i].frozen).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.value).collect()
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn set_value(&mut self, name: &str, v: f64) -> Result<()> {
        let p = self
            .params
            .iter_mut()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Binding(format!("no parameter `{name}` in the genome")))?;
        if !(v >= p.lo && v <= p.hi) {
            return Err(Error::Bounds {
                name: name.to_string(),
                value: v,
                lo: p.lo,
                hi: p.hi,
            });
        }
        p.value = v;
        Ok(())
    }

    /// `(single-qubit, cross-resonance)` pulse counts.
    pub fn pulse_counts(&self) -> (usize, usize) {
        let mut snp_n = 0;
        let mut cr_n = 0;
        for p in self.blocks.iter().flat_map(|b| &b.pulses) {
            match p.target {
                PulseTarget::Qubit(_) => snp_n += 1,
                PulseTarget::Edge(..) => cr_n += 1,
            }
        }
        (snp_n, cr_n)
    }

    fn add_param(&mut self, name: String, kind: ParamKind, lo: f64, hi: f64, frozen: bool) -> usize {
        self.params.push(GenomeParam {
            name,
            kind,
            lo,
            hi,
            value: 0.0,
            frozen,
        });
        self.params.len() - 1
    }

    fn render_with(&self, cfg: &DeviceConfig, values: Option<&[f64]>) -> Result<PulseSchedule> {
        if cfg.n_qubits != self.n_qubits {
            return Err(Error::Validation(format!(
                "{}-qubit genome on a {}-qubit device",
                self.n_qubits, cfg.n_qubits
            )));
        }
        let mut s = PulseSchedule::new(self.n_qubits);
        for block in &self.blocks {
            for slot in &block.pulses {
                let (amp, det) = (&self.params[slot.amp], &self.params[slot.detuning]);
                let block = match values {
                    Some(v) => {
                        let (a, d) = (v[slot.amp], v[slot.detuning]);
                        match slot.target {
                            PulseTarget::Qubit(q) => snp(q, a, d, cfg)?,
                            PulseTarget::Edge(c, t) => cr(c, t, a, d, cfg.cr_duration, cfg)?,
                        }
                    }
                    None => match slot.target {
                        PulseTarget::Qubit(q) => snp(q, amp.name.as_str(), det.name.as_str(), cfg)?,
                        PulseTarget::Edge(c, t) => cr(c, t, amp.name.as_str(), det.name.as_str(), cfg.cr_duration, cfg)?,
                    },
                };
                s.append(&block)?;
            }
        }
        Ok(s)
    }

    /// Parametric schedule; its parameter space lists the genome's
    /// parameters in order.
    pub fn render(&self, cfg: &DeviceConfig) -> Result<PulseSchedule> {
        self.render_with(cfg, None)
    }

    /// Schedule bound to the current values.
    pub fn render_bound(&self, cfg: &DeviceConfig) -> Result<PulseSchedule> {
        self.render_with(cfg, Some(&self.values()))
    }

    /// Schedule bound to `values` (one per parameter).
    pub fn render_values(&self, cfg: &DeviceConfig, values: &[f64]) -> Result<PulseSchedule> {
        if values.len() != self.params.len() {
            return Err(Error::Binding(format!(
                "expected {} values, got {}",
                self.params.len(),
                values.len()
            )));
        }
        self.render_with(cfg, Some(values))
    }
}

/// Freezes the current trainable parameters and appends the next layer of
/// the policy with zero amplitudes and detunings.
pub fn grow(g: &AnsatzGenome, policy: &GrowthPolicy, cfg: &DeviceConfig) -> Result<AnsatzGenome> {
    let done = g.steps();
    if done >= policy.max_steps {
        return Err(Error::GrowthExhausted(done));
    }
    if cfg.n_qubits != g.n_qubits {
        return Err(Error::Validation(format!(
            "{}-qubit genome on a {}-qubit device",
            g.n_qubits, cfg.n_qubits
        )));
    }
    let step = done + 1;
    let kind = policy.kind_of(step);
    let mut out = g.clone();
    out.params.iter_mut().for_each(|p| p.frozen = true);
    let targets: Vec<(PulseTarget, String)> = match kind {
        LayerKind::Snp => (0..g.n_qubits).map(|q| (PulseTarget::Qubit(q), format!("s{step}_q{q}"))).collect(),
        LayerKind::Cr => cfg
            .edges()
            .into_iter()
            .map(|(c, t)| (PulseTarget::Edge(c, t), format!("s{step}_e{c}{t}")))
            .collect(),
    };
    if targets.is_empty() {
        return Err(Error::Validation(format!("device has no targets for a {kind:?} layer")));
    }
    let mut pulses = Vec::with_capacity(targets.len());
    for (target, stem) in targets {
        let amp = out.add_param(format!("{stem}_amp"), ParamKind::Amplitude, 0.0, cfg.amp_max, false);
        let detuning = out.add_param(
            format!("{stem}_det"),
            ParamKind::Detuning,
            -cfg.detuning_max,
            cfg.detuning_max,
            !policy.train_detuning,
        );
        pulses.push(PulseSlot { target, amp, detuning });
    }
    out.blocks.push(Block { step, kind, pulses });
    Ok(out)
}

/// Removes every pulse whose amplitude magnitude is at most `eps`, with its
/// parameters, and re-packs the rest.
pub fn prune(g: &AnsatzGenome, eps: f64) -> Result<AnsatzGenome> {
    if !(eps >= 0.0) {
        return Err(Error::Validation(format!("prune threshold must be non-negative, got {eps}")));
    }
    let mut keep = vec![false; g.params.len()];
    for slot in g.blocks.iter().flat_map(|b| &b.pulses) {
        if g.params[slot.amp].value.abs() > eps {
            keep[slot.amp] = true;
            keep[slot.detuning] = true;
        }
    }
    let mut remap = vec![usize::MAX; g.params.len()];
    let mut params = Vec::new();
    for (i, p) in g.params.iter().enumerate() {
        if keep[i] {
            remap[i] = params.len();
            params.push(p.clone());
        }
    }
    let blocks = g
        .blocks
        .iter()
        .map(|b| Block {
            step: b.step,
            kind: b.kind,
            pulses: b
                .pulses
                .iter()
                .filter(|s| keep[s.amp])
                .map(|s| PulseSlot {
                    target: s.target,
                    amp: remap[s.amp],
                    detuning: remap[s.detuning],
                })
                .collect(),
        })
        .filter(|b| !b.pulses.is_empty())
        .collect();
    Ok(AnsatzGenome {
        n_qubits: g.n_qubits,
        blocks,
        params,
    })
}
