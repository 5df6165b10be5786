use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::envelope::Envelope;
use crate::error::{Error, Result};

/// A numeric field that is either fixed or a reference to a named parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Fixed(f64),
    Param(String),
}

impl Value {
    pub fn param(name: impl Into<String>) -> Self {
        Value::Param(name.into())
    }

    pub fn fixed(&self) -> Option<f64> {
        match self {
            Value::Fixed(v) => Some(*v),
            Value::Param(_) => None,
        }
    }

    fn resolve(&self, values: &BTreeMap<&str, f64>) -> Result<Value> {
        match self {
            Value::Fixed(v) => Ok(Value::Fixed(*v)),
            Value::Param(name) => values
                .get(name.as_str())
                .map(|&v| Value::Fixed(v))
                .ok_or_else(|| Error::Binding(format!("parameter `{name}` is not in the parameter space"))),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Fixed(v)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Param(s.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Fixed(v) => write!(f, "{v}"),
            Value::Param(n) => write!(f, "{n}"),
        }
    }
}

/// Signal line: a qubit's drive, or the control line that drives `control`
/// at the frequency of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Channel {
    Drive { qubit: usize },
    Control { control: usize, target: usize },
}

impl Channel {
    pub fn drive(qubit: usize) -> Self {
        Channel::Drive { qubit }
    }

    pub fn control(control: usize, target: usize) -> Self {
        Channel::Control { control, target }
    }

    /// Qubits whose time line this channel occupies.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Channel::Drive { qubit } => vec![qubit],
            Channel::Control { control, target } => vec![control, target],
        }
    }

    /// Qubit whose frequency sets the channel's oscillator.
    pub fn frame_qubit(&self) -> usize {
        match *self {
            Channel::Drive { qubit } => qubit,
            Channel::Control { target, .. } => target,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Drive { qubit } => write!(f, "d{qubit}"),
            Channel::Control { control, target } => write!(f, "u{control}_{target}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Play { channel: Channel, envelope: Envelope },
    /// Adds a phase (radians) to every later pulse on the channel.
    ShiftPhase { channel: Channel, phase: Value },
    /// Offsets the channel oscillator (Hz) from here until changed.
    SetDetuning { channel: Channel, detuning: Value },
    Delay { channel: Channel, duration: usize },
    Barrier { channels: Vec<Channel> },
}

impl Op {
    pub fn duration(&self) -> usize {
        match self {
            Op::Play { envelope, .. } => envelope.duration,
            Op::Delay { duration, .. } => *duration,
            _ => 0,
        }
    }

    pub fn channels(&self) -> Vec<Channel> {
        match self {
            Op::Play { channel, .. }
            | Op::ShiftPhase { channel, .. }
            | Op::SetDetuning { channel, .. }
            | Op::Delay { channel, .. } => vec![*channel],
            Op::Barrier { channels } => channels.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub start: usize,
    #[serde(flatten)]
    pub op: Op,
}

impl Instruction {
    pub fn end(&self) -> usize {
        self.start + self.op.duration()
    }

    fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.op.channels().iter().flat_map(|c| c.qubits()).collect();
        q.sort_unstable();
        q.dedup();
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    Amplitude,
    Detuning,
    Phase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub lo: f64,
    pub hi: f64,
}

/// Ordered, uniquely named parameters with box bounds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSpace {
    entries: Vec<ParamSpec>,
}

impl ParamSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, kind: ParamKind, lo: f64, hi: f64) -> Result<()> {
        let name = name.into();
        if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Validation(format!("invalid bounds [{lo}, {hi}] for `{name}`")));
        }
        if let Some(existing) = self.entries.iter().find(|e| e.name == name) {
            if existing.kind == kind && existing.lo == lo && existing.hi == hi {
                return Ok(());
            }
            return Err(Error::Validation(format!("parameter `{name}` registered twice with different specs")));
        }
        self.entries.push(ParamSpec { name, kind, lo, hi });
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ParamSpec] {
        &self.entries
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.lo, e.hi)).collect()
    }

    fn merge(&mut self, other: &ParamSpace) -> Result<()> {
        for e in &other.entries {
            self.add(e.name.clone(), e.kind, e.lo, e.hi)?;
        }
        Ok(())
    }

    /// Checks `values` against the bounds and returns a name lookup.
    fn check<'a>(&'a self, values: &[f64]) -> Result<BTreeMap<&'a str, f64>> {
        if values.len() != self.entries.len() {
            return Err(Error::Binding(format!(
                "expected {} parameter values, got {}",
                self.entries.len(),
                values.len()
            )));
        }
        let mut map = BTreeMap::new();
        for (e, &v) in self.entries.iter().zip(values) {
            if !(v >= e.lo && v <= e.hi) {
                return Err(Error::Bounds {
                    name: e.name.clone(),
                    value: v,
                    lo: e.lo,
                    hi: e.hi,
                });
            }
            map.insert(e.name.as_str(), v);
        }
        Ok(map)
    }
}

/// Timed list of pulse instructions over `n_qubits` qubits.
///
/// Composition is as-soon-as-possible per qubit: an appended block slides
/// left until it touches the latest instruction or barrier on one of the
/// qubits it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    n_qubits: usize,
    instructions: Vec<Instruction>,
    params: ParamSpace,
}

impl PulseSchedule {
    pub fn new(n_qubits: usize) -> Self {
        PulseSchedule {
            n_qubits,
            instructions: Vec::new(),
            params: ParamSpace::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn params(&self) -> &ParamSpace {
        &self.params
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Critical-path length in samples.
    pub fn duration(&self) -> usize {
        self.instructions.iter().map(Instruction::end).max().unwrap_or(0)
    }

    /// End of the latest instruction or barrier touching `qubit`.
    pub fn qubit_end(&self, qubit: usize) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.qubits().contains(&qubit))
            .map(Instruction::end)
            .max()
            .unwrap_or(0)
    }

    fn qubit_start(&self, qubit: usize) -> Option<usize> {
        self.instructions
            .iter()
            .filter(|i| i.qubits().contains(&qubit))
            .map(|i| i.start)
            .min()
    }

    fn check_channel(&self, ch: &Channel) -> Result<()> {
        if let Some(&q) = ch.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::Validation(format!(
                "channel {ch} references qubit {q} on a {}-qubit schedule",
                self.n_qubits
            )));
        }
        if let Channel::Control { control, target } = ch {
            if control == target {
                return Err(Error::Validation(format!("control channel {ch} needs two distinct qubits")));
            }
        }
        Ok(())
    }

    /// Inserts an instruction at an explicit time, enforcing per-channel
    /// non-overlap of timed instructions.
    pub fn insert(&mut self, inst: Instruction) -> Result<()> {
        for ch in inst.op.channels() {
            self.check_channel(&ch)?;
        }
        if let Op::Play { envelope, .. } = &inst.op {
            envelope.validate()?;
        }
        if inst.op.duration() > 0 {
            let chans = inst.op.channels();
            for other in &self.instructions {
                if other.op.duration() == 0 {
                    continue;
                }
                let shared = other.op.channels().iter().any(|c| chans.contains(c));
                if shared && other.start < inst.end() && inst.start < other.end() {
                    return Err(Error::Validation(format!(
                        "instruction at {} overlaps another on {}",
                        inst.start, chans[0]
                    )));
                }
            }
        }
        let pos = self.instructions.partition_point(|i| i.start <= inst.start);
        self.instructions.insert(pos, inst);
        Ok(())
    }

    /// Places `op` at the earliest time allowed by its qubits.
    pub fn push(&mut self, op: Op) -> Result<usize> {
        let start = op
            .channels()
            .iter()
            .flat_map(|c| c.qubits())
            .map(|q| self.qubit_end(q))
            .max()
            .unwrap_or(0);
        self.insert(Instruction { start, op })?;
        Ok(start)
    }

    pub fn play(&mut self, channel: Channel, envelope: Envelope) -> Result<usize> {
        self.push(Op::Play { channel, envelope })
    }

    pub fn shift_phase(&mut self, channel: Channel, phase: impl Into<Value>) -> Result<usize> {
        self.push(Op::ShiftPhase {
            channel,
            phase: phase.into(),
        })
    }

    pub fn set_detuning(&mut self, channel: Channel, detuning: impl Into<Value>) -> Result<usize> {
        self.push(Op::SetDetuning {
            channel,
            detuning: detuning.into(),
        })
    }

    pub fn delay(&mut self, channel: Channel, duration: usize) -> Result<usize> {
        self.push(Op::Delay { channel, duration })
    }

    /// Aligns every qubit to the current critical path.
    pub fn barrier(&mut self) {
        let t = self.duration();
        let channels = (0..self.n_qubits).map(Channel::drive).collect();
        self.instructions.push(Instruction {
            start: t,
            op: Op::Barrier { channels },
        });
    }

    /// Appends `block` as a rigid unit, as early as its qubits allow.
    pub fn append(&mut self, block: &PulseSchedule) -> Result<()> {
        if block.n_qubits > self.n_qubits {
            return Err(Error::Validation(format!(
                "cannot append a {}-qubit block to a {}-qubit schedule",
                block.n_qubits, self.n_qubits
            )));
        }
        let offset = (0..block.n_qubits)
            .filter_map(|q| block.qubit_start(q).map(|s| self.qubit_end(q).saturating_sub(s)))
            .max()
            .unwrap_or(0);
        self.append_at(block, offset)
    }

    /// Appends `block` after everything already scheduled.
    pub fn append_sequential(&mut self, block: &PulseSchedule) -> Result<()> {
        self.barrier();
        self.append(block)
    }

    fn append_at(&mut self, block: &PulseSchedule, offset: usize) -> Result<()> {
        self.params.merge(&block.params)?;
        for inst in &block.instructions {
            let mut inst = inst.clone();
            inst.start += offset;
            self.insert(inst)?;
        }
        Ok(())
    }

    /// Registers a parameter on this schedule.
    pub fn declare(&mut self, name: impl Into<String>, kind: ParamKind, lo: f64, hi: f64) -> Result<()> {
        self.params.add(name, kind, lo, hi)
    }

    pub fn is_bound(&self) -> bool {
        self.params.is_empty()
            && self.instructions.iter().all(|i| match &i.op {
                Op::Play { envelope, .. } => envelope.amp.fixed().is_some(),
                Op::ShiftPhase { phase, .. } => phase.fixed().is_some(),
                Op::SetDetuning { detuning, .. } => detuning.fixed().is_some(),
                _ => true,
            })
    }

    /// Substitutes `values` (in parameter-space order) for every reference.
    pub fn bind(&self, values: &[f64]) -> Result<PulseSchedule> {
        let lookup = self.params.check(values)?;
        let mut instructions = self.instructions.clone();
        for inst in &mut instructions {
            match &mut inst.op {
                Op::Play { envelope, .. } => envelope.amp = envelope.amp.resolve(&lookup)?,
                Op::ShiftPhase { phase, .. } => *phase = phase.resolve(&lookup)?,
                Op::SetDetuning { detuning, .. } => *detuning = detuning.resolve(&lookup)?,
                _ => {}
            }
        }
        Ok(PulseSchedule {
            n_qubits: self.n_qubits,
            instructions,
            params: ParamSpace::new(),
        })
    }

    /// Drops instructions matching `remove`, then re-packs the survivors
    /// as early as possible in their original order.
    pub fn relayout(&self, mut remove: impl FnMut(&Instruction) -> bool) -> Result<PulseSchedule> {
        let mut out = PulseSchedule::new(self.n_qubits);
        out.params = self.params.clone();
        for inst in &self.instructions {
            if remove(inst) {
                continue;
            }
            match &inst.op {
                Op::Barrier { .. } => out.barrier(),
                op => {
                    out.push(op.clone())?;
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: PulseSchedule = serde_json::from_str(text)
            .map_err(|e| Error::Validation(format!("invalid schedule JSON: {e}")))?;
        let mut check = PulseSchedule::new(s.n_qubits);
        check.params = s.params.clone();
        for i in &s.instructions {
            check.insert(i.clone())?;
        }
        Ok(check)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pulse(d: usize, amp: impl Into<Value>) -> Envelope {
        Envelope::drag(d, d as f64 / 4.0, 0.0, amp)
    }

    #[test]
    fn disjoint_channels_run_in_parallel() {
        let mut s = PulseSchedule::new(2);
        s.play(Channel::drive(0), pulse(160, 0.1)).unwrap();
        s.play(Channel::drive(1), pulse(160, 0.1)).unwrap();
        assert_eq!(s.duration(), 160);
        s.play(Channel::drive(0), pulse(160, 0.1)).unwrap();
        assert_eq!(s.duration(), 320);
    }

    #[test]
    fn control_channel_waits_for_both_qubits() {
        let mut s = PulseSchedule::new(2);
        s.play(Channel::drive(1), pulse(160, 0.1)).unwrap();
        let t = s.play(Channel::control(0, 1), Envelope::gaussian_square(736, 64.0, 480, 0.1)).unwrap();
        assert_eq!(t, 160);
        assert_eq!(s.duration(), 896);
    }

    #[test]
    fn overlap_on_a_channel_is_rejected() {
        let mut s = PulseSchedule::new(1);
        s.play(Channel::drive(0), pulse(100, 0.1)).unwrap();
        let r = s.insert(Instruction {
            start: 50,
            op: Op::Play {
                channel: Channel::drive(0),
                envelope: pulse(100, 0.1),
            },
        });
        assert!(r.is_err());
    }

    #[test]
    fn barrier_serializes_blocks() {
        let mut a = PulseSchedule::new(2);
        a.play(Channel::drive(0), pulse(160, 0.1)).unwrap();
        let mut b = PulseSchedule::new(2);
        b.play(Channel::drive(1), pulse(160, 0.1)).unwrap();
        let mut par = a.clone();
        par.append(&b).unwrap();
        assert_eq!(par.duration(), 160);
        let mut seq = a.clone();
        seq.append_sequential(&b).unwrap();
        assert_eq!(seq.duration(), 320);
    }

    #[test]
    fn bind_checks_bounds_and_keeps_duration() {
        let mut s = PulseSchedule::new(1);
        s.declare("a", ParamKind::Amplitude, 0.0, 0.4).unwrap();
        s.play(Channel::drive(0), pulse(160, Value::param("a"))).unwrap();
        assert!(!s.is_bound());
        let b = s.bind(&[0.2]).unwrap();
        assert!(b.is_bound());
        assert_eq!(b.duration(), s.duration());
        match s.bind(&[0.5]) {
            Err(Error::Bounds { name, .. }) => assert_eq!(name, "a"),
            other => panic!("expected bounds error, got {other:?}"),
        }
        assert!(matches!(s.bind(&[]), Err(Error::Binding(_))));
    }

    #[test]
    fn json_round_trip() {
        let mut s = PulseSchedule::new(2);
        s.declare("f", ParamKind::Detuning, -2e6, 2e6).unwrap();
        s.set_detuning(Channel::drive(0), Value::param("f")).unwrap();
        s.play(Channel::drive(0), pulse(160, 0.1)).unwrap();
        s.shift_phase(Channel::control(1, 0), 0.5).unwrap();
        let back = PulseSchedule::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn relayout_closes_gaps() {
        let mut s = PulseSchedule::new(1);
        s.play(Channel::drive(0), pulse(160, 0.0)).unwrap();
        s.play(Channel::drive(0), pulse(160, 0.1)).unwrap();
        let pruned = s
            .relayout(|i| matches!(&i.op, Op::Play { envelope, .. } if envelope.amp == Value::Fixed(0.0)))
            .unwrap();
        assert_eq!(pruned.duration(), 160);
        assert_eq!(pruned.instructions()[0].start, 0);
    }

    #[test]
    fn empty_schedule_has_zero_duration() {
        assert_eq!(PulseSchedule::new(3).duration(), 0);
    }
}
