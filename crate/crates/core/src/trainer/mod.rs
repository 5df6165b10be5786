//! Progressive native-pulse ansatz training.
//!
//! A run starts from an empty genome and repeatedly appends a layer of
//! zero-amplitude pulses, trains only the new layer's parameters and then
//! freezes them. Because a zero-amplitude pulse is the identity, each step
//! starts from the previous step's best energy.

mod baseline;
mod genome;
mod progressive;
mod runlog;

pub use baseline::{build_gate_baseline, train_baseline, BaselineKind, GateAnsatz, GateSlot};
pub use genome::{grow, prune, AnsatzGenome, Block, GenomeParam, GrowthPolicy, LayerKind, PulseSlot, PulseTarget};
pub use progressive::{
    run_progressive, train_step, EnergyObjective, PruneRecord, RunRecord, StepRecord, Task, TrainSettings,
};
pub use runlog::{run_stem, write_runlog};
