//! Sampling the Weyl chamber reached by a parametric two-qubit schedule.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weyl::{weyl_coordinates, WeylPoint};
use crate::device::DeviceConfig;
use crate::dynamics::{propagate_unitary, SimOptions};
use crate::error::{Error, Result};
use crate::pulse::{cr, snp, Channel, ParamKind, PulseSchedule, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub points: Vec<WeylPoint>,
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl CoverageReport {
    /// `max - min` per coordinate.
    pub fn span(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| self.max[i] - self.min[i])
    }
}

/// Draws `n_samples` parameter vectors uniformly inside the schedule's
/// bounds and records the Weyl point of each bound propagator. Sample `i`
/// uses stream `i` of the seeded generator, so results do not depend on
/// the thread count.
pub fn coverage_scan(
    schedule: &PulseSchedule,
    cfg: &DeviceConfig,
    opts: &SimOptions,
    n_samples: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if schedule.n_qubits() != 2 {
        return Err(Error::Validation(format!(
            "coverage needs a two-qubit schedule, got {} qubits",
            schedule.n_qubits()
        )));
    }
    if n_samples == 0 {
        return Err(Error::Validation("coverage needs at least one sample".into()));
    }
    let bounds = schedule.params().bounds();
    let points = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let x: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect();
            let u = propagate_unitary(&schedule.bind(&x)?, cfg, opts)?;
            weyl_coordinates(&u)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for p in &points {
        for (i, c) in p.as_array().into_iter().enumerate() {
            min[i] = min[i].min(c);
            max[i] = max[i].max(c);
        }
    }
    Ok(CoverageReport { points, min, max })
}

/// One CR pulse on edge `(0, 1)` with free amplitude and detuning.
pub fn single_cr_schedule(cfg: &DeviceConfig) -> Result<PulseSchedule> {
    cr(0, 1, "cr_amp", "cr_det", cfg.cr_duration, cfg)
}

/// Two CR pulses around a layer of single-qubit pulses and virtual `Z`
/// rotations, all free.
pub fn multi_cr_schedule(cfg: &DeviceConfig) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::new(2);
    s.append(&cr(0, 1, "cr1_amp", "cr1_det", cfg.cr_duration, cfg)?)?;
    for q in 0..2 {
        let name = format!("q{q}_phase");
        let mut layer = PulseSchedule::new(2);
        layer.declare(name.as_str(), ParamKind::Phase, -PI, PI)?;
        layer.shift_phase(Channel::drive(q), Value::param(name))?;
        layer.append(&snp(q, format!("q{q}_amp").as_str(), format!("q{q}_det").as_str(), cfg)?)?;
        s.append(&layer)?;
    }
    s.append(&cr(0, 1, "cr2_amp", "cr2_det", cfg.cr_duration, cfg)?)?;
    Ok(s)
}
