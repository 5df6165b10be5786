//! Device-level commands: the detuning verification circuit, Weyl
//! coverage, CR tomography and gate lowering.

use serde::{Deserialize, Serialize};

use super::chemistry::detuning_grid;
use super::config::{ExperimentConfig, WeylBuilder};
use super::{write_csv, write_json, Check, Outcome};
use crate::analysis::{
    coverage_scan, cr_tomography, default_durations, multi_cr_schedule, single_cr_schedule, CoverageReport,
    TomographySettings,
};
use crate::device::{effective_cr, DeviceConfig};
use crate::dynamics::SimOptions;
use crate::error::{Error, Result};
use crate::problems::final_state;
use crate::pulse::{lower_circuit, Channel, Gate, GateOp, PulseSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub detuning_hz: f64,
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

/// `CX · H · H · CX` on qubits (0, 1), lowered, with every channel's
/// oscillator detuned by `detuning` from the start. Ideally the identity.
pub fn verify_schedule(device: &DeviceConfig, detuning: f64) -> Result<PulseSchedule> {
    if device.n_qubits != 2 {
        return Err(Error::Validation(format!(
            "the verification circuit needs a two-qubit device, got {}",
            device.n_qubits
        )));
    }
    let mut s = PulseSchedule::new(2);
    let mut channels: Vec<Channel> = (0..2).map(Channel::drive).collect();
    for (a, b) in device.edges() {
        channels.extend([Channel::control(a, b), Channel::control(b, a)]);
    }
    for ch in channels {
        s.set_detuning(ch, detuning)?;
    }
    let ops = [
        GateOp { gate: Gate::CX, qubits: vec![0, 1] },
        GateOp { gate: Gate::H, qubits: vec![0] },
        GateOp { gate: Gate::H, qubits: vec![0] },
        GateOp { gate: Gate::CX, qubits: vec![0, 1] },
    ];
    s.append(&lower_circuit(&ops, device)?)?;
    Ok(s)
}

pub fn verify_sweep(device: &DeviceConfig, sim: &SimOptions, range: f64, points: usize) -> Result<Vec<VerifyRow>> {
    detuning_grid(range, points)
        .into_iter()
        .map(|d| {
            let p = final_state(&verify_schedule(device, d)?, device, sim)?.probabilities();
            Ok(VerifyRow {
                detuning_hz: d,
                p00: p[0],
                p01: p[1],
                p10: p[2],
                p11: p[3],
            })
        })
        .collect()
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let device = cfg.device_or_line(2)?;
    let rows = verify_sweep(&device, &cfg.sim(), cfg.verify.range_hz, cfg.verify.points)?;
    let seed = cfg.seeds[0];
    let file = write_csv(&cfg.output_dir, "verify.csv", &cfg.hash(), seed, &rows)?;
    let p0 = final_state(&verify_schedule(&device, 0.0)?, &device, &cfg.sim())?.probabilities()[0];
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.p00), b.max(r.p00)));
    println!("P00 at zero detuning {p0:.5}\tP00 range over sweep [{lo:.4}, {hi:.4}]");
    Ok(Outcome {
        checks: vec![Check::new(
            "P00 at zero detuning",
            p0 >= cfg.verify.min_p00,
            format!("P00 = {p0:.5}, required {}", cfg.verify.min_p00),
        )],
        files: vec![file],
    })
}

/// Coverage of the configured CR builder on the configured device.
pub fn weyl_scan(cfg: &ExperimentConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    let device = cfg.device_or_line(2)?;
    let schedule = match cfg.weyl.builder {
        WeylBuilder::SingleCr => single_cr_schedule(&device)?,
        WeylBuilder::MultiCr => multi_cr_schedule(&device)?,
    };
    coverage_scan(&schedule, &device, &cfg.sim(), cfg.weyl.samples, cfg.seeds[0])
}

pub fn cmd_weyl(cfg: &ExperimentConfig) -> Result<Outcome> {
    let r = weyl_scan(cfg)?;
    let seed = cfg.seeds[0];
    let hash = cfg.hash();
    let name = match cfg.weyl.builder {
        WeylBuilder::SingleCr => "single_cr",
        WeylBuilder::MultiCr => "multi_cr",
    };
    let csv = write_csv(&cfg.output_dir, &format!("weyl_{name}.csv"), &hash, seed, &r.points)?;
    #[derive(Serialize)]
    struct Summary {
        builder: &'static str,
        samples: usize,
        min: [f64; 3],
        max: [f64; 3],
        span: [f64; 3],
    }
    let summary = Summary {
        builder: name,
        samples: r.points.len(),
        min: r.min,
        max: r.max,
        span: r.span(),
    };
    let json = write_json(&cfg.output_dir, &format!("weyl_{name}.summary.json"), &hash, seed, &summary)?;
    println!(
        "{name}\tc1 [{:.4}, {:.4}]\tc2 [{:.4}, {:.4}]\tc3 [{:.2e}, {:.2e}]",
        r.min[0], r.max[0], r.min[1], r.max[1], r.min[2], r.max[2]
    );
    let mut checks = Vec::new();
    if cfg.weyl.builder == WeylBuilder::SingleCr {
        let m = r.max[1].max(r.max[2]);
        checks.push(Check::new(
            "single CR stays on the c1 axis",
            m <= 1e-6,
            format!("max(c2, c3) = {m:.3e}"),
        ));
    }
    Ok(Outcome {
        checks,
        files: vec![csv, json],
    })
}

pub fn cmd_tomography(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let device = cfg.device_or_line(2)?;
    let seed = cfg.seeds[0];
    let amp = cfg.tomography.amp;
    let settings = TomographySettings {
        shots: cfg.tomography.shots,
        seed,
        tolerance: None,
    };
    let report = cr_tomography(&device, amp, &default_durations(), &cfg.sim(), &settings)?;
    let model = effective_cr(&device, amp, device.cr_duration)?;
    let fitted = report.coefficients.as_array();
    let expected = model.as_array();
    let scale = expected.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let max_rel = fitted
        .iter()
        .zip(&expected)
        .map(|(f, e)| (f - e).abs() / scale)
        .fold(0.0, f64::max);
    #[derive(Serialize)]
    struct Summary<'a> {
        amp: f64,
        shots: Option<u64>,
        fitted: &'a crate::analysis::TomographyReport,
        model: [f64; 6],
        max_relative_error: f64,
    }
    let file = write_json(
        &cfg.output_dir,
        "tomography.json",
        &cfg.hash(),
        seed,
        &Summary {
            amp,
            shots: cfg.tomography.shots,
            fitted: &report,
            model: expected,
            max_relative_error: max_rel,
        },
    )?;
    let labels = ["a_x", "a_y", "a_z", "b_x", "b_y", "b_z"];
    for ((l, f), e) in labels.iter().zip(fitted).zip(expected) {
        println!("{l}\tfitted {f:.6e}\tmodel {e:.6e}");
    }
    let mut checks = Vec::new();
    if cfg.tomography.shots.is_none() {
        checks.push(Check::new(
            "noiseless round trip",
            max_rel <= 1e-6,
            format!("max relative error {max_rel:.3e}"),
        ));
    }
    Ok(Outcome {
        checks,
        files: vec![file],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerResult {
    pub samples: usize,
    pub duration_ns: f64,
    pub schedule: PulseSchedule,
}

pub fn lower(cfg: &ExperimentConfig) -> Result<LowerResult> {
    cfg.validate()?;
    if cfg.gates.is_empty() {
        return Err(Error::Validation("no gates to lower".into()));
    }
    let ops = cfg.gates.iter().map(|g| g.parse::<GateOp>()).collect::<Result<Vec<_>>>()?;
    let width = ops.iter().flat_map(|o| o.qubits.iter()).max().map_or(1, |q| q + 1);
    let device = cfg.device_or_line(width)?;
    let schedule = lower_circuit(&ops, &device)?;
    Ok(LowerResult {
        samples: schedule.duration(),
        duration_ns: device.nanoseconds(schedule.duration()),
        schedule,
    })
}

pub fn cmd_lower(cfg: &ExperimentConfig) -> Result<Outcome> {
    let r = lower(cfg)?;
    let file = write_json(&cfg.output_dir, "lowered.json", &cfg.hash(), cfg.seeds[0], &r)?;
    println!("{} samples\t{:.1} ns", r.samples, r.duration_ns);
    Ok(Outcome {
        checks: Vec::new(),
        files: vec![file],
    })
}
