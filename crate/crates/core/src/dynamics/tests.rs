use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::{prop_assert, proptest, ProptestConfig};

use super::*;
use crate::device::{calibrate_pi_half, cr_effective_time, cr_envelope, drag_envelope};
use crate::pulse::{cr, lower_circuit, lower_gate, snp, Channel, Envelope, Gate, GateOp, Value};
use crate::qcore::matexp_hermitian;

fn rx(theta: f64) -> CMatrix {
    matexp_hermitian(&pauli("X"), theta / 2.0).unwrap()
}

fn ry(theta: f64) -> CMatrix {
    matexp_hermitian(&pauli("Y"), theta / 2.0).unwrap()
}

fn rz(theta: f64) -> CMatrix {
    matexp_hermitian(&pauli("Z"), theta / 2.0).unwrap()
}

fn cnot() -> CMatrix {
    CMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

fn coupled_pair() -> DeviceConfig {
    let mut cfg = DeviceConfig::line(2);
    cfg.qubit_freq = vec![5.0e9, 5.2e9];
    cfg.coupling = vec![40e6, 40e6];
    cfg.bus_freq = 6.8e9;
    cfg
}

fn unitary(s: &PulseSchedule, cfg: &DeviceConfig, opts: SimOptions) -> CMatrix {
    propagate_unitary(s, cfg, &opts).unwrap()
}

#[test]
fn cf4_coefficients() {
    assert!((CF4_NODES[0] + CF4_NODES[1] - 1.0).abs() < 1e-15);
    assert!((CF4_WEIGHTS[0] + CF4_WEIGHTS[1] - 0.5).abs() < 1e-15);
    assert!((SQRT3_6 - 3f64.sqrt() / 6.0).abs() < 1e-16);
}

#[test]
fn empty_schedule_is_identity() {
    let cfg = DeviceConfig::line(2);
    let s = PulseSchedule::new(2);
    let psi = StateVector::normalized(vec![C64::new(0.3, 0.1), C64::new(0.0, 0.5), C64::new(-0.2, 0.0), C64::new(0.7, 0.2)]).unwrap();
    let out = propagate(&s, &cfg, &SimOptions::default(), &psi).unwrap();
    assert_eq!(out.duration, 0);
    assert!((state_fidelity(&out.final_state, &psi) - 1.0).abs() < 1e-14);
}

#[test]
fn zero_amplitude_pulses_are_identity() {
    let cfg = DeviceConfig::line(2);
    let mut s = snp(0, 0.0, 1.5e6, &cfg).unwrap();
    s.append(&cr(0, 1, 0.0, -1.0e6, 736, &cfg).unwrap()).unwrap();
    assert!(s.duration() > 0);
    for frame in [FrameMode::Rwa, FrameMode::Rotating] {
        let u = unitary(&s, &cfg, SimOptions::with_frame(frame));
        assert!(u.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }
}

#[test]
fn pi_pulse_inverts() {
    let cfg = DeviceConfig::line(1);
    let amp = 2.0 * calibrate_pi_half(&cfg, cfg.snp_duration);
    let s = snp(0, amp, 0.0, &cfg).unwrap();
    let out = propagate(&s, &cfg, &SimOptions::default(), &StateVector::zero(1)).unwrap();
    assert!(out.final_state.probabilities()[1] >= 0.999);
}

#[test]
fn lowered_single_qubit_gates() {
    let cfg = DeviceConfig::line(1);
    let cases = [
        (Gate::RX(FRAC_PI_2), rx(FRAC_PI_2)),
        (Gate::RX(-2.1), rx(-2.1)),
        (Gate::RY(FRAC_PI_2), ry(FRAC_PI_2)),
        (Gate::RZ(0.7), rz(0.7)),
        (Gate::X, rx(PI)),
    ];
    for (gate, target) in cases {
        let u = unitary(&lower_gate(gate, &[0], &cfg).unwrap(), &cfg, SimOptions::default());
        let f = fidelity(&target, &u).unwrap();
        assert!(f >= 0.999, "{gate}: {f}");
    }
}

#[test]
fn virtual_z_composes_in_circuit_order() {
    // RZ then RX must differ from RX then RZ
    let cfg = DeviceConfig::line(1);
    let ops: Vec<GateOp> = ["rz 0.9 0", "rx 1.2 0"].iter().map(|s| s.parse().unwrap()).collect();
    let u = unitary(&lower_circuit(&ops, &cfg).unwrap(), &cfg, SimOptions::default());
    assert!(fidelity(&rx(1.2).matmul(&rz(0.9)), &u).unwrap() >= 0.999);
    assert!(fidelity(&rz(0.9).matmul(&rx(1.2)), &u).unwrap() < 0.99);
}

#[test]
fn cr_pulse_matches_static_effective_hamiltonian() {
    // |u| scales every term, so the generator commutes with itself in time
    let cfg = DeviceConfig::line(2);
    let amp = 0.17;
    let s = cr(0, 1, amp, 0.0, 736, &cfg).unwrap();
    let u = unitary(&s, &cfg, SimOptions::default());
    let rates = cfg.cr_rates.scaled(amp).as_array();
    let expected = evolve_effective(rates, cr_effective_time(&cfg, 736)).unwrap();
    assert!(u.max_abs_diff(&expected) < 1e-10, "{}", u.max_abs_diff(&expected));
}

#[test]
fn evolve_effective_matches_taylor_series() {
    let c = [1.3e7, -4.0e5, 9.0e5, -2.2e7, 3.0e5, 6.0e5];
    let t = 40e-9;
    let h = effective_hamiltonian(c).to_matrix().unwrap();
    let a = h.scale(C64::new(0.0, -t));
    let mut term = CMatrix::identity(4);
    let mut sum = CMatrix::identity(4);
    for k in 1..60 {
        term = term.matmul(&a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    assert!(evolve_effective(c, t).unwrap().max_abs_diff(&sum) < 1e-12);
}

#[test]
fn zx_alignment_removes_zy() {
    let cfg = DeviceConfig::line(2);
    let angle = cfg.cr_rates.zx_alignment_angle();
    let mut s = PulseSchedule::new(2);
    s.play(Channel::control(0, 1), cr_envelope(&cfg, 448, 0.2).with_angle(angle)).unwrap();
    let u = unitary(&s, &cfg, SimOptions::default());
    let r = &cfg.cr_rates;
    let rotate = |x: f64, y: f64| {
        let c = C64::new(x, -y) * C64::from_polar(1.0, angle);
        (c.re, -c.im)
    };
    let (ax, ay) = rotate(r.a_x, r.a_y);
    let (bx, by) = rotate(r.b_x, r.b_y);
    assert!(ay.abs() < 1e-6 * ax.abs());
    let c = [ax, ay, r.a_z, bx, by, r.b_z].map(|v| v * 0.2);
    let expected = evolve_effective(c, cr_effective_time(&cfg, 448)).unwrap();
    assert!(u.max_abs_diff(&expected) < 1e-10);
}

#[test]
fn lowered_cx_fidelity() {
    for cfg in [DeviceConfig::line(2), coupled_pair()] {
        let u = unitary(&lower_gate(Gate::CX, &[0, 1], &cfg).unwrap(), &cfg, SimOptions::default());
        let f = fidelity(&cnot(), &u).unwrap();
        assert!(f >= 0.99, "{}: {f}", cfg.name);
    }
}

#[test]
fn lowered_cz_and_reversed_cx() {
    let cfg = DeviceConfig::line(2);
    let cz = CMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
    let u = unitary(&lower_gate(Gate::CZ, &[0, 1], &cfg).unwrap(), &cfg, SimOptions::default());
    assert!(fidelity(&cz, &u).unwrap() >= 0.98);
    // control 1, target 0
    let swap_cx = CMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
    ]);
    let u = unitary(&lower_gate(Gate::CX, &[1, 0], &cfg).unwrap(), &cfg, SimOptions::default());
    assert!(fidelity(&swap_cx, &u).unwrap() >= 0.99);
}

#[test]
fn sequential_schedules_compose() {
    let cfg = DeviceConfig::line(2);
    let a = lower_gate(Gate::RX(0.8), &[0], &cfg).unwrap();
    let mut b = cr(0, 1, 0.12, 0.0, 736, &cfg).unwrap();
    b.append(&lower_gate(Gate::RY(-0.4), &[1], &cfg).unwrap()).unwrap();
    let mut ab = a.clone();
    ab.append_sequential(&b).unwrap();
    let opts = SimOptions::default();
    let lhs = unitary(&ab, &cfg, opts);
    let rhs = unitary(&b, &cfg, opts).matmul(&unitary(&a, &cfg, opts));
    assert!(lhs.max_abs_diff(&rhs) < 1e-10);
}

#[test]
fn substep_halving_converges() {
    let cfg = DeviceConfig::line(2);
    let mut s = snp(0, 0.2, 1.0e6, &cfg).unwrap();
    s.append(&cr(0, 1, 0.2, 0.0, 736, &cfg).unwrap()).unwrap();
    let run = |k| {
        unitary(
            &s,
            &cfg,
            SimOptions {
                frame: FrameMode::Rotating,
                substeps: k,
                ..SimOptions::default()
            },
        )
    };
    // the counter-rotating phase turns by 2ω·dt ≈ 14 rad per sample
    let (u8, u16, u32) = (run(8), run(16), run(32));
    let coarse = u8.max_abs_diff(&u32);
    let fine = u16.max_abs_diff(&u32);
    assert!(fine < 1e-6, "{fine}");
    assert!(fine * 8.0 < coarse);
}

#[test]
fn frames_agree() {
    let cfg = DeviceConfig::line(2);
    let mut s = snp(0, 0.2, 0.0, &cfg).unwrap();
    s.append(&snp(1, 0.15, 1.5e6, &cfg).unwrap()).unwrap();
    s.append_sequential(&cr(0, 1, 0.1, 0.0, 448, &cfg).unwrap()).unwrap();
    let rot = unitary(&s, &cfg, SimOptions::with_frame(FrameMode::Rotating));
    let lab = unitary(&s, &cfg, SimOptions::with_frame(FrameMode::Lab));
    let rwa = unitary(&s, &cfg, SimOptions::with_frame(FrameMode::Rwa));
    assert!(fidelity(&rot, &lab).unwrap() >= 1.0 - 1e-4);
    // counter-rotating corrections are of order Ω/ω
    assert!(fidelity(&rot, &rwa).unwrap() >= 1.0 - 1e-3);
}

/// Flat drive for `len` samples, ramps negligible.
fn flat(len: usize, amp: f64) -> Envelope {
    Envelope::gaussian_square(len + 2, 0.01, len, amp)
}

#[test]
fn detuned_rabi_oscillation() {
    let cfg = DeviceConfig::line(1);
    let (len, amp) = (1000usize, 0.01);
    let omega = cfg.drive_scale() * amp;
    let t = len as f64 * cfg.dt;
    let p1 = |delta: f64| {
        let mut s = PulseSchedule::new(1);
        s.set_detuning(Channel::drive(0), delta).unwrap();
        s.play(Channel::drive(0), flat(len, amp)).unwrap();
        propagate(&s, &cfg, &SimOptions::default(), &StateVector::zero(1))
            .unwrap()
            .final_state
            .probabilities()[1]
    };
    for delta in [0.0, 0.4e6, 1.0e6, 1.9e6] {
        let d = 2.0 * PI * delta;
        let g = omega.hypot(d);
        let expected = (omega / g).powi(2) * (0.5 * g * t).sin().powi(2);
        let (plus, minus) = (p1(delta), p1(-delta));
        assert!((plus - expected).abs() < 1e-3, "{delta}: {plus} vs {expected}");
        assert!((plus - minus).abs() < 1e-9);
    }
}

#[test]
fn full_model_matches_effective_when_uncoupled() {
    let cfg = DeviceConfig::line(1);
    let s = lower_gate(Gate::RX(1.1), &[0], &cfg).unwrap();
    let full = unitary(&s, &cfg, SimOptions::with_model(Model::Full));
    let eff = unitary(&s, &cfg, SimOptions::with_frame(FrameMode::Rotating));
    assert!(fidelity(&eff, &full).unwrap() >= 1.0 - 1e-6);
    assert!(full.unitarity_residual() < 1e-6);
}

#[test]
fn full_model_drives_dressed_qubits() {
    let cfg = coupled_pair();
    let s = lower_gate(Gate::X, &[1], &cfg).unwrap();
    let out = propagate(&s, &cfg, &SimOptions::with_model(Model::Full), &StateVector::zero(2)).unwrap();
    assert!(out.final_state.probabilities()[1] >= 0.99, "{:?}", out.final_state.probabilities());
    assert!(out.leakage < 1e-2);
    let mut wrong = cfg.clone();
    wrong.n_qubits = 2;
    assert!(propagate(&PulseSchedule::new(1), &wrong, &SimOptions::with_model(Model::Full), &StateVector::zero(1)).is_err());
}

#[test]
fn rejects_bad_inputs() {
    let cfg = DeviceConfig::line(2);
    let unbound = snp(0, Value::param("a"), 0.0, &cfg).unwrap();
    assert!(matches!(
        propagate(&unbound, &cfg, &SimOptions::default(), &StateVector::zero(2)),
        Err(Error::Binding(_))
    ));
    let big = snp(0, 0.5, 0.0, &cfg).unwrap();
    assert!(propagate(&big, &cfg, &SimOptions::default(), &StateVector::zero(2)).is_err());
    let ok = snp(0, 0.1, 0.0, &cfg).unwrap();
    assert!(propagate(&ok, &cfg, &SimOptions::default(), &StateVector::zero(1)).is_err());
    let mut off_edge = PulseSchedule::new(3);
    off_edge.play(Channel::control(0, 2), cr_envelope(&cfg, 448, 0.1)).unwrap();
    let cfg3 = DeviceConfig::line(3);
    assert!(matches!(
        propagate(&off_edge, &cfg3, &SimOptions::default(), &StateVector::zero(3)),
        Err(Error::Topology(0, 2))
    ));
    assert!("bogus".parse::<Model>().is_err());
    assert_eq!("FULL".parse::<Model>().unwrap(), Model::Full);
}

#[test]
fn fidelity_ignores_global_phase() {
    let u = rx(0.3);
    let v = u.scale(C64::from_polar(1.0, 1.234));
    assert!((fidelity(&u, &v).unwrap() - 1.0).abs() < 1e-14);
    let f = fidelity(&CMatrix::identity(2), &pauli("X")).unwrap();
    assert!((f - 1.0 / 3.0).abs() < 1e-14);
    assert!(fidelity(&CMatrix::identity(2), &CMatrix::identity(4)).is_err());
}

#[test]
fn drag_pulse_stays_in_plane() {
    let mut cfg = DeviceConfig::line(1);
    cfg.drag_beta = 2.0;
    let mut s = PulseSchedule::new(1);
    s.play(Channel::drive(0), drag_envelope(&cfg, 160, calibrate_pi_half(&cfg, 160))).unwrap();
    let u = unitary(&s, &cfg, SimOptions::default());
    // the derivative quadrature integrates to zero
    assert!(fidelity(&rx(FRAC_PI_2), &u).unwrap() > 0.99);
    let _ = FRAC_PI_4;
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn propagation_is_unitary(a0 in 0.0f64..0.4, a1 in 0.0f64..0.4, acr in 0.0f64..0.4, d in -2.0e6f64..2.0e6) {
        let cfg = DeviceConfig::line(2);
        let mut s = snp(0, a0, d, &cfg).unwrap();
        s.append(&snp(1, a1, -d, &cfg).unwrap()).unwrap();
        s.append(&cr(0, 1, acr, d, 736, &cfg).unwrap()).unwrap();
        let u = unitary(&s, &cfg, SimOptions::default());
        prop_assert!(u.unitarity_residual() < 1e-10);
    }

    #[test]
    fn virtual_z_commutes_with_z_observables(phi in -PI..PI, a in 0.0f64..0.4) {
        // a frame shift changes no computational-basis population
        let cfg = DeviceConfig::line(1);
        let mut s = PulseSchedule::new(1);
        s.shift_phase(Channel::drive(0), phi).unwrap();
        s.play(Channel::drive(0), drag_envelope(&cfg, 160, a)).unwrap();
        let shifted = propagate(&s, &cfg, &SimOptions::default(), &StateVector::zero(1)).unwrap();
        let plain = propagate(&snp(0, a, 0.0, &cfg).unwrap(), &cfg, &SimOptions::default(), &StateVector::zero(1)).unwrap();
        prop_assert!((shifted.final_state.probabilities()[1] - plain.final_state.probabilities()[1]).abs() < 1e-12);
    }
}
