//! Two-level register propagation: rotating-frame drives plus the effective
//! cross-resonance interaction on control lines.

use super::compile::Compiled;
use super::local::{add_identity, add_pauli, apply_local};
use super::{FrameMode, CF4_NODES, CF4_WEIGHTS};
use crate::device::{DeviceConfig, Frame};
use crate::pulse::Channel;
use crate::qcore::eigen::expm_unchecked;
use crate::qcore::{CMatrix, C64};

/// Transverse coefficient `c` of `Re(c)·X − Im(c)·Y` for a rotating-frame
/// drive term, with or without the counter-rotating partner.
#[inline]
fn transverse(c: C64, omega: f64, t: f64, mode: FrameMode) -> C64 {
    match mode {
        FrameMode::Rwa => c,
        _ => c + c.conj() * C64::from_polar(1.0, -2.0 * omega * t),
    }
}

struct Sample<'a> {
    compiled: &'a Compiled,
    cfg: &'a DeviceConfig,
    frame: &'a Frame,
    mode: FrameMode,
    k: usize,
    active: Vec<usize>,
}

impl Sample<'_> {
    fn hamiltonian(&self, comp: &[usize], t: f64) -> CMatrix {
        let m = comp.len();
        let pos = |q: usize| comp.iter().position(|&x| x == q).expect("qubit in component");
        let mut h = CMatrix::zeros(1 << m, 1 << m);
        let half_scale = 0.5 * self.cfg.drive_scale();
        if self.mode == FrameMode::Lab {
            for &q in comp {
                let w = self.frame.qubit_omega[q];
                // ω·n = ω/2·(I − Z)
                add_identity(&mut h, 0.5 * w);
                add_pauli(&mut h, m, &[(pos(q), b'Z')], -0.5 * w);
            }
        }
        for &ti in &self.active {
            let track = &self.compiled.tracks[ti];
            match track.channel {
                Channel::Drive { qubit } => {
                    if !comp.contains(&qubit) {
                        continue;
                    }
                    let d = track.value(self.k, t) * half_scale;
                    let w = self.frame.qubit_omega[qubit];
                    let p = pos(qubit);
                    if self.mode == FrameMode::Lab {
                        let x = 2.0 * (d * C64::from_polar(1.0, w * t)).re;
                        add_pauli(&mut h, m, &[(p, b'X')], x);
                    } else {
                        let c = transverse(d, w, t, self.mode);
                        add_pauli(&mut h, m, &[(p, b'X')], c.re);
                        add_pauli(&mut h, m, &[(p, b'Y')], -c.im);
                    }
                }
                Channel::Control { control, target } => {
                    if !comp.contains(&control) {
                        continue;
                    }
                    let u = track.value(self.k, t);
                    let r = &self.cfg.cr_rates;
                    let ca = C64::new(r.a_x, -r.a_y) * u;
                    let cb = C64::new(r.b_x, -r.b_y) * u;
                    let w = self.frame.qubit_omega[target];
                    let (pc, pt) = (pos(control), pos(target));
                    if self.mode == FrameMode::Lab {
                        let rot = C64::from_polar(1.0, w * t);
                        add_pauli(&mut h, m, &[(pc, b'Z'), (pt, b'X')], 2.0 * (ca * rot).re);
                        add_pauli(&mut h, m, &[(pt, b'X')], 2.0 * (cb * rot).re);
                    } else {
                        let a = transverse(ca, w, t, self.mode);
                        let b = transverse(cb, w, t, self.mode);
                        add_pauli(&mut h, m, &[(pc, b'Z'), (pt, b'X')], a.re);
                        add_pauli(&mut h, m, &[(pc, b'Z'), (pt, b'Y')], -a.im);
                        add_pauli(&mut h, m, &[(pt, b'X')], b.re);
                        add_pauli(&mut h, m, &[(pt, b'Y')], -b.im);
                    }
                    let mag = u.norm();
                    add_pauli(&mut h, m, &[(pc, b'Z'), (pt, b'Z')], mag * r.a_z);
                    add_pauli(&mut h, m, &[(pt, b'Z')], mag * r.b_z);
                }
            }
        }
        h
    }
}

/// Groups qubits coupled by an active control line; drive-only qubits form
/// singletons. In the lab frame every qubit evolves under its drift.
fn components(n: usize, compiled: &Compiled, active: &[usize], all: bool) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut used = vec![all; n];
    for &ti in active {
        match compiled.tracks[ti].channel {
            Channel::Drive { qubit } => used[qubit] = true,
            Channel::Control { control, target } => {
                used[control] = true;
                used[target] = true;
                let (a, b) = (find(&mut parent, control), find(&mut parent, target));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for q in 0..n {
        if !used[q] {
            continue;
        }
        let r = find(&mut parent, q);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(q);
    }
    groups
}

fn apply_all(states: &mut [Vec<C64>], n: usize, comp: &[usize], u: &CMatrix) {
    for s in states.iter_mut() {
        apply_local(s, n, comp, u);
    }
}

pub(crate) fn run(
    compiled: &Compiled,
    cfg: &DeviceConfig,
    frame: &Frame,
    mode: FrameMode,
    substeps: usize,
    states: &mut [Vec<C64>],
) {
    let n = compiled.n_qubits;
    let dt = cfg.dt;
    let lab = mode == FrameMode::Lab;
    for k in 0..compiled.n_samples {
        let active: Vec<usize> = (0..compiled.tracks.len())
            .filter(|&i| compiled.tracks[i].active(k))
            .collect();
        if active.is_empty() && !lab {
            continue;
        }
        let sample = Sample {
            compiled,
            cfg,
            frame,
            mode,
            k,
            active,
        };
        for comp in components(n, compiled, &sample.active, lab) {
            if mode == FrameMode::Rwa {
                // envelope is held over the sample; the detuning phase is
                // taken at its midpoint
                let h = sample.hamiltonian(&comp, (k as f64 + 0.5) * dt);
                apply_all(states, n, &comp, &expm_unchecked(&h, dt));
                continue;
            }
            let step = dt / substeps as f64;
            for j in 0..substeps {
                let t0 = k as f64 * dt + j as f64 * step;
                let h1 = sample.hamiltonian(&comp, t0 + CF4_NODES[0] * step);
                let h2 = sample.hamiltonian(&comp, t0 + CF4_NODES[1] * step);
                let [w_small, w_big] = CF4_WEIGHTS;
                let first = &h1.scale_real(w_big) + &h2.scale_real(w_small);
                let second = &h1.scale_real(w_small) + &h2.scale_real(w_big);
                apply_all(states, n, &comp, &expm_unchecked(&first, step));
                apply_all(states, n, &comp, &expm_unchecked(&second, step));
            }
        }
    }
    if lab {
        let total = compiled.n_samples as f64 * dt;
        for s in states.iter_mut() {
            for (reg, a) in s.iter_mut().enumerate() {
                *a *= frame.register_phase(reg, total);
            }
        }
    }
}
