use std::f64::consts::{FRAC_PI_2, PI};

use super::config::{CRCoefficients, DeviceConfig};
use crate::error::{Error, Result};
use crate::pulse::{Channel, Envelope};
use crate::qcore::{eigh, CMatrix, C64, MAX_DENSE_DIM};

const TWO_PI: f64 = 2.0 * PI;

/// Dimension of the register-plus-bus space.
pub fn full_dimension(cfg: &DeviceConfig) -> Result<usize> {
    let dim = (1usize << cfg.n_qubits) * cfg.bus_cutoff;
    if cfg.n_qubits > 10 || dim > MAX_DENSE_DIM {
        return Err(Error::Capacity { dim, max: MAX_DENSE_DIM });
    }
    Ok(dim)
}

/// Splits a register-plus-bus index into `(register index, bus level)`.
/// The bus is the least significant factor.
pub(crate) fn split_index(cfg: &DeviceConfig, i: usize) -> (usize, usize) {
    (i / cfg.bus_cutoff, i % cfg.bus_cutoff)
}

fn excited(n: usize, reg: usize, q: usize) -> bool {
    reg >> (n - 1 - q) & 1 == 1
}

/// Drift Hamiltonian in rad/s on `(⊗ qubits) ⊗ bus`: qubit splittings, the
/// bus oscillator, and transverse qubit-bus exchange.
pub fn static_hamiltonian(cfg: &DeviceConfig) -> Result<CMatrix> {
    let dim = full_dimension(cfg)?;
    let n = cfg.n_qubits;
    let cut = cfg.bus_cutoff;
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (reg, m) = split_index(cfg, i);
        let mut e = TWO_PI * cfg.bus_freq * m as f64;
        for q in 0..n {
            if excited(n, reg, q) {
                e += TWO_PI * cfg.qubit_freq[q];
            }
        }
        h[(i, i)] = C64::new(e, 0.0);
    }
    for q in 0..n {
        let g = TWO_PI * cfg.coupling_hz(q);
        if g == 0.0 {
            continue;
        }
        let flip = 1usize << (n - 1 - q);
        for reg in 0..1usize << n {
            for m in 0..cut.saturating_sub(1) {
                // σx_q (a + a†): |reg, m⟩ ↔ |reg ^ q, m + 1⟩ with amplitude √(m+1)
                let amp = g * ((m + 1) as f64).sqrt();
                let i = reg * cut + m;
                let j = (reg ^ flip) * cut + m + 1;
                h[(i, j)] += C64::new(amp, 0.0);
                h[(j, i)] += C64::new(amp, 0.0);
            }
        }
    }
    Ok(h)
}

/// Frame rotating with each qubit (and the bus) at its own frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Angular frequency of each qubit's frame, rad/s.
    pub qubit_omega: Vec<f64>,
    /// Angular bus frequency, rad/s.
    pub bus_omega: f64,
}

impl Frame {
    /// Oscillator angular frequency of a channel.
    pub fn channel_omega(&self, ch: &Channel) -> f64 {
        self.qubit_omega[ch.frame_qubit()]
    }

    /// Phase `exp(+i Σ ω_q n_q t)` of register basis state `reg` on `n` qubits.
    pub fn register_phase(&self, reg: usize, t: f64) -> C64 {
        let n = self.qubit_omega.len();
        let e: f64 = (0..n).filter(|&q| excited(n, reg, q)).map(|q| self.qubit_omega[q]).sum();
        C64::from_polar(1.0, e * t)
    }
}

/// Rotating frame at the dressed qubit frequencies (bare when uncoupled).
pub fn rotating_frame(cfg: &DeviceConfig) -> Result<Frame> {
    let bare: Vec<f64> = cfg.qubit_freq.iter().map(|f| TWO_PI * f).collect();
    if !cfg.has_coupling() || cfg.bus_cutoff < 2 {
        return Ok(Frame {
            qubit_omega: bare,
            bus_omega: TWO_PI * cfg.bus_freq,
        });
    }
    let dressed = dressed_levels(cfg)?;
    let n = cfg.n_qubits;
    let ground = dressed.energy_of(0);
    let qubit_omega = (0..n)
        .map(|q| dressed.energy_of((1usize << (n - 1 - q)) * cfg.bus_cutoff) - ground)
        .collect();
    Ok(Frame {
        qubit_omega,
        bus_omega: TWO_PI * cfg.bus_freq,
    })
}

/// Eigenbasis of the drift Hamiltonian, labelled by the bare state each
/// eigenvector overlaps most.
#[derive(Debug, Clone)]
pub struct DressedLevels {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
    /// `label[bare] = eigen index`.
    pub label: Vec<usize>,
}

impl DressedLevels {
    pub fn energy_of(&self, bare: usize) -> f64 {
        self.values[self.label[bare]]
    }

    /// Dressed eigenvector continuously connected to bare state `bare`.
    pub fn vector_of(&self, bare: usize) -> Vec<C64> {
        self.vectors.column(self.label[bare])
    }
}

pub fn dressed_levels(cfg: &DeviceConfig) -> Result<DressedLevels> {
    let h = static_hamiltonian(cfg)?;
    let eig = eigh(&h);
    let dim = h.rows();
    let mut label = vec![usize::MAX; dim];
    let mut taken = vec![false; dim];
    // assign greedily by descending overlap so the labelling is a bijection
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        for b in 0..dim {
            pairs.push((eig.vectors[(b, k)].norm_sqr(), b, k));
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    for (_, b, k) in pairs {
        if label[b] == usize::MAX && !taken[k] {
            label[b] = k;
            taken[k] = true;
        }
    }
    Ok(DressedLevels {
        values: eig.values,
        vectors: eig.vectors,
        label,
    })
}

/// Lab-frame drive term on the register-plus-bus space:
/// `drive_scale · Re(s · e^{iωt}) · σx` on the driven qubit, where `ω` is the
/// channel oscillator. A control channel drives its control qubit at the
/// target's frequency.
pub fn drive_hamiltonian(cfg: &DeviceConfig, frame: &Frame, channel: &Channel, s: C64, t: f64) -> Result<CMatrix> {
    let dim = full_dimension(cfg)?;
    let driven = match *channel {
        Channel::Drive { qubit } => qubit,
        Channel::Control { control, .. } => control,
    };
    if channel.qubits().iter().any(|&q| q >= cfg.n_qubits) {
        return Err(Error::Validation(format!("channel {channel} is outside the device")));
    }
    let mut h = CMatrix::zeros(dim, dim);
    let coeff = cfg.drive_scale() * (s * C64::from_polar(1.0, frame.channel_omega(channel) * t)).re;
    if coeff == 0.0 {
        return Ok(h);
    }
    let bit = 1usize << (cfg.n_qubits - 1 - driven);
    for i in 0..dim {
        let (reg, m) = split_index(cfg, i);
        h[((reg ^ bit) * cfg.bus_cutoff + m, i)] = C64::new(coeff, 0.0);
    }
    Ok(h)
}

/// Peak effective CR coefficients for a flat-top drive at amplitude `amp`.
/// The model is linear in the delivered amplitude and independent of the
/// pulse length, which only sets the effective interaction time.
pub fn effective_cr(cfg: &DeviceConfig, amp: f64, duration: usize) -> Result<CRCoefficients> {
    if cfg.topology.is_empty() {
        return Err(Error::Validation("effective CR needs a two-qubit edge in the topology".into()));
    }
    if duration == 0 {
        return Err(Error::Validation("CR duration must be positive".into()));
    }
    Ok(cfg.cr_rates.scaled(cfg.realized_amplitude(amp)))
}

/// Integrated unit-amplitude envelope of a CR pulse, in seconds. Multiplying
/// the peak coefficients by this gives the accumulated rotation.
pub fn cr_effective_time(cfg: &DeviceConfig, duration: usize) -> f64 {
    cr_envelope(cfg, duration, 1.0).unit_area() * cfg.dt
}

/// Flat-top CR envelope with Gaussian ramps of `cr_sigma`.
pub fn cr_envelope(cfg: &DeviceConfig, duration: usize, amp: f64) -> Envelope {
    let ramps = (4.0 * cfg.cr_sigma).round() as usize;
    let width = duration.saturating_sub(ramps);
    Envelope::gaussian_square(duration, cfg.cr_sigma, width, amp)
}

/// Drag envelope used for single-qubit pulses of the given length.
pub fn drag_envelope(cfg: &DeviceConfig, duration: usize, amp: f64) -> Envelope {
    Envelope::drag(duration, duration as f64 / 4.0, cfg.drag_beta, amp)
}

/// Amplitude of a `duration`-sample Drag pulse that rotates by π/2, from
/// the pulse area.
pub fn calibrate_pi_half(cfg: &DeviceConfig, duration: usize) -> f64 {
    let area = drag_envelope(cfg, duration, 1.0).unit_area();
    FRAC_PI_2 / (cfg.drive_scale() * cfg.dt * area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matexp_hermitian;

    fn coupled() -> DeviceConfig {
        let mut cfg = DeviceConfig::line(2);
        cfg.qubit_freq = vec![5.0e9, 5.2e9];
        cfg.coupling = vec![40e6, 40e6];
        cfg.bus_freq = 6.8e9;
        cfg
    }

    #[test]
    fn drift_is_hermitian() {
        let h = static_hamiltonian(&coupled()).unwrap();
        assert!(h.hermitian_residual() <= 1e-12 * h.max_abs());
    }

    #[test]
    fn uncoupled_spectrum_is_additive() {
        let mut cfg = coupled();
        cfg.coupling.clear();
        let h = static_hamiltonian(&cfg).unwrap();
        let mut vals: Vec<f64> = eigh(&h).values;
        let mut expected = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for m in 0..3 {
                    expected.push(TWO_PI * (a as f64 * 5.0e9 + b as f64 * 5.2e9 + m as f64 * 6.8e9));
                }
            }
        }
        vals.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(&expected) {
            assert!((v - e).abs() < 1e-6 * e.abs().max(1.0));
        }
    }

    #[test]
    fn single_qubit_without_bus() {
        let mut cfg = DeviceConfig::line(1);
        cfg.bus_cutoff = 1;
        let h = static_hamiltonian(&cfg).unwrap();
        assert_eq!(h[(0, 0)].re, 0.0);
        assert!((h[(1, 1)].re - TWO_PI * cfg.qubit_freq[0]).abs() < 1e-3);
    }

    #[test]
    fn dressed_gaps_follow_dispersive_estimate() {
        let cfg = coupled();
        let frame = rotating_frame(&cfg).unwrap();
        for q in 0..2 {
            let (nu, wb, g) = (cfg.qubit_freq[q], cfg.bus_freq, cfg.coupling[q]);
            // second-order shift of the qubit line with σx(a + a†) coupling:
            // g²/Δ from the exchange term plus g²/Σ from the counter-rotating one
            let shift = g * g / (nu - wb) + g * g / (nu + wb);
            let measured = frame.qubit_omega[q] / TWO_PI - cfg.qubit_freq[q];
            assert!((measured - shift).abs() <= 0.02 * shift.abs(), "q{q}: {measured} vs {shift}");
        }
    }

    #[test]
    fn zero_envelope_gives_zero_drive() {
        let cfg = coupled();
        let f = rotating_frame(&cfg).unwrap();
        let h = drive_hamiltonian(&cfg, &f, &Channel::drive(0), C64::new(0.0, 0.0), 1e-9).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn real_drive_is_cosine_modulated_sigma_x() {
        let mut cfg = DeviceConfig::line(1);
        cfg.bus_cutoff = 1;
        let f = rotating_frame(&cfg).unwrap();
        let t = 0.37e-9;
        let h = drive_hamiltonian(&cfg, &f, &Channel::drive(0), C64::new(0.1, 0.0), t).unwrap();
        let expected = cfg.drive_scale() * 0.1 * (f.qubit_omega[0] * t).cos();
        assert!((h[(0, 1)].re - expected).abs() < 1e-6 * expected.abs().max(1.0));
        assert_eq!(h[(0, 0)].re, 0.0);
    }

    #[test]
    fn effective_cr_scales_linearly_and_vanishes_at_zero() {
        let cfg = DeviceConfig::line(2);
        assert_eq!(effective_cr(&cfg, 0.0, 736).unwrap(), CRCoefficients::default());
        let c = effective_cr(&cfg, 0.2, 736).unwrap();
        assert!((c.a_x - 0.2 * cfg.cr_rates.a_x).abs() < 1e-9);
    }

    #[test]
    fn printed_matrix_shape_at_70ns() {
        // block for control |0⟩ close to identity, control |1⟩ a partial X turn
        let cfg = DeviceConfig::line(2);
        let c = effective_cr(&cfg, 0.2, 736).unwrap();
        let t = 70.4e-9;
        let block = |sign: f64| {
            let h = CMatrix::from_rows(&[
                vec![C64::new(c.b_z + sign * c.a_z, 0.0), C64::new(c.b_x + sign * c.a_x, -(c.b_y + sign * c.a_y))],
                vec![C64::new(c.b_x + sign * c.a_x, c.b_y + sign * c.a_y), C64::new(-(c.b_z + sign * c.a_z), 0.0)],
            ]);
            matexp_hermitian(&h, t).unwrap()
        };
        let u0 = block(1.0);
        let u1 = block(-1.0);
        assert!(u0[(0, 0)].norm() > 0.99);
        assert!(u1[(0, 0)].norm() < 0.95 && u1[(0, 1)].norm() > 0.3);
    }

    #[test]
    fn pi_half_calibration_matches_convention() {
        let cfg = DeviceConfig::line(1);
        // with zero DRAG the 160-sample pulse is the calibration Gaussian
        assert!((calibrate_pi_half(&cfg, 160) - 0.2).abs() < 1e-12);
        assert!((calibrate_pi_half(&cfg, 320) - 0.1).abs() < 1e-3);
    }

    #[test]
    fn cr_time_counts_ramps() {
        let cfg = DeviceConfig::line(2);
        let t = cr_effective_time(&cfg, 736) / cfg.dt;
        assert!(t > 480.0 && t < 736.0);
    }
}
