use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eigen::eigh;
use super::matrix::{CMatrix, C64, I, ONE, ZERO};
use super::pauli::ObservableSum;
use crate::error::{Error, Result};

/// Largest register `ground_energy` will diagonalize densely.
pub const MAX_QUBITS: usize = 10;

/// Pure state of a qubit register (or, inside the simulator, of qubits plus bus).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Validation("state vector must be non-empty".into()));
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalizes the given amplitudes.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Validation("cannot normalize a zero state".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        StateVector::new(amplitudes)
    }

    /// Computational basis state `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        StateVector { amplitudes }
    }

    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(1 << n_qubits, 0)
    }

    /// Basis state from a bitstring such as `"01"` (qubit 0 leftmost).
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| Error::Validation(format!("invalid bitstring `{bits}`")))?;
        Ok(Self::basis(1 << bits.len(), index))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply(&self, u: &CMatrix) -> Result<StateVector> {
        if u.cols() != self.dim() {
            return Err(Error::Validation(format!(
                "operator with {} columns applied to state of dimension {}",
                u.cols(),
                self.dim()
            )));
        }
        StateVector::new(u.matvec(&self.amplitudes))
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim().is_power_of_two().then(|| self.dim().trailing_zeros() as usize)
    }

    /// Applies a 2x2 gate to qubit `q` in place.
    pub fn apply_single(&mut self, q: usize, u: &CMatrix) -> Result<()> {
        let n = self
            .n_qubits()
            .ok_or_else(|| Error::Validation("state is not a qubit register".into()))?;
        if q >= n || u.rows() != 2 || u.cols() != 2 {
            return Err(Error::Validation(format!("cannot apply a {}x{} gate to qubit {q} of {n}", u.rows(), u.cols())));
        }
        let bit = 1usize << (n - 1 - q);
        let amps = self.amplitudes_mut();
        for i in 0..amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (amps[i], amps[i | bit]);
                amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                amps[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Ok(())
    }
}

/// Single-qubit rotation mapping the eigenbasis of Pauli `letter` onto the
/// computational basis (`+1` eigenstate to `|0⟩`).
pub fn basis_change(letter: u8) -> Result<CMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = |a: C64, b: C64, c: C64, d: C64| CMatrix::from_rows(&[vec![a, b], vec![c, d]]);
    let (p, m) = (C64::new(s, 0.0), C64::new(-s, 0.0));
    match letter {
        b'I' | b'Z' => Ok(CMatrix::identity(2)),
        // Hadamard
        b'X' => Ok(r(p, p, p, m)),
        // exp(-iπX/4)
        b'Y' => Ok(r(p, C64::new(0.0, -s), C64::new(0.0, -s), p)),
        other => Err(Error::Validation(format!("invalid Pauli letter `{}`", other as char))),
    }
}

/// Copy of `state` rotated so that a computational-basis measurement reads
/// out the Pauli string `letters`.
pub fn rotate_for_measurement(state: &StateVector, letters: &str) -> Result<StateVector> {
    if Some(letters.len()) != state.n_qubits() {
        return Err(Error::Validation(format!(
            "measurement basis `{letters}` does not match a {}-dimensional state",
            state.dim()
        )));
    }
    let mut out = state.clone();
    for (q, l) in letters.bytes().enumerate() {
        if l != b'I' && l != b'Z' {
            out.apply_single(q, &basis_change(l)?)?;
        }
    }
    Ok(out)
}

/// `⟨ψ|H|ψ⟩` for an observable on the qubit register.
pub fn expectation(state: &StateVector, obs: &ObservableSum) -> Result<f64> {
    if state.dim() != obs.dim() {
        return Err(Error::Validation(format!(
            "state dimension {} does not match {}-qubit observable",
            state.dim(),
            obs.n_qubits()
        )));
    }
    let psi = state.amplitudes();
    let mut total = ZERO;
    for term in obs.terms() {
        let (xm, zm) = term.masks();
        let phase = I.powu(term.y_count());
        let mut acc = ZERO;
        for (i, &a) in psi.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += psi[i ^ xm].conj() * a * sign;
        }
        total += acc * phase * term.coefficient;
    }
    debug_assert!(
        total.im.abs() <= 1e-10 * (1.0 + total.re.abs()),
        "expectation has imaginary residual {}",
        total.im
    );
    Ok(total.re)
}

/// Lowest eigenvalue and a corresponding eigenvector of the observable.
pub fn ground_energy(obs: &ObservableSum) -> Result<(f64, StateVector)> {
    if obs.n_qubits() > MAX_QUBITS {
        return Err(Error::Capacity {
            dim: obs.dim(),
            max: 1 << MAX_QUBITS,
        });
    }
    if obs.is_diagonal() {
        let d = obs.diagonal();
        let (idx, &e) = d
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("observable dimension is positive");
        return Ok((e, StateVector::basis(d.len(), idx)));
    }
    let eig = eigh(&obs.to_matrix()?);
    let v = eig.vectors.column(0);
    Ok((eig.values[0], StateVector::normalized(v)?))
}

/// Measurement histogram keyed by bitstring (qubit 0 leftmost).
pub type Counts = BTreeMap<String, u64>;

pub fn bitstring(index: usize, n_bits: usize) -> String {
    (0..n_bits)
        .map(|q| if index >> (n_bits - 1 - q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Draws `shots` computational-basis samples; the same seed gives the same
/// histogram.
pub fn sample_counts(state: &StateVector, shots: u64, seed: u64) -> Counts {
    let n_bits = state.dim().trailing_zeros() as usize;
    let mut cdf = Vec::with_capacity(state.dim());
    let mut acc = 0.0;
    for p in state.probabilities() {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; state.dim()];
    for _ in 0..shots {
        let r = rng.gen::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= r).min(cdf.len() - 1);
        hits[k] += 1;
    }
    hits.iter()
        .enumerate()
        .filter(|(_, &h)| h > 0)
        .map(|(i, &h)| (bitstring(i, n_bits), h))
        .collect()
}

/// Empirical `⟨Z_mask⟩` from a histogram: the parity of the masked bits.
pub fn parity_expectation(counts: &Counts, qubits: &[usize]) -> f64 {
    let shots: u64 = counts.values().sum();
    if shots == 0 {
        return 0.0;
    }
    let s: i64 = counts
        .iter()
        .map(|(bits, &n)| {
            let b = bits.as_bytes();
            let ones = qubits.iter().filter(|&&q| b[q] == b'1').count();
            if ones % 2 == 1 { -(n as i64) } else { n as i64 }
        })
        .sum();
    s as f64 / shots as f64
}
