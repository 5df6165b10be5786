use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::matrix::{kron, CMatrix, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Weighted Pauli string. Qubit 0 is the leftmost letter, the leftmost tensor
/// factor, and the most significant bit of basis-state indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub letters: String,
}

impl PauliTerm {
    pub fn new(coefficient: f64, letters: impl Into<String>) -> Result<Self> {
        let letters = letters.into();
        if !coefficient.is_finite() {
            return Err(Error::Validation(format!("non-finite coefficient for {letters}")));
        }
        if letters.is_empty() {
            return Err(Error::Validation("empty Pauli string".into()));
        }
        if let Some(bad) = letters.chars().find(|c| !matches!(c, 'I' | 'X' | 'Y' | 'Z')) {
            return Err(Error::Validation(format!("invalid Pauli letter `{bad}` in {letters}")));
        }
        Ok(PauliTerm {
            coefficient,
            letters,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.bytes().all(|b| b == b'I')
    }

    /// Bit masks `(x_mask, z_mask)` in basis-index convention (qubit 0 = MSB).
    pub(crate) fn masks(&self) -> (usize, usize) {
        let n = self.letters.len();
        let mut x = 0;
        let mut z = 0;
        for (q, b) in self.letters.bytes().enumerate() {
            let bit = 1 << (n - 1 - q);
            match b {
                b'X' => x |= bit,
                b'Y' => {
                    x |= bit;
                    z |= bit;
                }
                b'Z' => z |= bit,
                _ => {}
            }
        }
        (x, z)
    }

    pub(crate) fn y_count(&self) -> u32 {
        self.letters.bytes().filter(|&b| b == b'Y').count() as u32
    }
}

fn single_pauli(letter: u8) -> CMatrix {
    match letter {
        b'I' => CMatrix::identity(2),
        b'X' => CMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]),
        b'Y' => CMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]),
        b'Z' => CMatrix::from_rows(&[vec![ONE, ZERO], vec![ZERO, -ONE]]),
        _ => unreachable!("letters validated on construction"),
    }
}

/// Dense matrix `coefficient · ⊗ᵢ σ_{letter_i}`.
pub fn pauli_matrix(term: &PauliTerm) -> Result<CMatrix> {
    let mut bytes = term.letters.bytes();
    let first = bytes
        .next()
        .ok_or_else(|| Error::Validation("empty Pauli string".into()))?;
    let mut m = single_pauli(first);
    for b in bytes {
        m = kron(&m, &single_pauli(b))?;
    }
    Ok(m.scale_real(term.coefficient))
}

/// Weighted sum of Pauli strings acting on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl ObservableSum {
    /// Builds an observable, merging duplicate letter strings. Terms keep the
    /// order of their first appearance.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Validation("observable needs at least one qubit".into()));
        }
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut merged: Vec<PauliTerm> = Vec::new();
        for t in terms {
            if t.n_qubits() != n_qubits {
                return Err(Error::Validation(format!(
                    "term {} has {} letters, expected {n_qubits}",
                    t.letters,
                    t.n_qubits()
                )));
            }
            match index.get(&t.letters) {
                Some(&i) => merged[i].coefficient += t.coefficient,
                None => {
                    index.insert(t.letters.clone(), merged.len());
                    merged.push(t);
                }
            }
        }
        Ok(ObservableSum {
            n_qubits,
            terms: merged,
        })
    }

    pub fn zero(n_qubits: usize) -> Self {
        ObservableSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Sum of the identity coefficients.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.is_identity())
            .map(|t| t.coefficient)
            .sum()
    }

    /// `alpha·self + beta·other`.
    pub fn linear_combination(&self, alpha: f64, other: &ObservableSum, beta: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: alpha * t.coefficient,
                letters: t.letters.clone(),
            })
            .chain(other.terms.iter().map(|t| PauliTerm {
                coefficient: beta * t.coefficient,
                letters: t.letters.clone(),
            }));
        ObservableSum::new(self.n_qubits, terms)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.letters.bytes().all(|b| b == b'I' || b == b'Z'))
    }

    /// Dense matrix of the whole sum.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let dim = self.dim();
        if dim > super::matrix::MAX_DENSE_DIM {
            return Err(Error::Capacity {
                dim,
                max: super::matrix::MAX_DENSE_DIM,
            });
        }
        let mut m = CMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (xm, zm) = t.masks();
            let base = C64::new(t.coefficient, 0.0) * I.powu(t.y_count());
            // σ|i⟩ = phase(i)|i ^ x⟩ with Y = iXZ per qubit
            for i in 0..dim {
                let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[(i ^ xm, i)] += base * sign;
            }
        }
        Ok(m)
    }

    /// Diagonal of a Z/I-only observable.
    pub(crate) fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut d = vec![0.0; dim];
        for t in &self.terms {
            let (_, zm) = t.masks();
            for (i, v) in d.iter_mut().enumerate() {
                let sign = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                *v += t.coefficient * sign;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_string_gives_identity() {
        let m = pauli_matrix(&PauliTerm::new(1.0, "II").unwrap()).unwrap();
        assert_eq!(m, CMatrix::identity(4));
    }

    #[test]
    fn zx_term_is_scaled_kron() {
        let m = pauli_matrix(&PauliTerm::new(0.5, "ZX").unwrap()).unwrap();
        let expected = kron(&single_pauli(b'Z'), &single_pauli(b'X')).unwrap().scale_real(0.5);
        assert_eq!(m, expected);
    }

    #[test]
    fn negative_y() {
        let m = pauli_matrix(&PauliTerm::new(-1.0, "Y").unwrap()).unwrap();
        assert!(m.max_abs_diff(&single_pauli(b'Y').scale_real(-1.0)) < 1e-15);
    }

    #[test]
    fn bad_letters_rejected() {
        assert!(PauliTerm::new(1.0, "XA").is_err());
        assert!(PauliTerm::new(f64::NAN, "X").is_err());
    }

    #[test]
    fn duplicates_merge() {
        let obs = ObservableSum::new(
            1,
            [PauliTerm::new(0.3, "Z").unwrap(), PauliTerm::new(0.2, "Z").unwrap()],
        )
        .unwrap();
        assert_eq!(obs.terms().len(), 1);
        assert!((obs.terms()[0].coefficient - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ragged_terms_rejected() {
        let r = ObservableSum::new(2, [PauliTerm::new(1.0, "Z").unwrap()]);
        assert!(r.is_err());
    }

    #[test]
    fn sum_matrix_matches_termwise_matrices() {
        let terms = [
            PauliTerm::new(0.7, "XY").unwrap(),
            PauliTerm::new(-0.2, "ZI").unwrap(),
            PauliTerm::new(0.1, "YZ").unwrap(),
        ];
        let obs = ObservableSum::new(2, terms.clone()).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        for t in &terms {
            expected = &expected + &pauli_matrix(t).unwrap();
        }
        assert!(obs.to_matrix().unwrap().max_abs_diff(&expected) < 1e-15);
    }
}
