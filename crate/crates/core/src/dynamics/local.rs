//! Small dense operators on a few qubits and their action on register states.

use crate::qcore::{CMatrix, C64};

/// Adds `coef · ⊗ σ` to a `2^m`-dimensional local operator. `ops` pairs a
/// local qubit position (0 = most significant) with `b'X'`, `b'Y'` or `b'Z'`.
pub(crate) fn add_pauli(h: &mut CMatrix, m: usize, ops: &[(usize, u8)], coef: f64) {
    if coef == 0.0 {
        return;
    }
    let mut x = 0usize;
    let mut z = 0usize;
    let mut ny = 0u32;
    for &(pos, letter) in ops {
        let bit = 1 << (m - 1 - pos);
        match letter {
            b'X' => x |= bit,
            b'Y' => {
                x |= bit;
                z |= bit;
                ny += 1;
            }
            b'Z' => z |= bit,
            _ => unreachable!("pauli letter"),
        }
    }
    let phase = C64::new(0.0, 1.0).powu(ny) * coef;
    for i in 0..1usize << m {
        let sign = if (i & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        h[(i ^ x, i)] += phase * sign;
    }
}

/// Adds `coef` times the identity.
pub(crate) fn add_identity(h: &mut CMatrix, coef: f64) {
    for i in 0..h.rows() {
        h[(i, i)] += C64::new(coef, 0.0);
    }
}

/// Applies `u` (acting on `qubits`, first listed = most significant) to a
/// register state on `n` qubits.
pub(crate) fn apply_local(state: &mut [C64], n: usize, qubits: &[usize], u: &CMatrix) {
    let k = qubits.len();
    let bits: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    if k == 1 {
        let b = 1usize << bits[0];
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        for i in 0..state.len() {
            if i & b == 0 {
                let a0 = state[i];
                let a1 = state[i | b];
                state[i] = u00 * a0 + u01 * a1;
                state[i | b] = u10 * a0 + u11 * a1;
            }
        }
        return;
    }
    let mask: usize = bits.iter().map(|&b| 1usize << b).sum();
    let local_dim = 1usize << k;
    let offsets: Vec<usize> = (0..local_dim)
        .map(|l| {
            (0..k)
                .filter(|&j| l >> (k - 1 - j) & 1 == 1)
                .map(|j| 1usize << bits[j])
                .sum()
        })
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); local_dim];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (l, off) in offsets.iter().enumerate() {
            buf[l] = state[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, &b) in buf.iter().enumerate() {
                acc += u[(r, c)] * b;
            }
            state[base | off] = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kron, pauli_matrix, PauliTerm};

    #[test]
    fn add_pauli_matches_dense_pauli() {
        let mut h = CMatrix::zeros(4, 4);
        add_pauli(&mut h, 2, &[(0, b'Z'), (1, b'Y')], 0.7);
        let dense = pauli_matrix(&PauliTerm::new(0.7, "ZY").unwrap()).unwrap();
        assert!(h.max_abs_diff(&dense) < 1e-15);
    }

    #[test]
    fn apply_local_matches_kron_embedding() {
        // U on qubits [2, 0] of a 3-qubit register, compared to a dense build
        let u = pauli_matrix(&PauliTerm::new(1.0, "XY").unwrap()).unwrap();
        let mut state: Vec<C64> = (0..8).map(|i| C64::new(i as f64, 0.5 * i as f64)).collect();
        let dense = pauli_matrix(&PauliTerm::new(1.0, "YIX").unwrap()).unwrap();
        let expected = dense.matvec(&state);
        apply_local(&mut state, 3, &[2, 0], &u);
        for (a, b) in state.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
        let single = pauli_matrix(&PauliTerm::new(1.0, "Z").unwrap()).unwrap();
        let mut s2: Vec<C64> = (0..4).map(|i| C64::new(1.0 + i as f64, 0.0)).collect();
        let e2 = kron(&CMatrix::identity(2), &single).unwrap().matvec(&s2);
        apply_local(&mut s2, 2, &[1], &single);
        assert_eq!(s2, e2);
    }
}
