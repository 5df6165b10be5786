//! Dense linear algebra, Pauli observables and state vectors.

pub mod eigen;
pub mod matrix;
pub mod pauli;
pub mod state;

pub use eigen::{eigh, matexp_hermitian, HermitianEigen};
pub use matrix::{kron, CMatrix, C64, MAX_DENSE_DIM};
pub use pauli::{pauli_matrix, ObservableSum, PauliTerm};
pub use state::{
    basis_change, bitstring, expectation, ground_energy, parity_expectation, rotate_for_measurement, sample_counts, Counts,
    StateVector,
};
