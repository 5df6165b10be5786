//! Problem Hamiltonians and their estimation: molecular Pauli-string files,
//! MaxCut cost observables, exact and sampled expectation values.

mod estimator;
mod graph;
mod molecule;

pub use estimator::{
    best_bitstring, derived_seed, estimate, final_state, EstimatorConfig, EstimatorMode, Grouping, MeasurementBasis,
};
pub use graph::{approximation_ratio, load_graph, maxcut_to_ising, parse_graph, Graph, MAX_ENUMERATION_NODES};
pub use molecule::{
    load_molecule, load_pauli_hamiltonian, parse_molecule, parse_pauli_hamiltonian, HamiltonianFile, MoleculeTask,
    REFERENCE_TOLERANCE,
};
