//! Two-qubit gate classification, coverage sampling and Hamiltonian
//! tomography.

mod coverage;
mod tomography;
mod weyl;

pub use coverage::{coverage_scan, multi_cr_schedule, single_cr_schedule, CoverageReport};
pub use tomography::{cr_tomography, default_durations, TomographyReport, TomographySettings};
pub use weyl::{locally_equivalent, makhlin_from_point, makhlin_invariants, weyl_coordinates, WeylPoint};
