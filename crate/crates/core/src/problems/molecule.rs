//! Pauli-string Hamiltonian files.
//!
//! One term per line as `coefficient LETTERS`. Lines starting with `#` are
//! comments; those of the form `# key: value` are headers.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ground_energy, ObservableSum, PauliTerm};

/// Agreement required between the stated reference and exact
/// diagonalization when loading strictly, Hartree.
pub const REFERENCE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeTask {
    pub label: String,
    /// Å.
    pub bond_length: f64,
    pub hamiltonian: ObservableSum,
    /// Exact ground energy, Hartree.
    pub fci_reference: f64,
}

impl MoleculeTask {
    /// `1 − |E − E_ref| / |E_ref|`.
    pub fn accuracy(&self, energy: f64) -> f64 {
        1.0 - (energy - self.fci_reference).abs() / self.fci_reference.abs()
    }
}

/// Parsed file: headers and the merged observable.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianFile {
    pub headers: BTreeMap<String, String>,
    pub observable: ObservableSum,
}

fn header(line: &str) -> Option<(String, String)> {
    let body = line.strip_prefix('#')?.trim();
    let (key, value) = body.split_once(':')?;
    let key = key.trim();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((key.to_string(), value.trim().to_string()))
}

pub fn parse_pauli_hamiltonian(text: &str) -> Result<HamiltonianFile> {
    let mut headers = BTreeMap::new();
    let mut terms = Vec::new();
    let mut width: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some((k, v)) = header(line) {
                headers.entry(k).or_insert(v);
            }
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut parts = line.split_whitespace();
        let (Some(coef), Some(letters), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `coefficient letters`, got `{line}`")));
        };
        let c: f64 = coef
            .parse()
            .map_err(|_| err(format!("coefficient `{coef}` is not a number")))?;
        let term = PauliTerm::new(c, letters).map_err(|e| err(e.to_string()))?;
        match width {
            None => width = Some(term.n_qubits()),
            Some(w) if w != term.n_qubits() => {
                return Err(err(format!("term `{letters}` has {} letters, earlier terms have {w}", term.n_qubits())));
            }
            _ => {}
        }
        terms.push(term);
    }
    let n = width.ok_or(Error::Parse {
        line: 0,
        msg: "file contains no terms".into(),
    })?;
    Ok(HamiltonianFile {
        headers,
        observable: ObservableSum::new(n, terms)?,
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a Pauli-string file into a merged observable.
pub fn load_pauli_hamiltonian(path: impl AsRef<Path>) -> Result<ObservableSum> {
    let path = path.as_ref();
    Ok(parse_pauli_hamiltonian(&read(path)?)?.observable)
}

fn task_from(file: HamiltonianFile, fallback_label: &str, strict: bool) -> Result<MoleculeTask> {
    let get_f64 = |key: &str| -> Result<Option<f64>> {
        file.headers
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Validation(format!("header `{key}` = `{v}` is not a number")))
            })
            .transpose()
    };
    let bond_length = get_f64("bond_length")?.unwrap_or(f64::NAN);
    let exact = ground_energy(&file.observable)?.0;
    let fci_reference = match get_f64("fci_reference")? {
        Some(e) => {
            if strict && (e - exact).abs() > REFERENCE_TOLERANCE {
                return Err(Error::Validation(format!(
                    "fci_reference {e} disagrees with the exact ground energy {exact:.10}"
                )));
            }
            e
        }
        None => exact,
    };
    Ok(MoleculeTask {
        label: file.headers.get("label").cloned().unwrap_or_else(|| fallback_label.to_string()),
        bond_length,
        hamiltonian: file.observable,
        fci_reference,
    })
}

/// Loads a molecule file. In strict mode the stated reference energy must
/// match exact diagonalization; a missing reference is filled in from it.
pub fn load_molecule(path: impl AsRef<Path>, strict: bool) -> Result<MoleculeTask> {
    let path = path.as_ref();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("molecule");
    task_from(parse_pauli_hamiltonian(&read(path)?)?, stem, strict)
}

pub fn parse_molecule(text: &str, strict: bool) -> Result<MoleculeTask> {
    task_from(parse_pauli_hamiltonian(text)?, "molecule", strict)
}
