"""Generate two-qubit molecular Hamiltonian files (STO-3G) with PySCF.

The electronic Hamiltonian is built in the four spin-orbital Fock space with the
Jordan-Wigner mapping, restricted to the (N_alpha = 1, N_beta = 1) sector, and
written on two qubits in the parity-reduced encoding:

    qubit 0 = occupation of spatial orbital 0 by the alpha electron
    qubit 1 = occupation of spatial orbital 1 by the beta electron

so the Hartree-Fock determinant is |10>. Nuclear repulsion is folded into the
identity coefficient. Usage: python3 gen_hamiltonians.py OUTDIR
"""
import itertools
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}


def fock_hamiltonian(h1, h2, n_orb):
    """JW matrix of the spin-orbital Hamiltonian; spin orbital p = 2*i + spin."""
    n_so = 2 * n_orb
    dim = 2**n_so

    def ann(p):
        op = np.array([[1.0]])
        for q in range(n_so):
            if q < p:
                f = PAULI["Z"]
            elif q == p:
                f = np.array([[0, 1], [0, 0]], dtype=complex)
            else:
                f = PAULI["I"]
            op = np.kron(op, f)
        return op

    a = [ann(p) for p in range(n_so)]
    ad = [m.conj().T for m in a]
    H = np.zeros((dim, dim), dtype=complex)
    for p, q in itertools.product(range(n_so), repeat=2):
        if p % 2 != q % 2:
            continue
        H += h1[p // 2, q // 2] * ad[p] @ a[q]
    for p, q, r, s in itertools.product(range(n_so), repeat=4):
        # chemists' notation (pq|rs) -> 1/2 sum a+_p a+_r a_s a_q
        if p % 2 != q % 2 or r % 2 != s % 2:
            continue
        v = h2[p // 2, q // 2, r // 2, s // 2]
        if abs(v) < 1e-14:
            continue
        H += 0.5 * v * ad[p] @ ad[r] @ a[s] @ a[q]
    return H


def occ_index(occ, n_so):
    idx = 0
    for p in range(n_so):
        idx = (idx << 1) | occ[p]
    return idx


def build(geometry, charge, label, bond):
    mol = gto.M(atom=geometry, basis="sto-3g", charge=charge, spin=0, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    C = mf.mo_coeff
    n_orb = C.shape[1]
    assert n_orb == 2
    h1 = C.T @ mf.get_hcore() @ C
    h2 = ao2mo.restore(1, ao2mo.kernel(mol, C), n_orb)
    H = fock_hamiltonian(h1, h2, n_orb)
    n_so = 4
    # reduced basis |q0 q1>: q0 = alpha in orbital 0, q1 = beta in orbital 1
    basis = []
    for q0, q1 in itertools.product([0, 1], repeat=2):
        a_orb = 0 if q0 == 1 else 1
        b_orb = 1 if q1 == 1 else 0
        occ = [0] * n_so
        occ[2 * a_orb + 0] = 1
        occ[2 * b_orb + 1] = 1
        basis.append(occ_index(occ, n_so))
    P = np.zeros((4, 4), dtype=complex)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            P[i, j] = H[bi, bj]
    P += mol.energy_nuc() * np.eye(4)
    terms = []
    for l0, l1 in itertools.product("IXYZ", repeat=2):
        m = np.kron(PAULI[l0], PAULI[l1])
        c = np.trace(m @ P).real / 4.0
        if abs(c) > 1e-12:
            terms.append((c, l0 + l1))
    e_fci = fci.FCI(mf).kernel()[0]
    e_red = np.linalg.eigvalsh(P)[0]
    assert abs(e_fci - e_red) < 1e-8, (e_fci, e_red)
    return terms, e_fci, mf.e_tot


def write(outdir, name, label, bond, geometry, charge):
    terms, e_fci, e_hf = build(geometry, charge, label, bond)
    with open(f"{outdir}/{name}", "w") as f:
        f.write(f"# label: {label}\n")
        f.write(f"# bond_length: {bond}\n")
        f.write(f"# fci_reference: {e_fci:.10f}\n")
        f.write(f"# hf_energy: {e_hf:.10f}\n")
        f.write("# source: PySCF RHF/FCI, STO-3G, Jordan-Wigner on 4 spin orbitals,\n")
        f.write("#   projected onto the N_alpha=1, N_beta=1 sector (parity two-qubit reduction)\n")
        f.write("#   qubit 0 = alpha in orbital 0, qubit 1 = beta in orbital 1; HF state |10>\n")
        f.write(f"# geometry: {geometry}\n")
        for c, s in terms:
            f.write(f"{c:.12f} {s}\n")
    print(name, "fci", e_fci, "hf", e_hf)


if __name__ == "__main__":
    out = sys.argv[1]
    for r in [0.1, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5]:
        write(out, f"h2_{r:.2f}.ham", "H2", r, f"H 0 0 0; H 0 0 {r}", 0)
    for r in [0.5, 0.65, 0.775, 0.85, 0.9, 0.95, 1.0, 1.25, 1.5, 2.0]:
        write(out, f"heh_plus_{r:.3f}.ham", "HeH+", r, f"He 0 0 0; H 0 0 {r}", 1)
    # equilibrium alias used by the default HeH+ experiment
    write(out, "heh_plus.ham", "HeH+", 0.9, "He 0 0 0; H 0 0 0.9", 1)
