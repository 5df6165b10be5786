//! Local-equivalence classes of two-qubit gates.
//!
//! A two-qubit unitary is `(A⊗B)·exp(i(c1·XX + c2·YY + c3·ZZ))·(C⊗D)` up to
//! phase. The class is labelled by the canonical point of the Weyl chamber
//! `π/2 − c2 ≥ c1 ≥ c2 ≥ c3 ≥ 0`, with `(c1, c2, 0) ~ (π/2 − c1, c2, 0)`
//! resolved towards `c1 ≤ π/4`. CNOT sits at `(π/4, 0, 0)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{eigh, CMatrix, C64};

const UNITARY_TOL: f64 = 1e-8;
/// Coordinates closer than this to a chamber face are snapped onto it.
const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylPoint {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl WeylPoint {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        WeylPoint { c1, c2, c3 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Largest coordinate difference, accounting for the identified base
    /// points.
    pub fn distance(&self, other: &WeylPoint) -> f64 {
        let d = |a: &WeylPoint, b: &WeylPoint| {
            (a.c1 - b.c1).abs().max((a.c2 - b.c2).abs()).max((a.c3 - b.c3).abs())
        };
        let direct = d(self, other);
        if self.c3.abs() < 1e-6 && other.c3.abs() < 1e-6 {
            let mirrored = WeylPoint::new(FRAC_PI_2 - other.c1, other.c2, other.c3);
            direct.min(d(self, &mirrored))
        } else {
            direct
        }
    }

    /// `exp(i(c1·XX + c2·YY + c3·ZZ))`.
    pub fn canonical_gate(&self) -> CMatrix {
        // XX, YY and ZZ share the Bell basis; act on it diagonally
        let (a, b, c) = (self.c1, self.c2, self.c3);
        let e = |t: f64| C64::from_polar(1.0, t);
        // eigenvalues on (|00⟩±|11⟩)/√2 and (|01⟩±|10⟩)/√2
        let p00 = e(a - b + c);
        let m00 = e(-a + b + c);
        let p01 = e(a + b - c);
        let m01 = e(-a - b - c);
        let half = C64::new(0.5, 0.0);
        let z = C64::new(0.0, 0.0);
        CMatrix::from_rows(&[
            vec![half * (p00 + m00), z, z, half * (p00 - m00)],
            vec![z, half * (p01 + m01), half * (p01 - m01), z],
            vec![z, half * (p01 - m01), half * (p01 + m01), z],
            vec![half * (p00 - m00), z, z, half * (p00 + m00)],
        ])
    }
}

fn magic() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, s));
    CMatrix::from_rows(&[
        vec![o, z, z, i],
        vec![z, i, o, z],
        vec![z, i, -o, z],
        vec![o, z, z, -i],
    ])
}

fn check_two_qubit_unitary(u: &CMatrix) -> Result<()> {
    if u.rows() != 4 || u.cols() != 4 {
        return Err(Error::Validation(format!("expected a 4x4 unitary, got {}x{}", u.rows(), u.cols())));
    }
    let r = u.unitarity_residual();
    if r > UNITARY_TOL {
        return Err(Error::Validation(format!("matrix is not unitary (residual {r:.2e})")));
    }
    Ok(())
}

/// Eigenvalues of a symmetric unitary matrix. Its real and imaginary parts
/// are commuting real symmetric matrices, so a generic real combination of
/// them has the same eigenvectors.
fn symmetric_unitary_eigenvalues(m: &CMatrix) -> Vec<C64> {
    let n = m.rows();
    let mut best: Option<(f64, Vec<C64>)> = None;
    for mix in [0.618_033_988_749_895, std::f64::consts::SQRT_2, -0.381_966_011_250_105, std::f64::consts::E] {
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = m[(i, j)];
                h[(i, j)] = C64::new(v.re + mix * v.im, 0.0);
            }
        }
        let eig = eigh(&h);
        let d = eig.vectors.dagger().matmul(m).matmul(&eig.vectors);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        let vals: Vec<C64> = (0..n).map(|i| d[(i, i)]).collect();
        if off < 1e-10 {
            return vals;
        }
        if best.as_ref().is_none_or(|(o, _)| off < *o) {
            best = Some((off, vals));
        }
    }
    best.expect("at least one attempt").1
}

/// Folds an arbitrary interaction vector into the chamber.
fn canonicalize(k: [f64; 3]) -> WeylPoint {
    // each coordinate is defined modulo π/2
    let mut v = k.map(|c| (c + FRAC_PI_4).rem_euclid(FRAC_PI_2) - FRAC_PI_4);
    // simultaneous sign flips of two coordinates and permutations are free
    let sign: f64 = v.iter().map(|c| if *c < 0.0 { -1.0 } else { 1.0 }).product();
    v.iter_mut().for_each(|c| *c = c.abs());
    v.sort_by(|a, b| b.total_cmp(a));
    let (c1, c2, mut c3) = (v[0], v[1], sign * v[2]);
    // on the c1 = π/4 face a lone sign flip is also free
    if (c1 - FRAC_PI_4).abs() < FACE_TOL {
        c3 = c3.abs();
    }
    if c3 < -FACE_TOL {
        WeylPoint::new(FRAC_PI_2 - c1, c2, -c3)
    } else {
        WeylPoint::new(c1.min(FRAC_PI_4), c2, c3.abs())
    }
}

/// Canonical Weyl-chamber point of a two-qubit unitary.
pub fn weyl_coordinates(u: &CMatrix) -> Result<WeylPoint> {
    check_two_qubit_unitary(u)?;
    let b = magic();
    let mut ub = b.dagger().matmul(u).matmul(&b);
    let det = ub.determinant();
    ub = ub.scale(C64::from_polar(1.0, -det.arg() / 4.0));
    let m = ub.transpose().matmul(&ub);
    // eigenvalues are e^{2iθ_j} for the magic-basis phases θ_j of the
    // interaction term; pick representatives summing to zero
    let mut theta: Vec<f64> = symmetric_unitary_eigenvalues(&m).iter().map(|e| e.arg() / 2.0).collect();
    theta.sort_by(|a, b| b.total_cmp(a));
    let shift = (theta.iter().sum::<f64>() / PI).round() as i64;
    if shift > 0 {
        theta.iter_mut().take(shift as usize).for_each(|t| *t -= PI);
    } else if shift < 0 {
        theta.iter_mut().rev().take((-shift) as usize).for_each(|t| *t += PI);
    }
    theta.sort_by(|a, b| b.total_cmp(a));
    let k = [
        (theta[0] + theta[1]) / 2.0,
        (theta[0] + theta[2]) / 2.0,
        (theta[1] + theta[2]) / 2.0,
    ];
    Ok(canonicalize(k))
}

/// True iff `u` and `v` differ only by single-qubit gates and phase.
pub fn locally_equivalent(u: &CMatrix, v: &CMatrix) -> Result<bool> {
    Ok(weyl_coordinates(u)?.distance(&weyl_coordinates(v)?) < 1e-6)
}

/// Makhlin's local invariants `(G1, G2)` computed from the matrix.
pub fn makhlin_invariants(u: &CMatrix) -> Result<(C64, f64)> {
    check_two_qubit_unitary(u)?;
    let b = magic();
    let ub = b.dagger().matmul(u).matmul(&b);
    let m = ub.transpose().matmul(&ub);
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = m.matmul(&m).trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - tr2) / (det * 4.0);
    Ok((g1, g2.re))
}

/// Makhlin invariants of the class at `p`, in closed form.
pub fn makhlin_from_point(p: &WeylPoint) -> (C64, f64) {
    let [a, b, c] = p.as_array().map(|x| 2.0 * x);
    let (ca, cb, cc) = (a.cos().powi(2), b.cos().powi(2), c.cos().powi(2));
    let (sa, sb, sc) = (a.sin().powi(2), b.sin().powi(2), c.sin().powi(2));
    let g1 = C64::new(ca * cb * cc - sa * sb * sc, 0.25 * (2.0 * a).sin() * (2.0 * b).sin() * (2.0 * c).sin());
    let g2 = 4.0 * ca * cb * cc - 4.0 * sa * sb * sc - (2.0 * a).cos() * (2.0 * b).cos() * (2.0 * c).cos();
    (g1, g2)
}
