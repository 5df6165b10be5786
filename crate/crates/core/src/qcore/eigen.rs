//! Hermitian eigendecomposition by cyclic Jacobi rotations, and the unitary
//! propagator `exp(-i H t)` built on it.

use super::matrix::{CMatrix, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Off-diagonal Frobenius norm (relative to the matrix norm) at which the
/// Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition. The input is assumed Hermitian; only
/// exact Hermitian parts are meaningful.
pub fn eigh(h: &CMatrix) -> HermitianEigen {
    assert!(h.is_square(), "eigh needs a square matrix");
    let n = h.rows();
    let mut a = h.clone();
    let mut v = CMatrix::identity(n);
    let scale = h.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let babs = b.norm();
                if babs <= f64::EPSILON * 1e-3 * scale {
                    continue;
                }
                let phase = b / babs; // e^{iφ}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V <- V G
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    HermitianEigen { values, vectors }
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Validation(format!(
            "expected a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let residual = h.hermitian_residual();
    if residual > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (residual {residual:.3e})"
        )));
    }
    Ok(())
}

/// `exp(-i h t)` for Hermitian `h` (angular-frequency units) via
/// eigendecomposition.
pub fn matexp_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    check_hermitian(h)?;
    Ok(expm_unchecked(h, t))
}

pub(crate) fn expm_unchecked(h: &CMatrix, t: f64) -> CMatrix {
    if h.rows() == 2 {
        return expm_2x2(h, t);
    }
    let eig = eigh(h);
    let n = h.rows();
    let phases: Vec<C64> = eig.values.iter().map(|&l| (-I * l * t).exp()).collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut s = ZERO;
            for k in 0..n {
                s += eig.vectors[(i, k)] * phases[k] * eig.vectors[(j, k)].conj();
            }
            out[(i, j)] = s;
        }
    }
    out
}

/// Closed form for 2x2 Hermitian `h = h0·I + n·σ`.
pub(crate) fn expm_2x2(h: &CMatrix, t: f64) -> CMatrix {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let h0 = 0.5 * (a + d);
    let nz = 0.5 * (a - d);
    let nx = b.re;
    let ny = -b.im;
    let r = (nx * nx + ny * ny + nz * nz).sqrt();
    let global = (-I * h0 * t).exp();
    let (c, s_over_r) = if r * t.abs() < 1e-300 {
        (1.0, t)
    } else {
        ((r * t).cos(), (r * t).sin() / r)
    };
    // exp(-i t n·σ) = cos(rt) I - i sin(rt)/r (n·σ)
    let m00 = C64::new(c, 0.0) - I * s_over_r * nz;
    let m11 = C64::new(c, 0.0) + I * s_over_r * nz;
    let m01 = -I * s_over_r * C64::new(nx, -ny);
    let m10 = -I * s_over_r * C64::new(nx, ny);
    CMatrix::from_rows(&[vec![global * m00, global * m01], vec![global * m10, global * m11]])
}

/// Applies `exp(-i h t)` for a 2x2 Hermitian given as `(h0, nx, ny, nz)`.
#[cfg(test)]
pub(crate) fn su2_from_vector(nx: f64, ny: f64, nz: f64, t: f64) -> [C64; 4] {
    let r = (nx * nx + ny * ny + nz * nz).sqrt();
    let (c, s_over_r) = if r * t.abs() < 1e-300 {
        (1.0, t)
    } else {
        ((r * t).cos(), (r * t).sin() / r)
    };
    [
        C64::new(c, -s_over_r * nz),
        C64::new(-s_over_r * ny, -s_over_r * nx),
        C64::new(s_over_r * ny, -s_over_r * nx),
        C64::new(c, s_over_r * nz),
    ]
}

#[allow(dead_code)]
pub(crate) fn identity_2() -> [C64; 4] {
    [ONE, ZERO, ZERO, ONE]
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    /// Taylor series of exp(-i h t), the brute-force oracle.
    fn taylor_expm(h: &CMatrix, t: f64, terms: usize) -> CMatrix {
        let n = h.rows();
        let a = h.scale(-I * t);
        let mut out = CMatrix::identity(n);
        let mut term = CMatrix::identity(n);
        for k in 1..terms {
            term = term.matmul(&a).scale_real(1.0 / k as f64);
            out = &out + &term;
        }
        out
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let u = matexp_hermitian(&CMatrix::zeros(4, 4), 3.7).unwrap();
        assert!(u.max_abs_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn half_pi_x_gives_minus_i_x() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let u = matexp_hermitian(&x.scale_real(std::f64::consts::FRAC_PI_2), 1.0).unwrap();
        let expected = x.scale(-I);
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn random_hermitian_matches_taylor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let h = random_hermitian(4, &mut rng);
            let u = matexp_hermitian(&h, 0.5).unwrap();
            let oracle = taylor_expm(&h, 0.5, 20);
            assert!(u.max_abs_diff(&oracle) < 1e-8);
        }
    }

    #[test]
    fn eigh_reconstructs_and_is_sorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(7, &mut rng);
        let eig = eigh(&h);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let d = CMatrix::from_diag(&eig.values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        let rebuilt = eig.vectors.matmul(&d).matmul(&eig.vectors.dagger());
        assert!(rebuilt.max_abs_diff(&h) < 1e-12);
        assert!(eig.vectors.is_unitary(1e-12));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(matexp_hermitian(&m, 1.0), Err(Error::Validation(_))));
    }

    #[test]
    fn su2_vector_form_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (nx, ny, nz) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let h = CMatrix::from_rows(&[
                vec![C64::new(nz, 0.0), C64::new(nx, -ny)],
                vec![C64::new(nx, ny), C64::new(-nz, 0.0)],
            ]);
            let dense = expm_unchecked(&h, 0.3);
            let m = su2_from_vector(nx, ny, nz, 0.3);
            let fast = CMatrix::from_rows(&[vec![m[0], m[1]], vec![m[2], m[3]]]);
            assert!(dense.max_abs_diff(&fast) < 1e-13);
        }
    }

    proptest::proptest! {
        #[test]
        fn propagators_are_unitary(seed in 0u64..1000, t in -5.0f64..5.0, n in 2usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(n, &mut rng);
            let u = matexp_hermitian(&h, t).unwrap();
            proptest::prop_assert!(u.unitarity_residual() <= 1e-9);
        }
    }
}
