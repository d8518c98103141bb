//! Dense linear algebra kernels used throughout the crate: complex LU with
//! partial pivoting (solve / inverse / determinant), a deterministic branch of
//! √det, symmetric and Hermitian eigenvalues, and the matrix exponential.
//!
//! Everything here is hand-rolled on `ndarray` so the crate has no BLAS/LAPACK
//! link-time dependency. The matrices involved are small (≲ a few hundred on a
//! side at most, usually ≤ 12), so O(n³) dense algorithms are plenty.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

pub fn eye_c(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, C64::new(1.0, 0.0))
}

pub fn to_complex(a: &Array2<f64>) -> Array2<C64> {
    a.mapv(|x| C64::new(x, 0.0))
}

/// LU factorization with partial pivoting, packed in a single matrix
/// (unit-lower L below the diagonal, U on and above it).
pub struct Lu {
    lu: Array2<C64>,
    pivots: Vec<usize>,
    /// Permutation parity: +1 or −1.
    sign: f64,
}

impl Lu {
    pub fn new(a: &Array2<C64>, context: &'static str) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "LU of non-square {}x{} matrix in {}",
                a.nrows(),
                a.ncols(),
                context
            )));
        }
        let mut lu = a.clone();
        let mut pivots = Vec::with_capacity(n);
        let mut sign = 1.0;
        for k in 0..n {
            // pick the row with the largest pivot magnitude
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let m = lu[(i, k)].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix(context));
            }
            if p != k {
                sign = -sign;
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            pivots.push(p);
            let piv = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    let sub = f * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Lu { lu, pivots, sign })
    }

    pub fn det(&self) -> C64 {
        let mut d = C64::new(self.sign, 0.0);
        for k in 0..self.lu.nrows() {
            d *= self.lu[(k, k)];
        }
        d
    }

    /// A deterministic square root of the determinant: the principal branch
    /// (non-negative real part; non-negative imaginary part on the branch
    /// cut). Any flip relative to another branch is a global sign that
    /// callers absorb into their phase conventions.
    pub fn sqrt_det(&self) -> C64 {
        let s = self.det().sqrt();
        if s.re < 1e-300 && s.im < 0.0 {
            -s
        } else {
            s
        }
    }

    pub fn solve_vec(&self, b: &Array1<C64>) -> Array1<C64> {
        let n = self.lu.nrows();
        let mut x = b.clone();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
        }
        // forward substitution with unit lower triangle
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // back substitution
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_mat(&self, b: &Array2<C64>) -> Array2<C64> {
        let n = self.lu.nrows();
        let m = b.ncols();
        let mut out = Array2::zeros((n, m));
        for j in 0..m {
            let col = self.solve_vec(&b.column(j).to_owned());
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    pub fn inverse(&self) -> Array2<C64> {
        self.solve_mat(&eye_c(self.lu.nrows()))
    }
}

pub fn inverse(a: &Array2<C64>, context: &'static str) -> Result<Array2<C64>> {
    Ok(Lu::new(a, context)?.inverse())
}

pub fn det(a: &Array2<C64>, context: &'static str) -> Result<C64> {
    Ok(Lu::new(a, context)?.det())
}

pub fn solve(a: &Array2<C64>, b: &Array1<C64>, context: &'static str) -> Result<Array1<C64>> {
    Ok(Lu::new(a, context)?.solve_vec(b))
}

/// Eigenvalues of a real symmetric matrix by the cyclic Jacobi method.
/// Input is symmetrized internally, so 1e−15 asymmetry drift is harmless.
pub fn symmetric_eigvals(a: &Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(
            "symmetric_eigvals on non-square matrix".into(),
        ));
    }
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
        }
    }
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(ev)
}

/// Eigenvalues of a complex Hermitian matrix, via the standard real embedding
/// [[Re H, −Im H], [Im H, Re H]] whose spectrum is that of H with each
/// eigenvalue doubled.
pub fn hermitian_eigvals(h: &Array2<C64>) -> Result<Vec<f64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch(
            "hermitian_eigvals on non-square matrix".into(),
        ));
    }
    let mut e = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            // symmetrize against roundoff in the Hermitian input
            let re = 0.5 * (h[(i, j)].re + h[(j, i)].re);
            let im = 0.5 * (h[(i, j)].im - h[(j, i)].im);
            e[(i, j)] = re;
            e[(n + i, n + j)] = re;
            e[(n + i, j)] = im;
            e[(i, n + j)] = -im;
        }
    }
    let all = symmetric_eigvals(&e)?;
    // sorted doubled spectrum: take every other entry
    Ok(all.into_iter().step_by(2).collect())
}

pub fn min_hermitian_eigval(h: &Array2<C64>) -> Result<f64> {
    let ev = hermitian_eigvals(h)?;
    ev.first()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("empty matrix".into()))
}

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|x| x.norm()).sum();
        if s > best {
            best = s;
        }
    }
    best
}

/// Matrix exponential by Padé(13) approximation with scaling and squaring.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("expm on non-square matrix".into()));
    }
    if a.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Numerical("non-finite entry passed to expm".into()));
    }
    const THETA13: f64 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let a = a.mapv(|x| x / 2f64.powi(s as i32));

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = eye_c(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let u_inner = &a6.mapv(|x| x * B[13]) + &a4.mapv(|x| x * B[11]) + &a2.mapv(|x| x * B[9]);
    let u = a.dot(
        &(a6.dot(&u_inner)
            + a6.mapv(|x| x * B[7])
            + a4.mapv(|x| x * B[5])
            + a2.mapv(|x| x * B[3])
            + id.mapv(|x| x * B[1])),
    );
    let v_inner = &a6.mapv(|x| x * B[12]) + &a4.mapv(|x| x * B[10]) + &a2.mapv(|x| x * B[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|x| x * B[6])
        + a4.mapv(|x| x * B[4])
        + a2.mapv(|x| x * B[2])
        + id.mapv(|x| x * B[0]);
    let mut r = Lu::new(&(&v - &u), "expm Padé denominator")?.solve_mat(&(&v + &u));
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}

pub fn expm_real(a: &Array2<f64>) -> Result<Array2<f64>> {
    Ok(expm(&to_complex(a))?.mapv(|x| x.re))
}

pub fn frobenius_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_norm_real(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = array![
            [c(2.0, 1.0), c(0.5, -0.3), c(0.0, 1.0)],
            [c(-1.0, 0.0), c(3.0, 0.2), c(0.7, 0.7)],
            [c(0.1, -2.0), c(0.0, 0.0), c(1.5, -0.5)],
        ];
        let b = array![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let lu = Lu::new(&a, "test").unwrap();
        let x = lu.solve_vec(&b);
        let resid = a.dot(&x) - &b;
        assert!(resid.iter().all(|r| r.norm() < 1e-12));
        let inv = lu.inverse();
        let d = a.dot(&inv) - eye_c(3);
        assert!(frobenius_norm(&d) < 1e-12);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = array![[c(1.0, 2.0), c(3.0, -1.0)], [c(0.5, 0.0), c(-2.0, 1.0)]];
        let expected = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let d = det(&a, "test").unwrap();
        assert!((d - expected).norm() < 1e-14);
    }

    #[test]
    fn sqrt_det_squares_to_det() {
        let a = array![
            [c(1.2, 0.4), c(0.3, -0.9), c(0.0, 0.1)],
            [c(-0.7, 0.2), c(2.0, 0.0), c(1.1, 1.3)],
            [c(0.4, 0.4), c(0.2, -0.2), c(0.9, -1.0)],
        ];
        let lu = Lu::new(&a, "test").unwrap();
        let s = lu.sqrt_det();
        assert!((s * s - lu.det()).norm() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(matches!(
            Lu::new(&a, "singular test"),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn jacobi_eigenvalues_2x2() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let ev = symmetric_eigvals(&array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12);
        assert!((ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigenvalues_via_embedding() {
        // [[1, i],[−i, 1]] has eigenvalues 0 and 2
        let h = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        let ev = hermitian_eigvals(&h).unwrap();
        assert!(ev[0].abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expm_diagonal_and_rotation() {
        let d = array![[c(0.3, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.7, 0.0)]];
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)].re - (0.3f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-1.7f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-15);

        // exp of a generator of rotations
        let t = 0.8;
        let g = array![[0.0, -t], [t, 0.0]];
        let r = expm_real(&g).unwrap();
        assert!((r[(0, 0)] - t.cos()).abs() < 1e-13);
        assert!((r[(1, 0)] - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn expm_large_norm_scaling() {
        // needs several squarings; verify against exp of a diagonalizable matrix
        let a = array![[12.0, 3.0], [3.0, 12.0]];
        // eigen-decomposition by hand: eigenvectors (1,1)/√2 and (1,−1)/√2
        let e = expm_real(&a).unwrap();
        let lp = (15.0f64).exp();
        let lm = (9.0f64).exp();
        assert!((e[(0, 0)] - 0.5 * (lp + lm)).abs() / lp < 1e-12);
        assert!((e[(0, 1)] - 0.5 * (lp - lm)).abs() / lp < 1e-12);
    }
}
