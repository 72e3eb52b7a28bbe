//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the usual real Jacobi rotation, so the combined
//! two-by-two transform is `V = diag(1, e^{-iφ}) R(θ)`.

use super::matrix::{CMat, C64, ZERO};
use crate::error::{Error, Result};

/// Sweep cap.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius mass, relative to `max(1, ‖M‖_F)`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Eigenpairs of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, sorted descending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMat,
}

impl HermitianEigen {
    /// `V diag(w) V^†`.
    pub fn reconstruct(&self) -> CMat {
        let v = &self.vectors;
        let m = v.rows();
        CMat::from_fn(m, m, |i, j| {
            (0..m).fold(ZERO, |acc, k| acc + v[(i, k)] * self.values[k] * v[(j, k)].conj())
        })
    }

    /// Apply a real function to the spectrum: `V diag(f(w)) V^†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let v = &self.vectors;
        let m = v.rows();
        let fw: Vec<f64> = self.values.iter().map(|&w| f(w)).collect();
        CMat::from_fn(m, m, |i, j| {
            (0..m).fold(ZERO, |acc, k| acc + v[(i, k)] * fw[k] * v[(j, k)].conj())
        })
    }
}

fn off_diagonal_mass(a: &CMat) -> f64 {
    let m = a.rows();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix. Only the Hermitian part of the
/// input is used; the caller is responsible for passing a Hermitian matrix.
pub fn eigh(matrix: &CMat) -> Result<HermitianEigen> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch {
            expected: matrix.rows(),
            got: matrix.cols(),
        });
    }
    let m = matrix.rows();
    // symmetrise
    let mut a = CMat::from_fn(m, m, |i, j| {
        if i == j {
            C64::new(matrix[(i, i)].re, 0.0)
        } else {
            (matrix[(i, j)] + matrix[(j, i)].conj()) * 0.5
        }
    });
    let mut v = CMat::identity(m);
    let scale = matrix.fro_norm().max(1.0);

    let mut converged = off_diagonal_mass(&a) < OFF_DIAGONAL_TOL * scale;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        for p in 0..m {
            for q in (p + 1)..m {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_mass(&a) < OFF_DIAGONAL_TOL * scale;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_mass(&a),
        });
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(m, m, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, sorted descending.
pub fn eigvalsh(matrix: &CMat) -> Result<Vec<f64>> {
    if matrix.rows() == 1 && matrix.cols() == 1 {
        return Ok(vec![matrix[(0, 0)].re]);
    }
    if matrix.rows() == 2 && matrix.cols() == 2 {
        // closed form
        let a = matrix[(0, 0)].re;
        let c = matrix[(1, 1)].re;
        let b = (matrix[(0, 1)] + matrix[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + c);
        let rad = (0.25 * (a - c) * (a - c) + b.norm_sqr()).sqrt();
        return Ok(vec![mean + rad, mean - rad]);
    }
    Ok(eigh(matrix)?.values)
}

fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag; // e^{iφ}
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // V restricted to (p, q)
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let m = a.rows();
    // A <- A V
    for k in 0..m {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    // A <- V^† A
    for k in 0..m {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // eigenvectors
    for k in 0..m {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}
