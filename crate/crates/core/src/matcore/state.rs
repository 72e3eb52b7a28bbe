//! Pure states, density matrices and spectra.
//!
//! Composite spaces `C^d ⊗ C^n` are flattened so that the amplitude with
//! `n`-index `i` and `d`-index `j` lives at position `i * d + j`; read as an
//! `n × d` matrix `M`, the vector is `M` in row-major order.

use super::eigen::{eigh, eigvalsh};
use super::matrix::{inner, norm2, CMat, C64, ZERO};
use crate::error::{Error, Result};

/// Tolerance on `‖ψ‖ = 1`.
pub const PURE_NORM_TOL: f64 = 1e-12;
/// Entrywise Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEG_EIG_CLAMP, 0)` are clamped to zero.
pub const NEG_EIG_CLAMP: f64 = 1e-9;

/// Unit vector in `C^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps an already normalised vector.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm = norm2(&amplitudes);
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalises `v`; fails on the zero vector.
    pub fn normalized(mut v: Vec<C64>) -> Result<Self> {
        let norm = norm2(&v);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        for z in v.iter_mut() {
            *z /= norm;
        }
        Ok(PureState { amplitudes: v })
    }

    /// Computational basis vector `|k>` in `C^m`.
    pub fn basis(m: usize, k: usize) -> Result<Self> {
        if k >= m {
            return Err(Error::InvalidDimensions(format!("basis index {k} >= {m}")));
        }
        let mut v = vec![ZERO; m];
        v[k] = C64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    /// `|a> ⊗ |b>` under the shared index layout.
    pub fn product(a: &PureState, b: &PureState) -> PureState {
        PureState {
            amplitudes: super::matrix::kron_vec(&a.amplitudes, &b.amplitudes),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|ψ><ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            entries: CMat::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> PureState {
        PureState {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() || entries.rows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and non-empty, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let defect = entries.hermitian_defect();
        if defect > DENSITY_TOL {
            return Err(Error::InvalidState(format!("hermitian defect {defect:e}")));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = *eigvalsh(&entries)?.last().expect("non-empty");
        if min < -NEG_EIG_CLAMP {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min:e} < 0")));
        }
        Ok(DensityMatrix { entries })
    }

    /// For matrices that are states by construction (channel outputs of
    /// normalised inputs).
    pub(crate) fn from_trusted(entries: CMat) -> Self {
        debug_assert!(entries.is_square());
        DensityMatrix { entries }
    }

    /// `I/m`.
    pub fn maximally_mixed(m: usize) -> Self {
        DensityMatrix {
            entries: CMat::scaled_identity(m, 1.0 / m as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    /// Eigenvalues as a [`Spectrum`].
    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::new(eigvalsh(&self.entries)?)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(von_neumann_entropy(&self.spectrum()?))
    }

    /// `r ρ + (1 - r) I/m`.
    pub fn mix_with_identity(&self, r: f64) -> CMat {
        let m = self.dim();
        let mut out = self.entries.scale_real(r);
        let shift = (1.0 - r) / m as f64;
        for i in 0..m {
            out[(i, i)] += shift;
        }
        out
    }
}

/// Probability vector sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts descending, clamps small negative entries to zero and checks
    /// that the entries sum to one.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidState("empty spectrum".into()));
        }
        for w in values.iter_mut() {
            if !w.is_finite() {
                return Err(Error::InvalidState("non-finite eigenvalue".into()));
            }
            if *w < -NEG_EIG_CLAMP {
                return Err(Error::InvalidState(format!("negative eigenvalue {w:e}")));
            }
            if *w < 0.0 {
                *w = 0.0;
            }
            if *w > 1.0 + DENSITY_TOL {
                return Err(Error::InvalidState(format!("eigenvalue {w} exceeds 1")));
            }
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("spectrum sums to {total}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }
}

/// Which tensor factor of `C^d ⊗ C^n` to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    /// Trace out `C^d`; the result is `n × n`.
    FirstD,
    /// Trace out `C^n`; the result is `d × d`.
    SecondN,
}

/// Eigendecomposition of a density matrix: spectrum and unitary eigenvectors.
pub fn hermitian_eigs(rho: &DensityMatrix) -> Result<(Spectrum, CMat)> {
    let e = eigh(rho.matrix())?;
    Ok((Spectrum::new(e.values)?, e.vectors))
}

/// `-Σ w log w` in nats, with `0 log 0 = 0`.
pub fn von_neumann_entropy(w: &Spectrum) -> f64 {
    shannon_entropy(w.values())
}

pub(crate) fn shannon_entropy(w: &[f64]) -> f64 {
    w.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum::<f64>()
        .max(0.0)
}

/// Reduced density matrix of a pure state on `C^d ⊗ C^n`.
///
/// With `z` read as the `n × d` matrix `M`, tracing out `C^n` gives
/// `ρ_{kl} = Σ_i M_{ik} conj(M_{il})`, i.e. `(M^† M)^T`, which shares its
/// spectrum with `M^† M`; tracing out `C^d` gives `M M^†`.
pub fn partial_trace(psi: &PureState, d: usize, n: usize, side: TraceOut) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(partial_trace_raw(
        psi.amplitudes(),
        d,
        n,
        side,
    )?))
}

/// Partial trace of `|z><z|` for an arbitrary (not necessarily normalised)
/// vector.
pub fn partial_trace_raw(z: &[C64], d: usize, n: usize, side: TraceOut) -> Result<CMat> {
    if z.len() != d * n || d == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            expected: d * n,
            got: z.len(),
        });
    }
    Ok(match side {
        TraceOut::SecondN => {
            let mut out = CMat::zeros(d, d);
            for i in 0..n {
                let row = &z[i * d..(i + 1) * d];
                for k in 0..d {
                    let a = row[k];
                    for l in k..d {
                        out[(k, l)] += a * row[l].conj();
                    }
                }
            }
            for k in 0..d {
                for l in (k + 1)..d {
                    out[(l, k)] = out[(k, l)].conj();
                }
                out[(k, k)].im = 0.0;
            }
            out
        }
        TraceOut::FirstD => {
            let mut out = CMat::zeros(n, n);
            for i in 0..n {
                let ri = &z[i * d..(i + 1) * d];
                for j in i..n {
                    let rj = &z[j * d..(j + 1) * d];
                    out[(i, j)] = inner(rj, ri);
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    out[(j, i)] = out[(i, j)].conj();
                }
                out[(i, i)].im = 0.0;
            }
            out
        }
    })
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn op_norm(m: &CMat) -> Result<f64> {
    let w = eigvalsh(m)?;
    Ok(w.iter().fold(0.0f64, |acc, x| acc.max(x.abs())))
}

/// Largest singular value of an arbitrary complex matrix.
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    let gram = if m.rows() <= m.cols() {
        m.matmul(&m.adjoint())?
    } else {
        m.adjoint().matmul(m)?
    };
    Ok(op_norm(&gram)?.max(0.0).sqrt())
}

pub fn fro_norm(m: &CMat) -> f64 {
    m.fro_norm()
}

/// `(1/√m) Σ_k |k> ⊗ |k>` on `C^m ⊗ C^m`.
pub fn maximally_entangled(m: usize) -> Result<PureState> {
    if m == 0 {
        return Err(Error::InvalidDimensions("m must be positive".into()));
    }
    let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; m * m];
    for k in 0..m {
        v[k * m + k] = amp;
    }
    Ok(PureState { amplitudes: v })
}
