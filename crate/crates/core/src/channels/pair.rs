//! Isometric embeddings and the conjugate channel pair they define.
//!
//! For `W: C^s → C^d ⊗ C^n` the Kraus operators of the channel that traces
//! out `C^d` are the `n × s` blocks `A_j[i, a] = W[i*d + j, a]`, and the channel
//! that traces out `C^n` has Kraus operators `B_i[j, a] = W[i*d + j, a]` of
//! shape `d × s`.

use crate::error::{Error, Result};
use crate::matcore::{
    partial_trace_raw, CMat, DensityMatrix, PureState, TraceOut, C64, ONE, ZERO,
};

/// Tolerance on `W^† W = I`.
pub const ISOMETRY_TOL: f64 = 1e-10;

/// Embedding `W` of `C^s` into `C^d ⊗ C^n`, stored as an `(n·d) × s` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: CMat,
    s: usize,
    n: usize,
    d: usize,
}

impl Isometry {
    pub fn new(matrix: CMat, s: usize, n: usize, d: usize) -> Result<Self> {
        if s == 0 || n == 0 || d == 0 {
            return Err(Error::InvalidDimensions("s, n, d must be positive".into()));
        }
        if s > n * d {
            return Err(Error::InvalidDimensions(format!(
                "s = {s} exceeds n*d = {}",
                n * d
            )));
        }
        if matrix.rows() != n * d || matrix.cols() != s {
            return Err(Error::InvalidDimensions(format!(
                "expected a {}x{s} matrix, got {}x{}",
                n * d,
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.isometry_defect();
        if defect > ISOMETRY_TOL {
            return Err(Error::InvalidState(format!("W^†W - I has entry {defect:e}")));
        }
        Ok(Isometry { matrix, s, n, d })
    }

    /// Isometric by construction; shape is still checked.
    pub(crate) fn from_trusted(matrix: CMat, s: usize, n: usize, d: usize) -> Self {
        debug_assert_eq!((matrix.rows(), matrix.cols()), (n * d, s));
        Isometry { matrix, s, n, d }
    }

    /// Reference embedding `W_0`: the first `s` coordinate vectors.
    pub fn coordinate(s: usize, n: usize, d: usize) -> Result<Self> {
        let m = CMat::from_fn(n * d, s, |i, j| if i == j { ONE } else { ZERO });
        Isometry::new(m, s, n, d)
    }

    /// Single-column embedding of the unit vector `col`.
    pub fn from_column(col: &PureState, n: usize, d: usize) -> Result<Self> {
        let m = CMat::from_vec(col.dim(), 1, col.amplitudes().to_vec())?;
        Isometry::new(m, 1, n, d)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// `(s, n, d)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.s, self.n, self.d)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Entrywise complex conjugate `W̄`.
    pub fn conj(&self) -> Isometry {
        Isometry::from_trusted(self.matrix.conj(), self.s, self.n, self.d)
    }

    /// `W ⊗ W̄` as an embedding of `C^{s²}` into `C^{d²} ⊗ C^{n²}`.
    ///
    /// Input index `a*s + b`, `n²`-index `i*n + i'`, `d²`-index `j*d + j'`.
    pub fn product_with_conj(&self) -> Isometry {
        let (s, n, d) = (self.s, self.n, self.d);
        let w = &self.matrix;
        let dd = d * d;
        let m = CMat::from_fn(n * n * dd, s * s, |row, col| {
            let (ii, jj) = (row / dd, row % dd);
            let (i, ip) = (ii / n, ii % n);
            let (j, jp) = (jj / d, jj % d);
            let (a, b) = (col / s, col % s);
            w[(i * d + j, a)] * w[(ip * d + jp, b)].conj()
        });
        Isometry::from_trusted(m, s * s, n * n, dd)
    }

    /// `W φ`.
    pub fn embed(&self, phi: &[C64]) -> Result<Vec<C64>> {
        self.matrix.matvec(phi)
    }
}

/// Which channel of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `Φ_W`: trace out `C^d`, output `n × n`.
    Direct,
    /// `Φ_W^C`: trace out `C^n`, output `d × d`.
    Conjugate,
}

/// The channels `Φ_W`, `Φ_W^C` (or their complex conjugates `Φ̄_W`, `Φ̄_W^C`).
#[derive(Debug, Clone)]
pub struct ChannelPair {
    embedding: Isometry,
    conjugated: bool,
    effective: Isometry,
}

impl ChannelPair {
    pub fn new(embedding: Isometry, conjugated: bool) -> Self {
        let effective = if conjugated {
            embedding.conj()
        } else {
            embedding.clone()
        };
        ChannelPair {
            embedding,
            conjugated,
            effective,
        }
    }

    pub fn embedding(&self) -> &Isometry {
        &self.embedding
    }

    pub fn conjugated(&self) -> bool {
        self.conjugated
    }

    /// `W`, or `W̄` for a conjugated pair.
    pub fn effective(&self) -> &Isometry {
        &self.effective
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.embedding.dims()
    }

    fn image(&self, phi: &PureState) -> Result<Vec<C64>> {
        if phi.dim() != self.embedding.s {
            return Err(Error::DimensionMismatch {
                expected: self.embedding.s,
                got: phi.dim(),
            });
        }
        self.effective.embed(phi.amplitudes())
    }

    /// `Φ(φφ^†)`, `n × n`.
    pub fn apply_direct(&self, phi: &PureState) -> Result<DensityMatrix> {
        self.apply(phi, Side::Direct)
    }

    /// `Φ^C(φφ^†)`, `d × d`.
    pub fn apply_conjugate(&self, phi: &PureState) -> Result<DensityMatrix> {
        self.apply(phi, Side::Conjugate)
    }

    pub fn apply(&self, phi: &PureState, side: Side) -> Result<DensityMatrix> {
        let z = self.image(phi)?;
        Ok(DensityMatrix::from_trusted(self.output_of_image(&z, side)?))
    }

    /// Output for an already embedded vector `z = Wφ`.
    pub fn output_of_image(&self, z: &[C64], side: Side) -> Result<CMat> {
        let (_, n, d) = self.dims();
        partial_trace_raw(
            z,
            d,
            n,
            match side {
                Side::Direct => TraceOut::FirstD,
                Side::Conjugate => TraceOut::SecondN,
            },
        )
    }

    /// The `d` Kraus operators `A_j` (`n × s`) with `Φ^C(ρ)_{kl} = Tr(A_k ρ A_l^†)`.
    pub fn kraus_operators(&self) -> Vec<CMat> {
        let (s, n, d) = self.dims();
        let w = self.effective.matrix();
        (0..d)
            .map(|j| CMat::from_fn(n, s, |i, a| w[(i * d + j, a)]))
            .collect()
    }

    /// The `n` Kraus operators `B_i` (`d × s`) of `Φ^C`, so that
    /// `Φ^C(ρ) = Σ_i B_i ρ B_i^†`.
    pub fn conjugate_kraus_operators(&self) -> Vec<CMat> {
        let (s, n, d) = self.dims();
        let w = self.effective.matrix();
        (0..n)
            .map(|i| CMat::from_fn(d, s, |j, a| w[(i * d + j, a)]))
            .collect()
    }

    /// `Φ^C(|u><v|)`: entry `(k, l)` is `<v|A_l^† A_k|u>`.
    pub fn cross_term(&self, u: &PureState, v: &PureState) -> Result<CMat> {
        let (_, n, d) = self.dims();
        let zu = self.image(u)?;
        let zv = self.image(v)?;
        let mut out = CMat::zeros(d, d);
        for i in 0..n {
            let ru = &zu[i * d..(i + 1) * d];
            let rv = &zv[i * d..(i + 1) * d];
            for k in 0..d {
                for l in 0..d {
                    out[(k, l)] += ru[k] * rv[l].conj();
                }
            }
        }
        Ok(out)
    }

    /// `(Φ^C ⊗ Φ̄^C)(ψψ^†)` for `ψ ∈ C^s ⊗ C^s`, a `d² × d²` matrix with
    /// row index `k*d + k'`.
    pub fn product_output(&self, psi: &PureState) -> Result<DensityMatrix> {
        self.product_output_side(psi, Side::Conjugate)
    }

    /// `(Φ ⊗ Φ̄)(ψψ^†)` or `(Φ^C ⊗ Φ̄^C)(ψψ^†)` by the Kraus double sum.
    ///
    /// With `Ψ` the `s × s` reshaping of `ψ` and `K_k` the Kraus operators of
    /// the chosen channel, `(K_k ⊗ K̄_{k'})ψ` reshapes to `V_{kk'} = K_k Ψ K_{k'}^†`
    /// and the output entry `((k,k'), (l,l'))` is the conjugate-channel
    /// component `Tr(V_{ll'}^† V_{kk'})`. For `Side::Conjugate` the sum runs
    /// over the `A_k`; for `Side::Direct` over the `B_i`.
    pub fn product_output_side(&self, psi: &PureState, side: Side) -> Result<DensityMatrix> {
        let s = self.embedding.s;
        if psi.dim() != s * s {
            return Err(Error::DimensionMismatch {
                expected: s * s,
                got: psi.dim(),
            });
        }
        let big = CMat::from_vec(s, s, psi.amplitudes().to_vec())?;
        let ops = match side {
            Side::Conjugate => self.kraus_operators(),
            Side::Direct => self.conjugate_kraus_operators(),
        };
        let m = ops.len();
        let left: Vec<CMat> = ops.iter().map(|k| k * &big).collect();
        let adj: Vec<CMat> = ops.iter().map(|k| k.adjoint()).collect();
        let mut v: Vec<CMat> = Vec::with_capacity(m * m);
        for lk in &left {
            for ka in &adj {
                v.push(lk * ka);
            }
        }
        let mm = m * m;
        let mut out = CMat::zeros(mm, mm);
        for r in 0..mm {
            for c in r..mm {
                let val = v[c]
                    .as_slice()
                    .iter()
                    .zip(v[r].as_slice())
                    .fold(ZERO, |acc, (x, y)| acc + x.conj() * y);
                out[(r, c)] = val;
                out[(c, r)] = val.conj();
            }
            out[(r, r)].im = 0.0;
        }
        Ok(DensityMatrix::from_trusted(out))
    }
}
