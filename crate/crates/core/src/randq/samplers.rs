//! Ginibre, Haar and uniform-sphere samplers.

use super::rng::RngStream;
use crate::channels::Isometry;
use crate::error::{Error, Result};
use crate::matcore::{inner, norm2, CMat, PureState, C64};

/// Degenerate-overlap threshold: `|<ψ|θ>|` must stay below `1 - OVERLAP_DEGENERACY`.
pub const OVERLAP_DEGENERACY: f64 = 1e-12;

/// First `k` columns of the phase-fixed QR factor of an `m × m` standard
/// complex Ginibre matrix.
///
/// Entries are drawn column by column, and Gram–Schmidt produces column `j`
/// from columns `0..=j` only, so the result equals the leading `k` columns of
/// [`haar_unitary`]`(m)` driven by the same stream. The positive diagonal of
/// `R` that Gram–Schmidt yields is exactly the phase correction that makes
/// `Q` Haar distributed.
pub fn haar_columns(m: usize, k: usize, rng: &mut RngStream) -> Result<CMat> {
    if m == 0 || k > m {
        return Err(Error::InvalidDimensions(format!(
            "cannot draw {k} orthonormal columns in C^{m}"
        )));
    }
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: Vec<C64> = (0..m).map(|_| rng.complex_normal()).collect();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = norm2(&v);
        if !(norm > 1e-300) {
            return Err(Error::Degenerate("rank-deficient Ginibre draw".into()));
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        cols.push(v);
    }
    Ok(CMat::from_fn(m, k, |i, j| cols[j][i]))
}

/// Haar-distributed unitary on `C^m`.
pub fn haar_unitary(m: usize, rng: &mut RngStream) -> Result<CMat> {
    haar_columns(m, m, rng)
}

/// Uniform unit vector in `C^m` (normalised complex Gaussian).
pub fn random_pure_state(m: usize, rng: &mut RngStream) -> Result<PureState> {
    if m == 0 {
        return Err(Error::InvalidDimensions("m must be positive".into()));
    }
    let v: Vec<C64> = (0..m).map(|_| rng.complex_normal()).collect();
    PureState::normalized(v)
}

/// Random embedding `W = U W_0` of `C^s` into `C^d ⊗ C^n`, with `U` Haar on
/// `U(nd)` and `W_0` the first-`s`-columns coordinate embedding.
pub fn random_isometry(s: usize, n: usize, d: usize, rng: &mut RngStream) -> Result<Isometry> {
    if s == 0 || n == 0 || d == 0 || s > n * d {
        return Err(Error::InvalidDimensions(format!(
            "need 1 <= s <= n*d, got s={s}, n={n}, d={d}"
        )));
    }
    Isometry::new(haar_columns(n * d, s, rng)?, s, n, d)
}

/// Splits `θ = x ψ + sqrt(1 - |x|^2) φ` with `x = <ψ|θ>` and `φ ⟂ ψ`.
pub fn overlap_decompose(psi: &PureState, theta: &PureState) -> Result<(C64, PureState)> {
    if psi.dim() != theta.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            got: theta.dim(),
        });
    }
    let x = psi.inner(theta);
    if x.norm() >= 1.0 - OVERLAP_DEGENERACY {
        return Err(Error::Degenerate(format!(
            "|<ψ|θ>| = {} is too close to 1",
            x.norm()
        )));
    }
    let residual: Vec<C64> = theta
        .amplitudes()
        .iter()
        .zip(psi.amplitudes())
        .map(|(t, p)| t - x * p)
        .collect();
    // normalise the residual directly; its norm is sqrt(1 - |x|^2) up to rounding
    let phi = PureState::normalized(residual)?;
    Ok((x, phi))
}

/// `σ_s{ |<ψ|θ>| > t } = (1 - t^2)^{s-1}`.
pub fn overlap_tail(s: usize, t: f64) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidDimensions("s must be positive".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(crate::error::out_of_range("t", t, "[0, 1]"));
    }
    Ok((1.0 - t * t).powi(s as i32 - 1))
}

/// Uniform vector in `C^{nd}` read as `z`, ready for [`crate::matcore::partial_trace`].
pub fn random_bipartite_state(d: usize, n: usize, rng: &mut RngStream) -> Result<PureState> {
    random_pure_state(d * n, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::ZERO;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = RngStream::new(5, 0);
        for m in [1, 2, 3, 4, 9] {
            for _ in 0..20 {
                let u = haar_unitary(m, &mut rng).unwrap();
                assert!(u.isometry_defect() < 1e-10);
                assert!(u.adjoint().isometry_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn one_by_one_haar_is_a_phase() {
        let mut rng = RngStream::new(6, 0);
        let u = haar_unitary(1, &mut rng).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn isometry_is_prefix_of_unitary() {
        let u = haar_unitary(6, &mut RngStream::new(9, 4)).unwrap();
        let w = random_isometry(2, 3, 2, &mut RngStream::new(9, 4)).unwrap();
        for i in 0..6 {
            for j in 0..2 {
                assert_eq!(u[(i, j)], w.matrix()[(i, j)]);
            }
        }
    }

    #[test]
    fn full_isometry_is_unitary() {
        let w = random_isometry(6, 3, 2, &mut RngStream::new(1, 1)).unwrap();
        assert!(w.matrix().adjoint().isometry_defect() < 1e-10);
    }

    #[test]
    fn isometry_rejects_oversized_input() {
        assert!(random_isometry(7, 3, 2, &mut RngStream::new(1, 1)).is_err());
    }

    #[test]
    fn pure_states_are_normalised() {
        let mut rng = RngStream::new(2, 2);
        for m in [1, 2, 8, 33] {
            let p = random_pure_state(m, &mut rng).unwrap();
            assert!((norm2(p.amplitudes()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_decompose_orthogonal_and_real_slice() {
        let psi = PureState::basis(3, 0).unwrap();
        let theta = PureState::basis(3, 1).unwrap();
        let (x, phi) = overlap_decompose(&psi, &theta).unwrap();
        assert_eq!(x, ZERO);
        assert_eq!(phi, theta);

        let theta = PureState::new(vec![C64::new(0.6, 0.0), C64::new(0.8, 0.0), ZERO]).unwrap();
        let (x, phi) = overlap_decompose(&psi, &theta).unwrap();
        assert!((x - C64::new(0.6, 0.0)).norm() < 1e-15);
        let err: f64 = (0..3)
            .map(|i| (theta.amplitudes()[i] - x * psi.amplitudes()[i] - 0.8 * phi.amplitudes()[i]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-12);
    }

    #[test]
    fn overlap_decompose_rejects_collinear() {
        let psi = PureState::basis(4, 2).unwrap();
        let theta = PureState::new(vec![ZERO, ZERO, C64::new(0.0, 1.0), ZERO]).unwrap();
        assert!(matches!(overlap_decompose(&psi, &theta), Err(Error::Degenerate(_))));
    }

    #[test]
    fn overlap_tail_examples() {
        assert_eq!(overlap_tail(8, 0.0).unwrap(), 1.0);
        assert_eq!(overlap_tail(2, 1.0).unwrap(), 0.0);
        assert_eq!(overlap_tail(8, 0.5).unwrap(), 0.133_483_886_718_75);
        assert!(overlap_tail(3, 1.5).is_err());
    }
}
