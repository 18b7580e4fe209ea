//! Cooperative zero-forcing precoding (DL) and decoding (UL).
//!
//! Pseudo-inverses go through an SVD so that ill-conditioned draws are
//! detected from the singular values instead of silently inverting a
//! near-singular Gram matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ratio `σ_min / σ_max` below which a channel is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Precoder with one unit-norm column per DL user.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub v: DMatrix<Complex64>,
}

/// Decoder with one unit-norm row per UL user.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoder {
    pub w: DMatrix<Complex64>,
}

impl Precoder {
    pub fn column(&self, k: usize) -> Vec<Complex64> {
        self.v.column(k).iter().copied().collect()
    }
}

impl Decoder {
    pub fn row(&self, k: usize) -> Vec<Complex64> {
        self.w.row(k).iter().copied().collect()
    }
}

/// Moore-Penrose pseudo-inverse via SVD with a rank check.
pub fn pseudo_inverse(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (rows, cols) = m.shape();
    let rank = rows.min(cols);
    let svd = m.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let smin = s.iter().take(rank).cloned().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) || smin / smax < RANK_TOL {
        return Err(Error::RankDeficient(if smax > 0.0 { smin / smax } else { 0.0 }));
    }
    svd.pseudo_inverse(smax * RANK_TOL).map_err(|e| Error::Domain(e.to_string()))
}

/// `G^†(G G^†)^{-1}` evaluated literally. Reference formula for tests.
pub fn right_inverse_normal_equations(g: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let gh = g.adjoint();
    let gram = g * &gh;
    let inv = gram.try_inverse().ok_or_else(|| Error::RankDeficient(0.0))?;
    Ok(gh * inv)
}

/// `(H^† H)^{-1} H^†` evaluated literally. Reference formula for tests.
pub fn left_inverse_normal_equations(h: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let hh = h.adjoint();
    let inv = (&hh * h).try_inverse().ok_or_else(|| Error::RankDeficient(0.0))?;
    Ok(inv * hh)
}

/// ZF precoder for a `K x T` channel: normalized columns of `G^+`, each
/// rotated so that `g_k v_k` is real and positive.
pub fn zf_precoder(g: &DMatrix<Complex64>) -> Result<Precoder> {
    let (k, t) = g.shape();
    if k == 0 || k > t {
        return Err(Error::Shape { expected: "K <= T with K >= 1".into(), got: format!("{k}x{t}") });
    }
    let mut v = pseudo_inverse(g)?;
    for col in 0..k {
        let norm = v.column(col).norm();
        let inner: Complex64 = g.row(col).iter().zip(v.column(col).iter()).map(|(a, b)| a * b).sum();
        let phase = if inner.norm() > 0.0 { inner.conj() / inner.norm() } else { Complex64::new(1.0, 0.0) };
        let scale = phase / norm;
        v.column_mut(col).iter_mut().for_each(|x| *x *= scale);
    }
    Ok(Precoder { v })
}

/// ZF decoder for an `R x K` channel: normalized rows of `H^+`, each rotated
/// so that `w_k^T h_k` is real and positive.
pub fn zf_decoder(h: &DMatrix<Complex64>) -> Result<Decoder> {
    let (r, k) = h.shape();
    if k == 0 || k > r {
        return Err(Error::Shape { expected: "K <= R with K >= 1".into(), got: format!("{r}x{k}") });
    }
    let mut w = pseudo_inverse(h)?;
    for row in 0..k {
        let norm = w.row(row).norm();
        let inner: Complex64 = w.row(row).iter().zip(h.column(row).iter()).map(|(a, b)| a * b).sum();
        let phase = if inner.norm() > 0.0 { inner.conj() / inner.norm() } else { Complex64::new(1.0, 0.0) };
        let scale = phase / norm;
        w.row_mut(row).iter_mut().for_each(|x| *x *= scale);
    }
    Ok(Decoder { w })
}

/// `|a b|²` for a row `a` and a column `b` (no conjugation).
pub fn effective_gain(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape { expected: format!("length {}", a.len()), got: format!("length {}", b.len()) });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum::<Complex64>().norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_rayleigh_matrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_offdiag_ratio(p: &DMatrix<Complex64>) -> f64 {
        let n = p.nrows();
        let mut off = 0.0f64;
        let mut diag = f64::INFINITY;
        for i in 0..n {
            for j in 0..p.ncols() {
                if i == j {
                    diag = diag.min(p[(i, j)].norm());
                } else {
                    off = off.max(p[(i, j)].norm());
                }
            }
        }
        off / diag
    }

    #[test]
    fn orthonormal_rows_give_adjoint() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g =
            DMatrix::from_row_slice(2, 3, &[c(s, 0.0), c(0.0, s), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let p = zf_precoder(&g).unwrap();
        for k in 0..2 {
            let gain = effective_gain(&g.row(k).iter().copied().collect::<Vec<_>>(), &p.column(k)).unwrap();
            assert!((gain - 1.0).abs() < 1e-12);
        }
        // V equals G^† up to the (trivial) phase convention
        assert!((&p.v - g.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn single_user_is_matched_filter() {
        let g = sample_rayleigh_matrix(1, 5, 3).unwrap();
        let p = zf_precoder(&g).unwrap();
        let norm = g.row(0).norm();
        let expected = g.adjoint() / Complex64::new(norm, 0.0);
        assert!((&p.v - expected).norm() < 1e-12);
        let inner: Complex64 = g.row(0).iter().zip(p.v.column(0).iter()).map(|(a, b)| a * b).sum();
        assert!((inner.re - norm).abs() < 1e-12 && inner.im.abs() < 1e-12);
    }

    #[test]
    fn random_precoder_nulls() {
        let g = sample_rayleigh_matrix(2, 4, 17).unwrap();
        let p = zf_precoder(&g).unwrap();
        assert!(max_offdiag_ratio(&(&g * &p.v)) < 1e-10);
    }

    #[test]
    fn decoder_special_cases() {
        let h = sample_rayleigh_matrix(4, 1, 5).unwrap();
        let d = zf_decoder(&h).unwrap();
        let norm = h.column(0).norm();
        let w = d.row(0);
        let gain = effective_gain(&w, &h.column(0).iter().copied().collect::<Vec<_>>()).unwrap();
        assert!((gain.sqrt() - norm).abs() < 1e-12);

        let h = sample_rayleigh_matrix(4, 2, 6).unwrap();
        let d = zf_decoder(&h).unwrap();
        assert!(max_offdiag_ratio(&(&d.w * &h)) < 1e-10);
    }

    #[test]
    fn decoder_orthonormal_columns() {
        let h = DMatrix::from_row_slice(
            3,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        let d = zf_decoder(&h).unwrap();
        assert!((&d.w - h.adjoint()).norm() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let row = [c(1.0, 0.5), c(-0.3, 0.2), c(0.7, 0.0)];
        let g = DMatrix::from_row_slice(2, 3, &[row, row].concat());
        assert!(matches!(zf_precoder(&g), Err(Error::RankDeficient(_))));
        assert!(matches!(zf_precoder(&DMatrix::zeros(3, 2)), Err(Error::Shape { .. })));
    }

    #[test]
    fn svd_route_matches_normal_equations() {
        for seed in 0..20 {
            let g = sample_rayleigh_matrix(3, 8, seed).unwrap();
            let a = pseudo_inverse(&g).unwrap();
            let b = right_inverse_normal_equations(&g).unwrap();
            assert!((&a - &b).norm() / b.norm() < 1e-10);
            let h = sample_rayleigh_matrix(8, 3, seed + 100).unwrap();
            let a = pseudo_inverse(&h).unwrap();
            let b = left_inverse_normal_equations(&h).unwrap();
            assert!((&a - &b).norm() / b.norm() < 1e-10);
        }
    }

    #[test]
    fn effective_gain_basics() {
        let a = [c(1.0, 0.0), c(0.0, 0.0)];
        let b = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(effective_gain(&a, &b).unwrap(), 0.0);
        assert_eq!(effective_gain(&a, &a).unwrap(), 1.0);
        assert!(effective_gain(&a, &b[..1]).is_err());
    }

    proptest! {
        #[test]
        fn effective_gain_matches_entrywise_quadratic_form(
            v in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0), 1..8)
        ) {
            let a: Vec<_> = v.iter().map(|t| c(t.0, t.1)).collect();
            let b: Vec<_> = v.iter().map(|t| c(t.2, t.3)).collect();
            // Σ_i Σ_j a_i b_i conj(a_j b_j)
            let mut q = 0.0;
            for i in 0..a.len() {
                for j in 0..a.len() {
                    q += (a[i] * b[i] * (a[j] * b[j]).conj()).re;
                }
            }
            let g = effective_gain(&a, &b).unwrap();
            prop_assert!((g - q).abs() <= 1e-10 * q.abs().max(1.0));
        }

        #[test]
        fn zf_columns_and_rows_are_unit_norm(seed in 0u64..500, k in 1usize..4, extra in 0usize..5) {
            let g = sample_rayleigh_matrix(k, k + extra, seed).unwrap();
            let p = zf_precoder(&g).unwrap();
            for col in 0..k {
                prop_assert!((p.v.column(col).norm() - 1.0).abs() < 1e-12);
            }
            prop_assert!(max_offdiag_ratio(&(&g * &p.v)) < 1e-8);
            let h = g.transpose();
            let d = zf_decoder(&h).unwrap();
            for row in 0..k {
                prop_assert!((d.w.row(row).norm() - 1.0).abs() < 1e-12);
            }
            prop_assert!(max_offdiag_ratio(&(&d.w * &h)) < 1e-8);
        }
    }
}
