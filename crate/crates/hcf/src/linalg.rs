//! Small helpers over nalgebra for complex Hermitian work: sorted Hermitian
//! eigendecompositions, SVD-based spans / null spaces with an explicit rank
//! cutoff, and Frobenius inner products.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative singular-value cutoff for rank decisions: `sigma > REL_RANK_CUTOFF * sigma_max`.
pub const REL_RANK_CUTOFF: f64 = 1e-10;
/// A singular value within this factor of the cutoff (either side) makes the
/// rank decision ill-conditioned and is reported as a warning.
pub const RANK_WARN_RATIO: f64 = 1e2;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// (m + m^H) / 2, in place.
pub fn hermitianize(m: &mut CMatrix) {
    let adj = m.adjoint();
    *m += adj;
    *m *= c(0.5, 0.0);
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = m.clone().symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Largest |eigenvalue| of a Hermitian matrix (its operator norm).
pub fn hermitian_sup_norm(m: &CMatrix) -> f64 {
    let vals = hermitian_eigenvalues(m);
    vals.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// tr(a b^H) = sum_ij a_ij conj(b_ij).
pub fn frobenius_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut s = c(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        s += x * y.conj();
    }
    s
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Result of an SVD-based span computation.
pub struct Span {
    /// Orthonormal basis of the span (left singular vectors above the cutoff).
    pub basis: Vec<CVector>,
    /// Set when some singular value falls within `RANK_WARN_BAND * sigma_max`
    /// of the truncation threshold.
    pub warning: Option<String>,
}

impl Span {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

/// Orthonormal basis for the span of `vectors` in C^dim.
pub fn orthonormal_span(vectors: &[CVector], dim: usize) -> Span {
    if vectors.is_empty() {
        return Span { basis: Vec::new(), warning: None };
    }
    let m = CMatrix::from_columns(vectors);
    debug_assert_eq!(m.nrows(), dim);
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let mut sv: Vec<(f64, usize)> =
        svd.singular_values.iter().copied().zip(0..).map(|(s, i)| (s, i)).collect();
    sv.sort_by(|a, b| b.0.total_cmp(&a.0));
    let sigma_max = sv.first().map(|p| p.0).unwrap_or(0.0);
    let cutoff = REL_RANK_CUTOFF * sigma_max;
    let mut basis = Vec::new();
    let mut warning = None;
    for &(s, i) in &sv {
        if sigma_max > 0.0 && s > cutoff / RANK_WARN_RATIO && s < cutoff * RANK_WARN_RATIO {
            warning = Some(format!(
                "rank decision ill-conditioned: singular value {s:.3e} within a factor {RANK_WARN_RATIO:.0e} of cutoff {cutoff:.3e}"
            ));
        }
        if s > cutoff && s > 0.0 {
            basis.push(u.column(i).into_owned());
        }
    }
    Span { basis, warning }
}

/// Rank of a matrix at a relative singular-value cutoff.
pub fn rank_at(m: &CMatrix, rel_cutoff: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > rel_cutoff * sigma_max && s > 0.0).count()
}

/// Orthonormal basis of { x : m x = 0 } at a relative cutoff (right singular
/// vectors with singular value at or below `rel_cutoff * sigma_max`).
pub fn null_space(m: &CMatrix, rel_cutoff: f64) -> Vec<CVector> {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        // An empty set of constraints annihilates everything.
        return (0..ncols)
            .map(|i| CVector::from_fn(ncols, |r, _| if r == i { c(1.0, 0.0) } else { c(0.0, 0.0) }))
            .collect();
    }
    // The thin SVD of a wide matrix only yields min(nrows, ncols) right
    // singular vectors; pad with zero rows to square so every kernel
    // direction appears (the padding adds exact zero singular values and
    // avoids the half-precision loss of a Gram-matrix fallback).
    let work = if m.nrows() < ncols {
        let mut p = CMatrix::zeros(ncols, ncols);
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_cutoff * sigma_max;
    let mut out = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || sigma_max == 0.0 {
            out.push(v_t.row(i).adjoint());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_eigen_known_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        // Residual check: m v = lambda v.
        for i in 0..2 {
            let v = vecs.column(i);
            let r = &m * v - v * c(vals[i], 0.0);
            assert!(r.norm() < 1e-12);
        }
    }

    #[test]
    fn complex_svd_rank_and_null() {
        // Rank-1 complex 3x3: u v^H.
        let u = CVector::from_vec(vec![c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.5)]);
        let v = CVector::from_vec(vec![c(2.0, -1.0), c(1.0, 0.0), c(0.0, 3.0)]);
        let m = &u * v.adjoint();
        assert_eq!(rank_at(&m, REL_RANK_CUTOFF), 1);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.len(), 2);
        for w in &ns {
            assert!((&m * w).norm() < 1e-10);
        }
    }

    #[test]
    fn complex_cholesky_pd() {
        let a = CMatrix::from_row_slice(2, 2, &[c(4.0, 0.0), c(1.0, 2.0), c(1.0, -2.0), c(6.0, 0.0)]);
        let chol = a.clone().cholesky().expect("PD");
        let l = chol.l();
        assert!(frobenius_norm(&(&l * l.adjoint() - &a)) < 1e-12);
    }

    #[test]
    fn span_of_dependent_vectors() {
        let v1 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let v2 = &v1 * c(2.0, -1.0);
        let v3 = CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let span = orthonormal_span(&[v1, v2, v3], 3);
        assert_eq!(span.rank(), 2);
        for b in &span.basis {
            assert!((b.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // 1x3 row [1, 1, 1]: kernel has dimension 2.
        let m = CMatrix::from_row_slice(1, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.len(), 2);
        for w in &ns {
            assert!((&m * w).norm() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_wide_matrix_with_orthonormal_rows() {
        // 6 orthonormal rows in C^10: the thin SVD alone yields no kernel
        // vectors (all six sigmas are 1), so all four must come from the
        // zero-row padding. A Gram-based fallback sat exactly at the
        // machine-epsilon boundary here and intermittently dropped one.
        let raw = CMatrix::from_fn(10, 10, |i, j| {
            let x = ((i * 10 + j) as f64 * 0.7367).sin();
            let y = ((i * 10 + j) as f64 * 1.4133).cos();
            c(x, y)
        });
        let q = raw.qr().q();
        let m = CMatrix::from_rows(
            &(0..6).map(|i| q.column(i).adjoint()).collect::<Vec<_>>(),
        );
        let ns = null_space(&m, 1e-8);
        assert_eq!(ns.len(), 4);
        for (i, w) in ns.iter().enumerate() {
            assert!((&m * w).norm() < 1e-12);
            assert!((w.norm() - 1.0).abs() < 1e-12);
            for other in &ns[..i] {
                assert!(w.dotc(other).norm() < 1e-12);
            }
        }
    }
}
