//! Hermitian forms on a Lie algebra and the sharp operation.
//!
//! A form is a Hermitian matrix h = (h^{alpha beta-bar}) of coefficients in
//! the chosen basis of g (upper indices: these evolve like inverse-metric
//! coefficients). The sharp operation combines two forms through the
//! structure constants:
//!
//! ```text
//! (h # k)^{ab} = sum c[e][d][a] conj(c[g][t][b]) h^{eg} k^{dt}
//! ```
//!
//! and `sharp_square(h) = (h # h) / 2` is the right-hand side of the flow
//! ODE. Every arithmetic producer re-symmetrizes (m + m^H)/2 so Hermiticity
//! cannot drift over long computations.

use crate::lie::{Homomorphism, LieAlgebra};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("form dimension {got} does not match expected {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("input matrix is not symmetric: entry ({i},{j}) = {a} vs ({j},{i}) = {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("{what} must be positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { what: &'static str, min_eigenvalue: f64 },
    #[error("invalid form data: {0}")]
    BadData(String),
}

/// A Hermitian coefficient matrix; the invariant m = m^H is maintained by
/// symmetrizing on construction and after every producing operation.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    m: CMatrix,
}

impl HermitianForm {
    /// Wrap an arbitrary square matrix, projecting onto its Hermitian part.
    pub fn from_matrix(mut m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "form matrix must be square");
        linalg::hermitianize(&mut m);
        HermitianForm { m }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianForm { m: CMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianForm { m: CMatrix::zeros(dim, dim) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = CMatrix::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        HermitianForm { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// Real diagonal as a vector (diagonal entries of a Hermitian matrix).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.m[(i, i)].re).collect()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty")
    }

    /// Largest |eigenvalue| — the operator norm in the reference basis.
    pub fn sup_norm(&self) -> f64 {
        linalg::hermitian_sup_norm(&self.m)
    }

    pub fn frobenius_norm(&self) -> f64 {
        linalg::frobenius_norm(&self.m)
    }

    /// tr(self · other^H); real for Hermitian arguments up to roundoff.
    pub fn frobenius_inner(&self, other: &HermitianForm) -> C64 {
        linalg::frobenius_inner(&self.m, &other.m)
    }

    pub fn scale(&self, s: f64) -> HermitianForm {
        HermitianForm { m: &self.m * c(s, 0.0) }
    }

    /// Default eigenvalue tolerance: 1e-10 * max(1, largest |eigenvalue|).
    pub fn default_tol(&self) -> f64 {
        1e-10 * 1.0f64.max(self.sup_norm())
    }
}

impl Add for &HermitianForm {
    type Output = HermitianForm;
    fn add(self, rhs: &HermitianForm) -> HermitianForm {
        HermitianForm::from_matrix(&self.m + &rhs.m)
    }
}

impl Sub for &HermitianForm {
    type Output = HermitianForm;
    fn sub(self, rhs: &HermitianForm) -> HermitianForm {
        HermitianForm::from_matrix(&self.m - &rhs.m)
    }
}

impl Neg for &HermitianForm {
    type Output = HermitianForm;
    fn neg(self) -> HermitianForm {
        HermitianForm { m: -&self.m }
    }
}

impl Mul<f64> for &HermitianForm {
    type Output = HermitianForm;
    fn mul(self, s: f64) -> HermitianForm {
        self.scale(s)
    }
}

/// Serialized shape: upper-triangle entries (alpha <= beta, 0-based) only;
/// the lower triangle is reconstructed by conjugation.
#[derive(Serialize, Deserialize)]
struct FormRepr {
    dim: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

impl Serialize for HermitianForm {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut entries = Vec::new();
        for a in 0..self.dim() {
            for b in a..self.dim() {
                let v = self.m[(a, b)];
                if v != c(0.0, 0.0) {
                    entries.push((a, b, v.re, v.im));
                }
            }
        }
        FormRepr { dim: self.dim(), entries }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HermitianForm {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FormRepr::deserialize(de)?;
        let mut m = CMatrix::zeros(repr.dim, repr.dim);
        let mut seen = std::collections::HashSet::new();
        for (a, b, re, im) in repr.entries {
            if a > b || b >= repr.dim {
                return Err(D::Error::custom(format!(
                    "form entry ({a},{b}) must satisfy alpha <= beta < dim = {}",
                    repr.dim
                )));
            }
            if !seen.insert((a, b)) {
                return Err(D::Error::custom(format!("duplicate form entry ({a},{b})")));
            }
            if a == b && im != 0.0 {
                return Err(D::Error::custom(format!(
                    "diagonal form entry ({a},{a}) must be real, got im = {im}"
                )));
            }
            m[(a, b)] = c(re, im);
            m[(b, a)] = c(re, -im);
        }
        Ok(HermitianForm { m })
    }
}

/// The sharp operation h # k; symmetric and bilinear in (h, k).
pub fn sharp(alg: &LieAlgebra, h: &HermitianForm, k: &HermitianForm) -> Result<HermitianForm, FormError> {
    let d = alg.dim();
    for f in [h, k] {
        if f.dim() != d {
            return Err(FormError::DimMismatch { expected: d, got: f.dim() });
        }
    }
    let nz = alg.nonzero_constants();
    let mut m = CMatrix::zeros(d, d);
    for &(e, dl, a, c1) in nz {
        for &(g, t, b, c2) in nz {
            m[(a, b)] += c1 * c2.conj() * h.entry(e, g) * k.entry(dl, t);
        }
    }
    Ok(HermitianForm::from_matrix(m))
}

/// h^# = (h # h) / 2 — the right-hand side of the flow ODE.
pub fn sharp_square(alg: &LieAlgebra, h: &HermitianForm) -> Result<HermitianForm, FormError> {
    Ok(sharp(alg, h, h)?.scale(0.5))
}

/// Lift a real symmetric coefficient matrix to a Hermitian form.
pub fn complexify(m: &DMatrix<f64>) -> Result<HermitianForm, FormError> {
    if m.nrows() != m.ncols() {
        return Err(FormError::DimMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let scale = 1.0f64.max(m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())));
    for i in 0..m.nrows() {
        for j in i + 1..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(FormError::NotSymmetric { i, j, a: m[(i, j)], b: m[(j, i)] });
            }
        }
    }
    Ok(HermitianForm::from_matrix(m.map(|v| c(v, 0.0))))
}

/// rho h rho^H: the image form under a homomorphism (matrix rho acting on
/// basis coefficients).
pub fn pushforward(rho: &Homomorphism, h: &HermitianForm) -> Result<HermitianForm, FormError> {
    if rho.matrix.ncols() != h.dim() {
        return Err(FormError::DimMismatch { expected: rho.matrix.ncols(), got: h.dim() });
    }
    Ok(HermitianForm::from_matrix(&rho.matrix * &h.m * rho.matrix.adjoint()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityStatus {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

#[derive(Clone, Debug)]
pub struct PositivityReport {
    pub status: PositivityStatus,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Eigenvectors with |eigenvalue| < tol.
    pub kernel_basis: Vec<CVector>,
}

/// Eigenvalue-based positivity classification at an explicit tolerance.
pub fn positivity(h: &HermitianForm, tol: f64) -> PositivityReport {
    assert!(tol > 0.0, "positivity tolerance must be positive");
    let (vals, vecs) = linalg::hermitian_eigen(&h.m);
    let min_eigenvalue = vals[0];
    let max_eigenvalue = *vals.last().expect("nonempty");
    let status = if min_eigenvalue > tol {
        PositivityStatus::PositiveDefinite
    } else if min_eigenvalue > -tol {
        PositivityStatus::PositiveSemidefinite
    } else {
        PositivityStatus::Indefinite
    };
    let kernel_basis = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() < tol)
        .map(|(i, _)| vecs.column(i).into_owned())
        .collect();
    PositivityReport { status, min_eigenvalue, max_eigenvalue, kernel_basis }
}

/// [`positivity`] at the scale-aware default tolerance.
pub fn positivity_default(h: &HermitianForm) -> PositivityReport {
    positivity(h, h.default_tol())
}

/// P(h, k, l) = Re <h # k, l> under the pairing that `inner` induces on
/// g (x) g-bar: <X, Y> = tr(G^T X G^T Y^T) with G the matrix of `inner`
/// (complex-bilinear in both slots; the conjugations sit inside the g-bar
/// factors). This is the extension under which the total symmetry of P
/// survives complexification: all three forms contract into the two
/// structure-constant factors with the same index orientation, so for
/// totally skew constants any permutation of (h, k, l) permutes the slots
/// of both factors simultaneously and the signs cancel. The sesquilinear
/// Frobenius pairing tr(G X G Y^H) loses the k <-> l symmetry on complex
/// Hermitian data.
pub fn trilinear(
    alg: &LieAlgebra,
    inner: &HermitianForm,
    h: &HermitianForm,
    k: &HermitianForm,
    l: &HermitianForm,
) -> Result<f64, FormError> {
    for f in [inner, h, k, l] {
        if f.dim() != alg.dim() {
            return Err(FormError::DimMismatch { expected: alg.dim(), got: f.dim() });
        }
    }
    let rep = positivity_default(inner);
    if rep.status != PositivityStatus::PositiveDefinite {
        return Err(FormError::NotPositiveDefinite {
            what: "trilinear reference metric",
            min_eigenvalue: rep.min_eigenvalue,
        });
    }
    let s = sharp(alg, h, k)?;
    let gt = inner.m.transpose();
    Ok((&gt * &s.m * &gt * l.m.transpose()).trace().re)
}

/// Seeded random positive definite form L L^H + 1e-3 * scale * I with L
/// having standard complex Gaussian entries.
pub fn random_pd<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> HermitianForm {
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut l = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            l[(i, j)] = c(g(), g()) * c(inv_sqrt2, 0.0);
        }
    }
    let m = &l * l.adjoint() + CMatrix::identity(dim, dim) * c(1e-3 * scale, 0.0);
    HermitianForm::from_matrix(m)
}

/// Diagonal variant of [`random_pd`]: entries |z_i|^2 + 1e-3 * scale with
/// z_i standard complex Gaussian.
pub fn random_pd_diagonal<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> HermitianForm {
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let diag: Vec<f64> = (0..dim)
        .map(|_| {
            let z = c(g(), g()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            z.norm_sqr() + 1e-3 * scale
        })
        .collect();
    HermitianForm::from_diagonal(&diag)
}

/// Random Hermitian (not necessarily positive) form with standard Gaussian
/// real and imaginary parts; used by property tests.
pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> HermitianForm {
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let m = CMatrix::from_fn(dim, dim, |_, _| c(g(), g()));
    HermitianForm::from_matrix(m)
}
