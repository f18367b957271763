//! Homogeneous models: families of affine holomorphic vector fields on C^n
//! realizing a Lie algebra, the metrics they induce from a Hermitian form on
//! the algebra, and the torsion-twisted Chern-Ricci form Theta computed two
//! independent ways.
//!
//! Only affine fields s(z) = A z + b are supported. They cover every model
//! built here (linear SL(2,C) action, Heisenberg left translations, plain
//! translations) and keep all derivatives exact, so the coordinate formula
//! for Theta needs no symbolic machinery.

use nalgebra::Cholesky;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{self, FormError, HermitianForm, PositivityStatus};
use crate::lie::{AlgebraSpec, LieAlgebra, LieError};
use crate::linalg::{self, c, C64, CMatrix, CVector};

/// Entrywise tolerance for the bracket-compatibility check at build time.
pub const BRACKET_COMPAT_TOL: f64 = 1e-10;

/// Relative finite-difference step factor: the actual step is
/// `FD_STEP * (1 + |z|)`, balancing truncation against roundoff.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("unknown model spec '{0}'")]
    UnknownModel(String),
    #[error("bad model: {0}")]
    BadSpec(String),
    #[error(
        "fields are not bracket-compatible with the algebra: worst pair \
         ({alpha}, {beta}) deviates by {residual:.3e} (best sign {sign})"
    )]
    BracketMismatch {
        alpha: usize,
        beta: usize,
        residual: f64,
        sign: f64,
    },
    #[error("evaluation matrix drops rank at a sampled point (rank {rank} < {ambient})")]
    RankDeficient { rank: usize, ambient: usize },
    #[error("point fails the model's domain guard")]
    OutsideDomain,
    #[error("induced metric is singular at the given point")]
    SingularMetric,
    #[error("form is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("need at least {needed} admissible points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Form(#[from] FormError),
}

// ---------------------------------------------------------------------------
// Affine fields
// ---------------------------------------------------------------------------

/// Holomorphic vector field s(z) = A z + b on C^n.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineField {
    pub a: CMatrix,
    pub b: CVector,
}

impl AffineField {
    pub fn constant(b: CVector) -> Self {
        let n = b.len();
        AffineField { a: CMatrix::zeros(n, n), b }
    }

    pub fn linear(a: CMatrix) -> Self {
        let n = a.nrows();
        AffineField { a, b: CVector::zeros(n) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, z: &CVector) -> CVector {
        &self.a * z + &self.b
    }

    fn scaled_add(&mut self, coeff: C64, other: &AffineField) {
        self.a += &other.a * coeff;
        self.b += &other.b * coeff;
    }
}

/// Lie bracket of affine fields: [Az + b, Cz + d] = (CA - AC)z + (Cb - Ad).
pub fn field_bracket(s: &AffineField, t: &AffineField) -> AffineField {
    AffineField {
        a: &t.a * &s.a - &s.a * &t.a,
        b: &t.a * &s.b - &s.a * &t.b,
    }
}

fn field_max_entry(f: &AffineField) -> f64 {
    let ma = f.a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mb = f.b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    ma.max(mb)
}

// ---------------------------------------------------------------------------
// Model specs
// ---------------------------------------------------------------------------

/// Serialized affine field: row-major (re, im) entry pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRepr {
    pub a: Vec<Vec<(f64, f64)>>,
    pub b: Vec<(f64, f64)>,
}

impl FieldRepr {
    fn to_field(&self, n: usize) -> Result<AffineField, GeometryError> {
        if self.a.len() != n || self.a.iter().any(|r| r.len() != n) || self.b.len() != n {
            return Err(GeometryError::BadSpec(format!(
                "field shape does not match ambient dimension {n}"
            )));
        }
        let a = CMatrix::from_fn(n, n, |i, j| c(self.a[i][j].0, self.a[i][j].1));
        let b = CVector::from_fn(n, |i, _| c(self.b[i].0, self.b[i].1));
        Ok(AffineField { a, b })
    }

    fn from_field(f: &AffineField) -> Self {
        let n = f.ambient_dim();
        FieldRepr {
            a: (0..n)
                .map(|i| (0..n).map(|j| (f.a[(i, j)].re, f.a[(i, j)].im)).collect())
                .collect(),
            b: (0..n).map(|i| (f.b[i].re, f.b[i].im)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    /// su2c acting on C^2 by the traceless matrices -(i/2) sigma_a.
    HopfSl2,
    /// strict_upper(3) by left-invariant fields on C^3, coordinates (a, c, b).
    HeisenbergLeft,
    /// abelian(n) by the coordinate translations on C^n.
    Translations { n: usize },
    Custom {
        algebra: AlgebraSpec,
        ambient_dim: usize,
        fields: Vec<FieldRepr>,
        /// Optional domain guard |z| > min_norm.
        #[serde(default)]
        min_norm: Option<f64>,
    },
}

impl ModelSpec {
    /// Custom model from explicit fields, one per basis element of `algebra`.
    /// All fields must share the ambient dimension; `min_norm` guards the
    /// domain when the realization degenerates near a locus (e.g. the origin).
    pub fn custom(
        algebra: AlgebraSpec,
        fields: &[AffineField],
        min_norm: Option<f64>,
    ) -> Result<Self, GeometryError> {
        let n = fields
            .first()
            .map(AffineField::ambient_dim)
            .ok_or_else(|| GeometryError::BadSpec("custom model needs at least one field".into()))?;
        if fields.iter().any(|f| f.ambient_dim() != n) {
            return Err(GeometryError::BadSpec("fields have mixed ambient dimensions".into()));
        }
        Ok(ModelSpec::Custom {
            algebra,
            ambient_dim: n,
            fields: fields.iter().map(FieldRepr::from_field).collect(),
            min_norm,
        })
    }

    /// Shorthand names: `hopf_sl2`, `heisenberg_left`, `translations:n`.
    pub fn parse(input: &str) -> Result<Self, GeometryError> {
        let s = input.trim();
        match s {
            "hopf_sl2" => return Ok(ModelSpec::HopfSl2),
            "heisenberg_left" => return Ok(ModelSpec::HeisenbergLeft),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("translations:") {
            let n: usize = rest
                .parse()
                .map_err(|_| GeometryError::UnknownModel(input.into()))?;
            if n == 0 {
                return Err(GeometryError::BadSpec("translations:0 is empty".into()));
            }
            return Ok(ModelSpec::Translations { n });
        }
        Err(GeometryError::UnknownModel(input.into()))
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelSpec::HopfSl2 => write!(f, "hopf_sl2"),
            ModelSpec::HeisenbergLeft => write!(f, "heisenberg_left"),
            ModelSpec::Translations { n } => write!(f, "translations:{n}"),
            ModelSpec::Custom { algebra, .. } => write!(f, "custom({algebra})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Homogeneous models
// ---------------------------------------------------------------------------

/// A Lie algebra realized by affine fields, with the measured bracket sign
/// and the domain on which the realization is submersive.
///
/// `sign_convention` is measured at build time rather than assumed: group
/// actions yield homomorphisms or anti-homomorphisms of vector fields
/// depending on the left/right convention, and Theta does not care (brackets
/// enter quadratically).
#[derive(Clone, Debug)]
pub struct HomogeneousModel {
    spec: ModelSpec,
    alg: LieAlgebra,
    fields: Vec<AffineField>,
    ambient_dim: usize,
    sign_convention: f64,
    min_norm: Option<f64>,
}

impl HomogeneousModel {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn fields(&self) -> &[AffineField] {
        &self.fields
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn sign_convention(&self) -> f64 {
        self.sign_convention
    }

    pub fn in_domain(&self, z: &CVector) -> bool {
        z.len() == self.ambient_dim && self.min_norm.is_none_or(|r| z.norm() > r)
    }

    /// n x dim matrix whose columns are the field values at z.
    pub fn evaluation_matrix(&self, z: &CVector) -> CMatrix {
        let cols: Vec<CVector> = self.fields.iter().map(|f| f.eval(z)).collect();
        CMatrix::from_columns(&cols)
    }
}

fn pauli_fields() -> Vec<AffineField> {
    let half = c(0.0, -0.5); // -(i/2)
    let s1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    let s2 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let s3 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
    [s1, s2, s3]
        .into_iter()
        .map(|s| AffineField::linear(s * half))
        .collect()
}

/// Left-invariant fields of the unitriangular 3x3 group in exponential
/// coordinates (a, c, b): basis order (E12, E23, E13) maps to
/// (d/da, d/dc + a d/db, d/db).
fn heisenberg_fields() -> Vec<AffineField> {
    let e = |i: usize| {
        let mut v = CVector::zeros(3);
        v[i] = c(1.0, 0.0);
        v
    };
    let s1 = AffineField::constant(e(0));
    let mut a2 = CMatrix::zeros(3, 3);
    a2[(2, 0)] = c(1.0, 0.0); // the a-coordinate feeds d/db
    let s2 = AffineField { a: a2, b: e(1) };
    let s3 = AffineField::constant(e(2));
    vec![s1, s2, s3]
}

/// Builds and validates a model: bracket compatibility (with the sign
/// measured, not assumed) and full row rank of the evaluation matrix at
/// seeded sample points.
pub fn build_model(spec: &ModelSpec) -> Result<HomogeneousModel, GeometryError> {
    let (alg, fields, ambient_dim, min_norm) = match spec {
        ModelSpec::HopfSl2 => {
            let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("su2c")?)?;
            // The evaluation degenerates at the origin, which is removed
            // from the Hopf surface anyway.
            (alg, pauli_fields(), 2, Some(1e-6))
        }
        ModelSpec::HeisenbergLeft => {
            let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("strict_upper:3")?)?;
            (alg, heisenberg_fields(), 3, None)
        }
        ModelSpec::Translations { n } => {
            let alg = LieAlgebra::from_spec(&AlgebraSpec::Abelian { n: *n })?;
            let fields = (0..*n)
                .map(|i| {
                    let mut v = CVector::zeros(*n);
                    v[i] = c(1.0, 0.0);
                    AffineField::constant(v)
                })
                .collect();
            (alg, fields, *n, None)
        }
        ModelSpec::Custom { algebra, ambient_dim, fields, min_norm } => {
            let alg = LieAlgebra::from_spec(algebra)?;
            let fields = fields
                .iter()
                .map(|f| f.to_field(*ambient_dim))
                .collect::<Result<Vec<_>, _>>()?;
            (alg, fields, *ambient_dim, *min_norm)
        }
    };

    if fields.len() != alg.dim() {
        return Err(GeometryError::BadSpec(format!(
            "{} fields for a {}-dimensional algebra",
            fields.len(),
            alg.dim()
        )));
    }
    if ambient_dim == 0 || fields.iter().any(|f| f.ambient_dim() != ambient_dim) {
        return Err(GeometryError::BadSpec(
            "field dimensions disagree with the ambient dimension".into(),
        ));
    }

    // Measure the bracket sign on all pairs, then hold every pair to it.
    let dim = alg.dim();
    let mut worst = [(0usize, 0usize, 0.0f64); 2]; // per sign +1 / -1
    for alpha in 0..dim {
        for beta in alpha + 1..dim {
            let fb = field_bracket(&fields[alpha], &fields[beta]);
            let coeffs = alg.bracket_basis(alpha, beta);
            let mut target = AffineField {
                a: CMatrix::zeros(ambient_dim, ambient_dim),
                b: CVector::zeros(ambient_dim),
            };
            for (gamma, f) in fields.iter().enumerate() {
                target.scaled_add(coeffs[gamma], f);
            }
            for (si, sign) in [1.0, -1.0].into_iter().enumerate() {
                let mut diff = fb.clone();
                diff.scaled_add(c(-sign, 0.0), &target);
                let r = field_max_entry(&diff);
                if r > worst[si].2 {
                    worst[si] = (alpha, beta, r);
                }
            }
        }
    }
    let (sign_convention, worst) = if worst[0].2 <= worst[1].2 {
        (1.0, worst[0])
    } else {
        (-1.0, worst[1])
    };
    if worst.2 > BRACKET_COMPAT_TOL {
        return Err(GeometryError::BracketMismatch {
            alpha: worst.0,
            beta: worst.1,
            residual: worst.2,
            sign: sign_convention,
        });
    }

    let model = HomogeneousModel { spec: spec.clone(), alg, fields, ambient_dim, sign_convention, min_norm };

    // Submersion check on a fixed seeded sample of admissible points.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for z in random_points(&mut rng, ambient_dim, 8, 0.3, 3.0) {
        if !model.in_domain(&z) {
            continue;
        }
        let e = model.evaluation_matrix(&z);
        let rank = linalg::rank_at(&e, 1e-10);
        if rank < ambient_dim {
            return Err(GeometryError::RankDeficient { rank, ambient: ambient_dim });
        }
    }
    Ok(model)
}

/// Random points with log-uniform radius in [rmin, rmax] and isotropic
/// direction; the standard point sets for cross-checks.
pub fn random_points<R: Rng>(
    rng: &mut R,
    n: usize,
    count: usize,
    rmin: f64,
    rmax: f64,
) -> Vec<CVector> {
    (0..count)
        .map(|_| {
            let mut v = CVector::from_fn(n, |_, _| {
                c(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let norm = v.norm();
            if norm > 0.0 {
                let u: f64 = rng.random();
                let r = (rmin.ln() + u * (rmax.ln() - rmin.ln())).exp();
                v *= c(r / norm, 0.0);
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Induced metric
// ---------------------------------------------------------------------------

/// Inverse metric g_upper = g^{i jbar} = E h E^H at z (E the evaluation
/// matrix) and its inverse g_lower, the metric tensor itself.
#[derive(Clone, Debug)]
pub struct MetricSample {
    pub z: CVector,
    pub g_upper: CMatrix,
    pub g_lower: CMatrix,
}

fn check_point_and_form(
    model: &HomogeneousModel,
    h: &HermitianForm,
    z: &CVector,
) -> Result<(), GeometryError> {
    if h.dim() != model.alg.dim() {
        return Err(GeometryError::Form(FormError::DimMismatch {
            expected: model.alg.dim(),
            got: h.dim(),
        }));
    }
    let rep = forms::positivity_default(h);
    if rep.status != PositivityStatus::PositiveDefinite {
        return Err(GeometryError::NotPositiveDefinite { min_eigenvalue: rep.min_eigenvalue });
    }
    if !model.in_domain(z) {
        return Err(GeometryError::OutsideDomain);
    }
    Ok(())
}

fn g_upper_at(model: &HomogeneousModel, hm: &CMatrix, z: &CVector) -> CMatrix {
    let e = model.evaluation_matrix(z);
    let mut g = &e * hm * e.adjoint();
    linalg::hermitianize(&mut g);
    g
}

pub fn induced_metric(
    model: &HomogeneousModel,
    h: &HermitianForm,
    z: &CVector,
) -> Result<MetricSample, GeometryError> {
    check_point_and_form(model, h, z)?;
    let g_upper = g_upper_at(model, h.matrix(), z);
    let chol = Cholesky::new(g_upper.clone()).ok_or(GeometryError::SingularMetric)?;
    let mut g_lower = chol.inverse();
    linalg::hermitianize(&mut g_lower);
    Ok(MetricSample { z: z.clone(), g_upper, g_lower })
}

// ---------------------------------------------------------------------------
// Theta, coordinate formula
// ---------------------------------------------------------------------------

/// Shared assembly of Theta^{i jbar} = g^{m nbar} dd g^{i jbar}
///                                     - d_m g^{i nbar} dbar_n g^{m jbar}
/// from the inverse metric and its first/mixed-second derivative stacks
/// (dg[m] is the holomorphic derivative in z_m; ddg[m][n] the mixed one).
fn theta_from_derivatives(
    g_upper: &CMatrix,
    dg: &[CMatrix],
    ddg: &[Vec<CMatrix>],
) -> CMatrix {
    let n = g_upper.nrows();
    let mut t1 = CMatrix::zeros(n, n);
    for m in 0..n {
        for nn in 0..n {
            t1 += &ddg[m][nn] * g_upper[(m, nn)];
        }
    }
    let mut t2 = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = c(0.0, 0.0);
            for m in 0..n {
                for nn in 0..n {
                    // dbar_n g^{m jbar} = conj(d_n g^{j mbar})
                    acc += dg[m][(i, nn)] * dg[nn][(j, m)].conj();
                }
            }
            t2[(i, j)] = acc;
        }
    }
    let mut theta = t1 - t2;
    linalg::hermitianize(&mut theta);
    theta
}

/// Theta via the coordinate formula with analytic derivatives: the fields
/// are affine, so g_upper is a degree-(1,1) polynomial in (z, zbar) and its
/// derivatives are exact contractions of the field matrices.
pub fn theta_coordinate(
    model: &HomogeneousModel,
    h: &HermitianForm,
    z: &CVector,
) -> Result<CMatrix, GeometryError> {
    let metric = induced_metric(model, h, z)?;
    let n = model.ambient_dim;
    let e = model.evaluation_matrix(z);
    let hm = h.matrix();

    // cm[m] has column alpha = (column m of A_alpha); then
    //   d_m g = cm[m] h E^H  and  d_m dbar_n g = cm[m] h cm[n]^H.
    let cm: Vec<CMatrix> = (0..n)
        .map(|m| {
            let cols: Vec<CVector> =
                model.fields.iter().map(|f| f.a.column(m).into_owned()).collect();
            CMatrix::from_columns(&cols)
        })
        .collect();
    let dg: Vec<CMatrix> = (0..n).map(|m| &cm[m] * hm * e.adjoint()).collect();
    let ddg: Vec<Vec<CMatrix>> = (0..n)
        .map(|m| (0..n).map(|nn| &cm[m] * hm * cm[nn].adjoint()).collect())
        .collect();
    Ok(theta_from_derivatives(&metric.g_upper, &dg, &ddg))
}

/// Theta via the coordinate formula with central finite differences of
/// g_upper (Wirtinger derivatives from real/imaginary displacements, step
/// [`FD_STEP`] * (1 + |z|)). Validation fallback for the analytic path.
pub fn theta_coordinate_fd(
    model: &HomogeneousModel,
    h: &HermitianForm,
    z: &CVector,
) -> Result<CMatrix, GeometryError> {
    let metric = induced_metric(model, h, z)?;
    let n = model.ambient_dim;
    let hm = h.matrix();
    let delta = FD_STEP * (1.0 + z.norm());
    let g = |p: &CVector| g_upper_at(model, hm, p);

    let shift = |m: usize, w: C64| {
        let mut p = z.clone();
        p[m] += w;
        p
    };
    // First derivatives: d_m = (d/dx_m - i d/dy_m) / 2.
    let dg: Vec<CMatrix> = (0..n)
        .map(|m| {
            let dx = (g(&shift(m, c(delta, 0.0))) - g(&shift(m, c(-delta, 0.0))))
                / c(2.0 * delta, 0.0);
            let dy = (g(&shift(m, c(0.0, delta))) - g(&shift(m, c(0.0, -delta))))
                / c(2.0 * delta, 0.0);
            (dx - dy * c(0.0, 1.0)) * c(0.5, 0.0)
        })
        .collect();
    // Mixed seconds via the four-point cross stencil; u, v are the two
    // complex displacements (d_m dbar_n = (dx_m - i dy_m)(dx_n + i dy_n)/4).
    let sec = |m: usize, wm: C64, nn: usize, wn: C64| {
        let at = |sm: f64, sn: f64| {
            let mut p = z.clone();
            p[m] += wm * c(sm, 0.0);
            p[nn] += wn * c(sn, 0.0);
            g(&p)
        };
        (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0))
            / c(4.0 * delta * delta, 0.0)
    };
    let (re, im) = (c(delta, 0.0), c(0.0, delta));
    let ddg: Vec<Vec<CMatrix>> = (0..n)
        .map(|m| {
            (0..n)
                .map(|nn| {
                    let xx = sec(m, re, nn, re);
                    let yy = sec(m, im, nn, im);
                    let xy = sec(m, re, nn, im);
                    let yx = sec(m, im, nn, re);
                    (xx + yy + (xy - yx) * c(0.0, 1.0)) * c(0.25, 0.0)
                })
                .collect()
        })
        .collect();
    Ok(theta_from_derivatives(&metric.g_upper, &dg, &ddg))
}

// ---------------------------------------------------------------------------
// Theta, bracket formula
// ---------------------------------------------------------------------------

/// Theta via the frame formula (1/2) sum [s_g, s_d] (x) conj([s_g, s_d])
/// over an h-orthonormal frame: h = L L^H, frame fields
/// s_g = sum_a L[a][g] s_a. Independent of the coordinate formula; also of
/// the bracket sign (brackets enter quadratically).
pub fn theta_brackets(
    model: &HomogeneousModel,
    h: &HermitianForm,
    z: &CVector,
) -> Result<CMatrix, GeometryError> {
    check_point_and_form(model, h, z)?;
    let chol = Cholesky::new(h.matrix().clone()).ok_or(GeometryError::NotPositiveDefinite {
        min_eigenvalue: forms::positivity_default(h).min_eigenvalue,
    })?;
    let l = chol.l();
    let dim = model.alg.dim();
    let n = model.ambient_dim;
    let frame: Vec<AffineField> = (0..dim)
        .map(|g| {
            let mut f = AffineField {
                a: CMatrix::zeros(n, n),
                b: CVector::zeros(n),
            };
            for (a, field) in model.fields.iter().enumerate() {
                f.scaled_add(l[(a, g)], field);
            }
            f
        })
        .collect();
    let mut theta = CMatrix::zeros(n, n);
    // Ordered pairs with the 1/2 collapse onto gamma < delta (antisymmetry).
    for gamma in 0..dim {
        for delta in gamma + 1..dim {
            let w = field_bracket(&frame[gamma], &frame[delta]).eval(z);
            theta += &w * w.adjoint();
        }
    }
    linalg::hermitianize(&mut theta);
    Ok(theta)
}

/// Pushforward of a form on the algebra through the evaluation map at z:
/// (ev_* m)^{i jbar} = E m E^H. With m = h this is g_upper itself.
pub fn ev_pushforward(
    model: &HomogeneousModel,
    m: &HermitianForm,
    z: &CVector,
) -> Result<CMatrix, GeometryError> {
    if m.dim() != model.alg.dim() {
        return Err(GeometryError::Form(FormError::DimMismatch {
            expected: model.alg.dim(),
            got: m.dim(),
        }));
    }
    if !model.in_domain(z) {
        return Err(GeometryError::OutsideDomain);
    }
    Ok(g_upper_at(model, m.matrix(), z))
}

// ---------------------------------------------------------------------------
// Scale-static check
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ScaleStaticReport {
    /// Least-squares proportionality constant in
    /// Theta(z) = lambda * ev_push(h)(z) across the sampled points.
    pub lambda: f64,
    pub max_relative_deviation: f64,
    pub points_used: usize,
}

/// Tests whether Theta is a constant multiple of the pushforward of h
/// across the given points: the pointwise content of being scale-static.
/// Points failing the domain guard are skipped; at least 2 must remain.
pub fn scale_static_check(
    model: &HomogeneousModel,
    h: &HermitianForm,
    points: &[CVector],
) -> Result<ScaleStaticReport, GeometryError> {
    let admissible: Vec<&CVector> =
        points.iter().filter(|z| model.in_domain(z)).collect();
    if admissible.len() < 2 {
        return Err(GeometryError::InsufficientPoints {
            needed: 2,
            got: admissible.len(),
        });
    }
    let mut pairs = Vec::with_capacity(admissible.len());
    let (mut num, mut den) = (0.0, 0.0);
    for z in &admissible {
        let th = theta_brackets(model, h, z)?;
        let p = ev_pushforward(model, h, z)?;
        num += linalg::frobenius_inner(&th, &p).re;
        den += linalg::frobenius_inner(&p, &p).re;
        pairs.push((th, p));
    }
    let lambda = if den > 0.0 { num / den } else { 0.0 };
    let mut max_dev: f64 = 0.0;
    for (th, p) in &pairs {
        let pn = linalg::frobenius_norm(p);
        let dev = linalg::frobenius_norm(&(th - p * c(lambda, 0.0)));
        let rel = if pn > 0.0 {
            dev / pn
        } else if dev > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_dev = max_dev.max(rel);
    }
    Ok(ScaleStaticReport {
        lambda,
        max_relative_deviation: max_dev,
        points_used: admissible.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn model(name: &str) -> HomogeneousModel {
        build_model(&ModelSpec::parse(name).unwrap()).unwrap()
    }

    fn point(coords: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(coords.len(), coords.iter().map(|&(re, im)| c(re, im)))
    }

    fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn model_construction_and_signs() {
        let hopf = model("hopf_sl2");
        assert_eq!(hopf.ambient_dim(), 2);
        assert_eq!(hopf.fields().len(), 3);
        // Linear left action: the field bracket anti-represents the algebra.
        assert_eq!(hopf.sign_convention(), -1.0);
        assert!(!hopf.in_domain(&CVector::zeros(2)));

        let heis = model("heisenberg_left");
        assert_eq!(heis.sign_convention(), 1.0);
        let fb = field_bracket(&heis.fields()[0], &heis.fields()[1]);
        assert_eq!(fb.eval(&point(&[(7.0, 1.0), (2.0, 0.0), (0.0, 3.0)])), heis.fields()[2].b);

        let tr = model("translations:2");
        assert_eq!(tr.sign_convention(), 1.0);

        let spec: ModelSpec = serde_json::from_str(
            &serde_json::to_string(&ModelSpec::Translations { n: 4 }).unwrap(),
        )
        .unwrap();
        assert_eq!(spec, ModelSpec::Translations { n: 4 });
    }

    #[test]
    fn incompatible_or_degenerate_customs_are_rejected() {
        // Two copies of d/dz1 on abelian(2): brackets fine, rank 1 < 2.
        let f = FieldRepr {
            a: vec![vec![(0.0, 0.0); 2]; 2],
            b: vec![(1.0, 0.0), (0.0, 0.0)],
        };
        let spec = ModelSpec::Custom {
            algebra: AlgebraSpec::Abelian { n: 2 },
            ambient_dim: 2,
            fields: vec![f.clone(), f.clone()],
            min_norm: None,
        };
        assert!(matches!(
            build_model(&spec),
            Err(GeometryError::RankDeficient { rank: 1, ambient: 2 })
        ));

        // Noncommuting fields on an abelian algebra: bracket mismatch.
        let mut lin = FieldRepr {
            a: vec![vec![(0.0, 0.0); 2]; 2],
            b: vec![(0.0, 0.0), (1.0, 0.0)],
        };
        lin.a[0][0] = (1.0, 0.0);
        let spec = ModelSpec::Custom {
            algebra: AlgebraSpec::Abelian { n: 2 },
            ambient_dim: 2,
            fields: vec![f, lin],
            min_norm: None,
        };
        assert!(matches!(build_model(&spec), Err(GeometryError::BracketMismatch { .. })));
    }

    #[test]
    fn induced_metric_reference_values() {
        let tr = model("translations:2");
        let ms = induced_metric(&tr, &HermitianForm::identity(2), &point(&[(0.3, 0.1), (2.0, 0.0)]))
            .unwrap();
        assert!(max_entry_diff(&ms.g_upper, &CMatrix::identity(2, 2)) < 1e-14);

        // Pauli identity: g_upper = (2|z|^2 I - z z^H) / 4 = diag(1,2)/4 at (1,0).
        let hopf = model("hopf_sl2");
        let ms = induced_metric(&hopf, &HermitianForm::identity(3), &point(&[(1.0, 0.0), (0.0, 0.0)]))
            .unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.25, 0.0), c(0.5, 0.0)]));
        assert!(max_entry_diff(&ms.g_upper, &expected) < 1e-14);
        assert!(max_entry_diff(&(&ms.g_upper * &ms.g_lower), &CMatrix::identity(2, 2)) < 1e-10);

        // At (a, c, b) = (2, 0, 0) the (b,b)-entry is 1 + |a|^2 = 5.
        let heis = model("heisenberg_left");
        let ms = induced_metric(
            &heis,
            &HermitianForm::identity(3),
            &point(&[(2.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
        )
        .unwrap();
        assert!((ms.g_upper[(2, 2)] - c(5.0, 0.0)).norm() < 1e-14);

        assert!(matches!(
            induced_metric(&hopf, &HermitianForm::identity(3), &CVector::zeros(2)),
            Err(GeometryError::OutsideDomain)
        ));
        let indef = HermitianForm::from_diagonal(&[1.0, -1.0, 1.0]);
        assert!(matches!(
            induced_metric(&hopf, &indef, &point(&[(1.0, 0.0), (0.0, 0.0)])),
            Err(GeometryError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn theta_reference_values() {
        let tr = model("translations:3");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = forms::random_pd(&mut rng, 3, 1.0);
        let z = point(&[(0.4, -0.2), (1.0, 0.5), (0.0, 0.1)]);
        assert!(theta_coordinate(&tr, &h, &z).unwrap().iter().all(|v| v.norm() < 1e-12));
        assert!(theta_brackets(&tr, &h, &z).unwrap().iter().all(|v| v.norm() < 1e-12));

        // Single bracket pair: Theta = h11 h22 in the (b,b) slot, constant.
        let heis = model("heisenberg_left");
        let h = HermitianForm::from_diagonal(&[2.0, 3.0, 5.0]);
        for z in [
            point(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]),
            point(&[(1.5, -2.0), (0.3, 0.4), (-1.0, 0.2)]),
        ] {
            for th in [
                theta_coordinate(&heis, &h, &z).unwrap(),
                theta_brackets(&heis, &h, &z).unwrap(),
            ] {
                let mut expected = CMatrix::zeros(3, 3);
                expected[(2, 2)] = c(6.0, 0.0);
                assert!(max_entry_diff(&th, &expected) < 1e-12, "at z = {z:?}");
            }
        }
    }

    #[test]
    fn coordinate_and_bracket_formulas_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for name in ["hopf_sl2", "heisenberg_left", "translations:2"] {
            let m = model(name);
            let dim = m.algebra().dim();
            for _ in 0..5 {
                let h = forms::random_pd(&mut rng, dim, 1.0);
                for z in random_points(&mut rng, m.ambient_dim(), 4, 0.1, 10.0) {
                    let a = theta_coordinate(&m, &h, &z).unwrap();
                    let b = theta_brackets(&m, &h, &z).unwrap();
                    let scale = linalg::frobenius_norm(&b).max(1.0);
                    assert!(
                        max_entry_diff(&a, &b) < 1e-10 * scale,
                        "{name}: analytic mismatch {:.3e}",
                        max_entry_diff(&a, &b) / scale
                    );
                    let fd = theta_coordinate_fd(&m, &h, &z).unwrap();
                    assert!(
                        max_entry_diff(&fd, &b) < 1e-5 * scale,
                        "{name}: fd mismatch {:.3e}",
                        max_entry_diff(&fd, &b) / scale
                    );
                }
            }
        }
    }

    #[test]
    fn brackets_push_forward_sharp_square() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for name in ["hopf_sl2", "heisenberg_left", "translations:3"] {
            let m = model(name);
            let dim = m.algebra().dim();
            let h = forms::random_pd(&mut rng, dim, 1.0);
            let sq = forms::sharp_square(m.algebra(), &h).unwrap();
            for z in random_points(&mut rng, m.ambient_dim(), 6, 0.2, 5.0) {
                let th = theta_brackets(&m, &h, &z).unwrap();
                let pushed = ev_pushforward(&m, &sq, &z).unwrap();
                let scale = linalg::frobenius_norm(&pushed).max(1.0);
                assert!(max_entry_diff(&th, &pushed) < 1e-10 * scale, "{name}");
                // Hermitian PSD sanity of Theta itself.
                let evs = linalg::hermitian_eigenvalues(&th);
                assert!(evs[0] > -1e-10 * linalg::hermitian_sup_norm(&th).max(1.0));
            }
        }
    }

    #[test]
    fn hopf_identity_is_scale_static() {
        let hopf = model("hopf_sl2");
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let points = random_points(&mut rng, 2, 20, 0.1, 10.0);
        let rep = scale_static_check(&hopf, &HermitianForm::identity(3), &points).unwrap();
        assert!((rep.lambda - 1.0).abs() < 1e-10, "lambda {}", rep.lambda);
        assert!(rep.max_relative_deviation < 1e-10);
        assert_eq!(rep.points_used, 20);

        // diag(1,1,2) maps to diag(2,2,1): nowhere near proportional.
        let rep = scale_static_check(
            &hopf,
            &HermitianForm::from_diagonal(&[1.0, 1.0, 2.0]),
            &points,
        )
        .unwrap();
        assert!(rep.max_relative_deviation > 0.1);

        let tr = model("translations:2");
        let rep = scale_static_check(&tr, &HermitianForm::identity(2), &points).unwrap();
        assert_eq!(rep.lambda, 0.0);
        assert_eq!(rep.max_relative_deviation, 0.0);

        assert!(matches!(
            scale_static_check(&hopf, &HermitianForm::identity(3), &[CVector::zeros(2)]),
            Err(GeometryError::InsufficientPoints { .. })
        ));
    }
}
