//! Complex Lie algebras presented by structure constants.
//!
//! An algebra is a table c[alpha][beta][gamma] with
//! [e_alpha, e_beta] = sum_gamma c[alpha][beta][gamma] e_gamma. Only the
//! pairs alpha < beta are stored, so antisymmetry holds exactly; the Jacobi
//! identity is verified at construction to 1e-12 per entry. All indices in
//! the public API and in serialized specs are 0-based.

use crate::linalg::{self, c, CMatrix, CVector, C64};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Absolute per-entry tolerance for the Jacobi identity at construction.
pub const JACOBI_TOL: f64 = 1e-12;
/// Max-entry tolerance for accepting a linear map as a Lie homomorphism.
pub const HOMOMORPHISM_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum LieError {
    #[error("invalid algebra parameter: {0}")]
    InvalidParameter(String),
    #[error("structure constant index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("custom constant ({alpha},{beta},{gamma}) must have alpha < beta (lower/diagonal entries are determined by antisymmetry)")]
    NotUpperPair { alpha: usize, beta: usize, gamma: usize },
    #[error("duplicate structure constant for ({alpha},{beta},{gamma})")]
    DuplicateConstant { alpha: usize, beta: usize, gamma: usize },
    #[error("antisymmetry violated at ({alpha},{beta},{gamma}): c = {lhs}, c with swapped arguments = {rhs}, expected negation")]
    Antisymmetry { alpha: usize, beta: usize, gamma: usize, lhs: C64, rhs: C64 },
    #[error("Jacobi identity violated at triple ({alpha},{beta},{delta}): max residual entry {residual:.3e} exceeds {JACOBI_TOL:.0e}")]
    Jacobi { alpha: usize, beta: usize, delta: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch { expected: (usize, usize), got: (usize, usize) },
    #[error("cannot parse algebra spec {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Serializable description of an algebra; see [`LieAlgebra::from_spec`].
///
/// Shorthand strings are accepted by [`AlgebraSpec::parse`]:
/// `su2c`, `heisenberg3`, `strict_upper:4`, `borel:2`, `abelian:5`,
/// `direct_sum(su2c,strict_upper:3)`, or a JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraSpec {
    /// Complexified su(2): [e_1,e_2] = e_3 cyclically.
    Su2c,
    /// Strictly upper-triangular n x n matrices, basis in band-major order.
    StrictUpper { n: usize },
    /// Upper-triangular n x n matrices (diagonal included), band-major.
    Borel { n: usize },
    /// 3-dimensional Heisenberg algebra; identical constants to strict_upper(3).
    Heisenberg3,
    Abelian { n: usize },
    DirectSum { first: Box<AlgebraSpec>, second: Box<AlgebraSpec> },
    /// Explicit constants as (alpha, beta, gamma, re, im) with alpha < beta.
    Custom {
        dim: usize,
        constants: Vec<(usize, usize, usize, f64, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

impl AlgebraSpec {
    /// Parse a shorthand string (see type docs) or a JSON object.
    pub fn parse(input: &str) -> Result<Self, LieError> {
        let s = input.trim();
        let err = |reason: &str| LieError::Parse { input: input.to_string(), reason: reason.to_string() };
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| err(&e.to_string()));
        }
        if let Some(body) = s.strip_prefix("direct_sum(").and_then(|b| b.strip_suffix(')')) {
            // Split at the top-level comma (summands may themselves nest).
            let mut depth = 0usize;
            let mut split = None;
            for (i, ch) in body.char_indices() {
                match ch {
                    '(' | '{' | '[' => depth += 1,
                    ')' | '}' | ']' => depth = depth.saturating_sub(1),
                    ',' if depth == 0 => {
                        split = Some(i);
                        break;
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(|| err("direct_sum needs two comma-separated summands"))?;
            return Ok(AlgebraSpec::DirectSum {
                first: Box::new(AlgebraSpec::parse(&body[..i])?),
                second: Box::new(AlgebraSpec::parse(&body[i + 1..])?),
            });
        }
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let n = || -> Result<usize, LieError> {
            arg.ok_or_else(|| err("missing size argument, e.g. strict_upper:3"))?
                .parse()
                .map_err(|_| err("size argument is not an integer"))
        };
        match head {
            "su2c" => Ok(AlgebraSpec::Su2c),
            "heisenberg3" => Ok(AlgebraSpec::Heisenberg3),
            "strict_upper" => Ok(AlgebraSpec::StrictUpper { n: n()? }),
            "borel" => Ok(AlgebraSpec::Borel { n: n()? }),
            "abelian" => Ok(AlgebraSpec::Abelian { n: n()? }),
            _ => Err(err("unknown algebra kind")),
        }
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraSpec::Su2c => write!(f, "su2c"),
            AlgebraSpec::StrictUpper { n } => write!(f, "strict_upper:{n}"),
            AlgebraSpec::Borel { n } => write!(f, "borel:{n}"),
            AlgebraSpec::Heisenberg3 => write!(f, "heisenberg3"),
            AlgebraSpec::Abelian { n } => write!(f, "abelian:{n}"),
            AlgebraSpec::DirectSum { first, second } => write!(f, "direct_sum({first},{second})"),
            AlgebraSpec::Custom { dim, .. } => write!(f, "custom:{dim}"),
        }
    }
}

/// A finite-dimensional complex Lie algebra with a chosen basis.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    dim: usize,
    labels: Vec<String>,
    /// Bracket coefficient vectors for alpha < beta, indexed by [`Self::pair_index`].
    pairs: Vec<CVector>,
    /// All nonzero (alpha, beta, gamma, c) over ordered pairs alpha != beta.
    nonzero: Vec<(usize, usize, usize, C64)>,
}

impl LieAlgebra {
    fn pair_index(&self, alpha: usize, beta: usize) -> usize {
        debug_assert!(alpha < beta && beta < self.dim);
        alpha * (2 * self.dim - alpha - 1) / 2 + (beta - alpha - 1)
    }

    /// Build from upper-pair constants ((alpha, beta) with alpha < beta only;
    /// the rest is filled in by antisymmetry) and validate Jacobi.
    pub fn from_brackets(
        dim: usize,
        labels: Vec<String>,
        entries: &[(usize, usize, usize, C64)],
    ) -> Result<Self, LieError> {
        if dim == 0 {
            return Err(LieError::InvalidParameter("dimension must be at least 1".into()));
        }
        if labels.len() != dim {
            return Err(LieError::InvalidParameter(format!(
                "{} labels for dimension {dim}",
                labels.len()
            )));
        }
        let npairs = dim * (dim - 1) / 2;
        let mut pairs = vec![CVector::zeros(dim); npairs];
        let mut seen: HashMap<(usize, usize, usize), ()> = HashMap::new();
        for &(alpha, beta, gamma, v) in entries {
            for &i in &[alpha, beta, gamma] {
                if i >= dim {
                    return Err(LieError::IndexOutOfRange { index: i, dim });
                }
            }
            if alpha >= beta {
                return Err(LieError::NotUpperPair { alpha, beta, gamma });
            }
            if seen.insert((alpha, beta, gamma), ()).is_some() {
                return Err(LieError::DuplicateConstant { alpha, beta, gamma });
            }
            let idx = alpha * (2 * dim - alpha - 1) / 2 + (beta - alpha - 1);
            pairs[idx][gamma] += v;
        }
        let mut alg = LieAlgebra { dim, labels, pairs, nonzero: Vec::new() };
        alg.rebuild_nonzero();
        alg.check_jacobi()?;
        Ok(alg)
    }

    /// Build from a dense rank-3 table c[alpha][beta][gamma], checking
    /// antisymmetry exactly before extracting the upper pairs.
    pub fn from_dense_constants(
        dim: usize,
        labels: Vec<String>,
        table: &[Vec<Vec<C64>>],
    ) -> Result<Self, LieError> {
        if table.len() != dim || table.iter().any(|p| p.len() != dim || p.iter().any(|q| q.len() != dim)) {
            return Err(LieError::InvalidParameter(format!(
                "constant table must be {dim}x{dim}x{dim}"
            )));
        }
        for alpha in 0..dim {
            for beta in alpha..dim {
                for gamma in 0..dim {
                    let lhs = table[alpha][beta][gamma];
                    let rhs = table[beta][alpha][gamma];
                    if lhs + rhs != c(0.0, 0.0) {
                        return Err(LieError::Antisymmetry { alpha, beta, gamma, lhs, rhs });
                    }
                }
            }
        }
        let mut entries = Vec::new();
        for alpha in 0..dim {
            for beta in alpha + 1..dim {
                for gamma in 0..dim {
                    let v = table[alpha][beta][gamma];
                    if v != c(0.0, 0.0) {
                        entries.push((alpha, beta, gamma, v));
                    }
                }
            }
        }
        Self::from_brackets(dim, labels, &entries)
    }

    /// Construct the algebra described by a spec.
    pub fn from_spec(spec: &AlgebraSpec) -> Result<Self, LieError> {
        match spec {
            AlgebraSpec::Su2c => {
                let entries =
                    [(0, 1, 2, c(1.0, 0.0)), (1, 2, 0, c(1.0, 0.0)), (0, 2, 1, c(-1.0, 0.0))];
                Self::from_brackets(3, vec!["e_1".into(), "e_2".into(), "e_3".into()], &entries)
            }
            AlgebraSpec::Heisenberg3 => {
                let mut alg = Self::from_spec(&AlgebraSpec::StrictUpper { n: 3 })?;
                alg.labels = vec!["E_{1,2}".into(), "E_{2,3}".into(), "E_{1,3}".into()];
                Ok(alg)
            }
            AlgebraSpec::StrictUpper { n } => Self::matrix_unit_algebra(*n, false),
            AlgebraSpec::Borel { n } => Self::matrix_unit_algebra(*n, true),
            AlgebraSpec::Abelian { n } => {
                if *n == 0 {
                    return Err(LieError::InvalidParameter("abelian size must be at least 1".into()));
                }
                let labels = (1..=*n).map(|k| format!("e_{k}")).collect();
                Self::from_brackets(*n, labels, &[])
            }
            AlgebraSpec::DirectSum { first, second } => {
                Ok(Self::direct_sum(&Self::from_spec(first)?, &Self::from_spec(second)?))
            }
            AlgebraSpec::Custom { dim, constants, labels } => {
                let labels = match labels {
                    Some(l) => l.clone(),
                    None => (1..=*dim).map(|k| format!("e_{k}")).collect(),
                };
                let entries: Vec<_> = constants
                    .iter()
                    .map(|&(a, b, g, re, im)| (a, b, g, c(re, im)))
                    .collect();
                Self::from_brackets(*dim, labels, &entries)
            }
        }
    }

    /// Matrix units E_{i,j} of the strictly upper (or full upper, when
    /// `with_diagonal`) triangular algebra, in band-major order: diagonal
    /// first (Borel only), then band j - i = 1, 2, ....
    fn matrix_unit_algebra(n: usize, with_diagonal: bool) -> Result<Self, LieError> {
        if n < 2 {
            return Err(LieError::InvalidParameter(format!(
                "triangular algebras need n >= 2, got {n}"
            )));
        }
        let mut units: Vec<(usize, usize)> = Vec::new();
        if with_diagonal {
            units.extend((0..n).map(|i| (i, i)));
        }
        for band in 1..n {
            units.extend((0..n - band).map(|i| (i, i + band)));
        }
        let index: HashMap<(usize, usize), usize> =
            units.iter().copied().zip(0..).collect();
        let labels = units.iter().map(|&(i, j)| format!("E_{{{},{}}}", i + 1, j + 1)).collect();
        let mut entries = Vec::new();
        for (p, &(a, b)) in units.iter().enumerate() {
            for (q, &(cc, d)) in units.iter().enumerate().skip(p + 1) {
                // [E_ab, E_cd] = delta_bc E_ad - delta_da E_cb.
                if b == cc {
                    if let Some(&g) = index.get(&(a, d)) {
                        entries.push((p, q, g, c(1.0, 0.0)));
                    }
                }
                if d == a {
                    if let Some(&g) = index.get(&(cc, b)) {
                        entries.push((p, q, g, c(-1.0, 0.0)));
                    }
                }
            }
        }
        Self::from_brackets(units.len(), labels, &entries)
    }

    /// Block sum: brackets within each summand, zero across. Labels are
    /// prefixed `L:` / `R:`.
    pub fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
        let dim = a.dim + b.dim;
        let mut labels: Vec<String> = a.labels.iter().map(|l| format!("L:{l}")).collect();
        labels.extend(b.labels.iter().map(|l| format!("R:{l}")));
        let mut entries = Vec::new();
        for &(al, be, ga, v) in &a.nonzero {
            if al < be {
                entries.push((al, be, ga, v));
            }
        }
        for &(al, be, ga, v) in &b.nonzero {
            if al < be {
                entries.push((al + a.dim, be + a.dim, ga + a.dim, v));
            }
        }
        Self::from_brackets(dim, labels, &entries)
            .expect("direct sum of valid algebras satisfies Jacobi")
    }

    fn rebuild_nonzero(&mut self) {
        self.nonzero.clear();
        for alpha in 0..self.dim {
            for beta in alpha + 1..self.dim {
                let v = &self.pairs[self.pair_index(alpha, beta)];
                for gamma in 0..self.dim {
                    if v[gamma] != c(0.0, 0.0) {
                        self.nonzero.push((alpha, beta, gamma, v[gamma]));
                        self.nonzero.push((beta, alpha, gamma, -v[gamma]));
                    }
                }
            }
        }
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        // Antisymmetry makes triples with a repeated index vanish identically,
        // so alpha < beta < delta covers everything.
        for alpha in 0..self.dim {
            for beta in alpha + 1..self.dim {
                for delta in beta + 1..self.dim {
                    let mut sum = self.bracket(&self.bracket_basis(alpha, beta), &self.basis_vector(delta));
                    sum += self.bracket(&self.bracket_basis(beta, delta), &self.basis_vector(alpha));
                    sum += self.bracket(&self.bracket_basis(delta, alpha), &self.basis_vector(beta));
                    let residual = sum.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if residual > JACOBI_TOL {
                        return Err(LieError::Jacobi { alpha, beta, delta, residual });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basis_vector(&self, alpha: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[alpha] = c(1.0, 0.0);
        v
    }

    /// Largest norm of a basis-pair bracket; 0 only for abelian algebras.
    pub fn bracket_scale(&self) -> f64 {
        self.pairs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Structure constant c[alpha][beta][gamma] (any order of alpha, beta).
    pub fn structure_constant(&self, alpha: usize, beta: usize, gamma: usize) -> C64 {
        match alpha.cmp(&beta) {
            std::cmp::Ordering::Less => self.pairs[self.pair_index(alpha, beta)][gamma],
            std::cmp::Ordering::Equal => c(0.0, 0.0),
            std::cmp::Ordering::Greater => -self.pairs[self.pair_index(beta, alpha)][gamma],
        }
    }

    /// Coefficient vector of [e_alpha, e_beta].
    pub fn bracket_basis(&self, alpha: usize, beta: usize) -> CVector {
        match alpha.cmp(&beta) {
            std::cmp::Ordering::Less => self.pairs[self.pair_index(alpha, beta)].clone(),
            std::cmp::Ordering::Equal => CVector::zeros(self.dim),
            std::cmp::Ordering::Greater => -&self.pairs[self.pair_index(beta, alpha)],
        }
    }

    /// Bilinear extension of the bracket to coefficient vectors.
    pub fn bracket(&self, x: &CVector, y: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for &(alpha, beta, gamma, v) in &self.nonzero {
            let prod = x[alpha] * y[beta];
            if prod != c(0.0, 0.0) {
                out[gamma] += v * prod;
            }
        }
        out
    }

    /// All nonzero structure constants over ordered pairs alpha != beta.
    pub fn nonzero_constants(&self) -> &[(usize, usize, usize, C64)] {
        &self.nonzero
    }

    /// Matrix of ad_alpha = [e_alpha, .]: (ad_alpha)[gamma][beta] = c[alpha][beta][gamma].
    pub fn ad(&self, alpha: usize) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for beta in 0..self.dim {
            if beta != alpha {
                let v = self.bracket_basis(alpha, beta);
                for gamma in 0..self.dim {
                    m[(gamma, beta)] = v[gamma];
                }
            }
        }
        m
    }
}

/// Killing form B[alpha][beta] = tr(ad_alpha ad_beta); complex symmetric.
pub fn killing_metric(alg: &LieAlgebra) -> CMatrix {
    let ads: Vec<CMatrix> = (0..alg.dim()).map(|a| alg.ad(a)).collect();
    let mut b = CMatrix::zeros(alg.dim(), alg.dim());
    for i in 0..alg.dim() {
        for j in i..alg.dim() {
            let t = (&ads[i] * &ads[j]).trace();
            b[(i, j)] = t;
            b[(j, i)] = t;
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraKind {
    Nilpotent,
    SolvableNotNilpotent,
    NonSolvable,
}

/// Classification by the lower-central and derived series. Each dims list
/// starts at dim(g) and ends at the first stabilized value (0 for a series
/// that terminates).
#[derive(Clone, Debug)]
pub struct AlgebraClass {
    pub kind: AlgebraKind,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
    /// Orthonormal basis of the derived subalgebra [g, g].
    pub derived_subalgebra: Vec<CVector>,
    /// Ill-conditioned rank decisions encountered along the way.
    pub warnings: Vec<String>,
}

/// Dims of successive terms of a descending series defined by `step`, which
/// maps the current term's orthonormal basis to a spanning set of the next.
///
/// Products below an absolute floor tied to the algebra's bracket scale are
/// dropped before spanning: once a term's brackets all vanish, what remains
/// is pure roundoff from earlier orthonormalizations, and a relative rank
/// cutoff alone would promote that noise to rank 1 and stall the series.
fn descending_series(
    alg: &LieAlgebra,
    step: impl Fn(&[CVector]) -> Vec<CVector>,
    warnings: &mut Vec<String>,
) -> (Vec<usize>, Vec<CVector>) {
    let zero_floor = 1e-12 * alg.bracket_scale().max(1.0);
    let mut dims = vec![alg.dim()];
    let mut current: Vec<CVector> = (0..alg.dim()).map(|a| alg.basis_vector(a)).collect();
    let mut first_term: Option<Vec<CVector>> = None;
    loop {
        let products: Vec<CVector> =
            step(&current).into_iter().filter(|v| v.norm() > zero_floor).collect();
        let span = linalg::orthonormal_span(&products, alg.dim());
        if let Some(w) = &span.warning {
            warnings.push(w.clone());
        }
        dims.push(span.rank());
        if first_term.is_none() {
            first_term = Some(span.basis.clone());
        }
        if span.rank() == 0 || span.rank() == current.len() {
            return (dims, first_term.unwrap_or_default());
        }
        current = span.basis;
    }
}

pub fn classify_algebra(alg: &LieAlgebra) -> AlgebraClass {
    let mut warnings = Vec::new();
    let (lower_central_dims, _) = descending_series(
        alg,
        |basis| {
            let mut out = Vec::new();
            for a in 0..alg.dim() {
                let ea = alg.basis_vector(a);
                for v in basis {
                    out.push(alg.bracket(&ea, v));
                }
            }
            out
        },
        &mut warnings,
    );
    let (derived_dims, derived_subalgebra) = descending_series(
        alg,
        |basis| {
            let mut out = Vec::new();
            for (i, u) in basis.iter().enumerate() {
                for v in &basis[i + 1..] {
                    out.push(alg.bracket(u, v));
                }
            }
            out
        },
        &mut warnings,
    );
    let kind = if *lower_central_dims.last().unwrap() == 0 {
        AlgebraKind::Nilpotent
    } else if *derived_dims.last().unwrap() == 0 {
        AlgebraKind::SolvableNotNilpotent
    } else {
        AlgebraKind::NonSolvable
    };
    AlgebraClass { kind, lower_central_dims, derived_dims, derived_subalgebra, warnings }
}

/// A linear map between algebras, stored as a target.dim x source.dim matrix
/// acting on basis coefficients.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    pub matrix: CMatrix,
}

/// Outcome of checking the homomorphism property on all basis pairs.
#[derive(Clone, Debug)]
pub struct HomReport {
    pub max_deviation: f64,
    /// Basis pair attaining the max deviation.
    pub worst_pair: Option<(usize, usize)>,
    pub is_homomorphism: bool,
}

impl Homomorphism {
    pub fn new(matrix: CMatrix) -> Self {
        Homomorphism { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Homomorphism { matrix: CMatrix::identity(dim, dim) }
    }

    /// Projection of a direct sum onto its first summand: [I 0].
    pub fn first_projection(sum_dim: usize, first_dim: usize) -> Self {
        let mut m = CMatrix::zeros(first_dim, sum_dim);
        for i in 0..first_dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        Homomorphism { matrix: m }
    }

    /// Projection of a direct sum onto its second summand: [0 I].
    pub fn second_projection(sum_dim: usize, second_dim: usize) -> Self {
        let mut m = CMatrix::zeros(second_dim, sum_dim);
        let off = sum_dim - second_dim;
        for i in 0..second_dim {
            m[(i, off + i)] = c(1.0, 0.0);
        }
        Homomorphism { matrix: m }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        &self.matrix * x
    }
}

/// Check rho([e_a, e_b]) = [rho e_a, rho e_b] on all basis pairs of the
/// source, at [`HOMOMORPHISM_TOL`] (max-entry).
pub fn validate_homomorphism(
    rho: &Homomorphism,
    source: &LieAlgebra,
    target: &LieAlgebra,
) -> Result<HomReport, LieError> {
    let got = (rho.matrix.nrows(), rho.matrix.ncols());
    let expected = (target.dim(), source.dim());
    if got != expected {
        return Err(LieError::DimensionMismatch { expected, got });
    }
    let mut max_deviation = 0.0f64;
    let mut worst_pair = None;
    for a in 0..source.dim() {
        for b in a + 1..source.dim() {
            let lhs = rho.apply(&source.bracket_basis(a, b));
            let rhs = target.bracket(&rho.apply(&source.basis_vector(a)), &rho.apply(&source.basis_vector(b)));
            let dev = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > max_deviation {
                max_deviation = dev;
                worst_pair = Some((a, b));
            }
        }
    }
    Ok(HomReport { max_deviation, worst_pair, is_homomorphism: max_deviation <= HOMOMORPHISM_TOL })
}
