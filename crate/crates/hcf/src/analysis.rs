//! Trajectory post-processing: growth-regime classification, blow-up time
//! estimation, pinching distances toward a target form, and least-squares
//! Einstein ("scale-static") residuals.
//!
//! Everything here is a pure function over immutable trajectories and forms,
//! so concurrent use is safe.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::{Termination, Trajectory};
use crate::forms::{self, FormError, HermitianForm, PositivityStatus};
use crate::lie::{classify_algebra, LieAlgebra};
use crate::linalg::{self, CMatrix, CVector};

/// Samples required past `t = 1` before an asymptotic (non-blow-up) fit is
/// attempted; shorter tails say nothing about the regime.
pub const MIN_TAIL_SAMPLES: usize = 50;

/// The polynomial model wins whenever its mean-squared residual is within
/// this factor of the best competitor. Exponential fits can shadow
/// polynomials over short windows; the margin breaks such ties toward the
/// simpler model.
pub const POLY_PREFERENCE: f64 = 1.05;

/// Minimum number of points a fit window may hold.
const MIN_WINDOW: usize = 8;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("need at least {needed} samples {context}, got {got}")]
    InsufficientData {
        needed: usize,
        got: usize,
        context: &'static str,
    },
    #[error("trajectory did not terminate in blow-up ({0:?})")]
    NotBlowup(Termination),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("target form is zero")]
    ZeroTarget,
    #[error("form is zero")]
    ZeroForm,
    #[error("{which} is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite {
        which: &'static str,
        min_eigenvalue: f64,
    },
    #[error(transparent)]
    Form(#[from] FormError),
}

// ---------------------------------------------------------------------------
// Growth classification
// ---------------------------------------------------------------------------

/// One fitted growth model: `param` is the slope in the model's own
/// coordinates (degree, rate, or blow-up exponent), `mse` the mean-squared
/// residual on the window, `r2` the coefficient of determination.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModelFit {
    pub param: f64,
    pub intercept: f64,
    pub mse: f64,
    pub r2: f64,
}

/// Residual diagnostics for the competing models; a `None` means the model
/// was not applicable on the window (e.g. no blow-up estimate available).
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub polynomial: Option<ModelFit>,
    pub exponential: Option<ModelFit>,
    pub blowup: Option<ModelFit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthRegime {
    /// sup norm ~ t^degree.
    Polynomial { degree: f64 },
    /// sup norm ~ e^(rate * t).
    Exponential { rate: f64 },
    /// sup norm ~ (t_star - t)^(-beta) for some beta > 0.
    FiniteTimeBlowup { t_star: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrowthReport {
    pub regime: GrowthRegime,
    /// R-squared of the winning model on the fit window, clamped to [0, 1].
    pub fit_quality: f64,
    /// Time span (t_lo, t_hi) the fits actually used.
    pub window: (f64, f64),
    pub diagnostics: FitDiagnostics,
}

/// Least-squares line y = intercept + slope * x.
/// Returns None when the x values carry no spread.
fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<ModelFit> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx < 1e-300 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let mse = ss_res / nf;
    // A constant series is fitted exactly by the zero-slope line.
    let r2 = if syy < 1e-300 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Some(ModelFit { param: slope, intercept, mse, r2 })
}

fn log_floor(v: f64) -> f64 {
    v.max(1e-300).ln()
}

/// Start index of the trailing `1/denom` fraction of `len` samples,
/// widened to at least [`MIN_WINDOW`] points.
fn tail_index(len: usize, denom: usize) -> Result<usize, AnalysisError> {
    let keep = (len / denom).max(MIN_WINDOW);
    if len < keep {
        return Err(AnalysisError::InsufficientData {
            needed: MIN_WINDOW,
            got: len,
            context: "in the fit window",
        });
    }
    Ok(len - keep)
}

/// Classifies the asymptotic growth of `sup_norm(h(t))` by competing
/// least-squares fits of its logarithm:
///
/// * polynomial: `alpha * ln t + c` — slope is the degree,
/// * exponential: `K * t + c` — slope is the rate,
/// * blow-up: `-beta * ln(t_star - t) + c`, with `t_star` taken from
///   [`estimate_blowup_time`] (only when the trajectory terminated in
///   blow-up).
///
/// Non-blow-up trajectories are fitted on the trailing half of their samples
/// and need at least [`MIN_TAIL_SAMPLES`] samples past `t = 1`; blow-up
/// trajectories are fitted on the trailing quarter, where the adaptive grid
/// clusters. Early-time transients contaminate asymptotic slopes, hence the
/// trailing windows. The winner is the least mean-squared residual, with a
/// [`POLY_PREFERENCE`] margin toward the polynomial model.
pub fn classify_growth(traj: &Trajectory) -> Result<GrowthReport, AnalysisError> {
    let ts = traj.times();
    let sups = traj.sup_norms();
    match traj.termination {
        Termination::BlowupDetected { .. } => {
            let t_star = estimate_blowup_time(traj)?;
            let lo = tail_index(ts.len(), 4)?;
            build_report(&ts[lo..], &sups[lo..], Some(t_star))
        }
        _ => {
            let past_one = ts.iter().filter(|&&t| t > 1.0).count();
            if past_one < MIN_TAIL_SAMPLES {
                return Err(AnalysisError::InsufficientData {
                    needed: MIN_TAIL_SAMPLES,
                    got: past_one,
                    context: "past t = 1",
                });
            }
            let lo = tail_index(ts.len(), 2)?;
            build_report(&ts[lo..], &sups[lo..], None)
        }
    }
}

fn build_report(
    ts: &[f64],
    sups: &[f64],
    t_star: Option<f64>,
) -> Result<GrowthReport, AnalysisError> {
    let window = (ts[0], *ts.last().expect("nonempty window"));

    let (mut px, mut py) = (Vec::new(), Vec::new());
    let (mut ex, mut ey) = (Vec::new(), Vec::new());
    let (mut bx, mut by) = (Vec::new(), Vec::new());
    for (&t, &s) in ts.iter().zip(sups) {
        let y = log_floor(s);
        if t > 0.0 {
            px.push(t.ln());
            py.push(y);
        }
        ex.push(t);
        ey.push(y);
        if let Some(tstar) = t_star {
            if tstar - t > 0.0 {
                bx.push((tstar - t).ln());
                by.push(y);
            }
        }
    }
    let diagnostics = FitDiagnostics {
        polynomial: linear_fit(&px, &py),
        exponential: linear_fit(&ex, &ey),
        blowup: if bx.len() >= MIN_WINDOW / 2 {
            linear_fit(&bx, &by).map(|f| ModelFit { param: -f.param, ..f })
        } else {
            None
        },
    };

    let mse_of = |f: Option<ModelFit>| {
        f.map(|m| if m.mse.is_finite() { m.mse } else { f64::INFINITY })
            .unwrap_or(f64::INFINITY)
    };
    let (p, e, b) = (
        mse_of(diagnostics.polynomial),
        mse_of(diagnostics.exponential),
        mse_of(diagnostics.blowup),
    );
    let best = p.min(e).min(b);
    if !best.is_finite() {
        return Err(AnalysisError::DegenerateFit(
            "no growth model could be fitted on the window".into(),
        ));
    }
    let (regime, quality) = if p <= POLY_PREFERENCE * best {
        let f = diagnostics.polynomial.expect("finite mse implies fit");
        (GrowthRegime::Polynomial { degree: f.param }, f.r2)
    } else if e <= b {
        let f = diagnostics.exponential.expect("finite mse implies fit");
        (GrowthRegime::Exponential { rate: f.param }, f.r2)
    } else {
        let f = diagnostics.blowup.expect("finite mse implies fit");
        let tstar = t_star.expect("blow-up fit implies estimate");
        (GrowthRegime::FiniteTimeBlowup { t_star: tstar }, f.r2)
    };
    Ok(GrowthReport { regime, fit_quality: quality, window, diagnostics })
}

// ---------------------------------------------------------------------------
// Blow-up time
// ---------------------------------------------------------------------------

/// Extrapolates the blow-up time of a trajectory that terminated in
/// [`Termination::BlowupDetected`]. See [`estimate_blowup_from_series`].
pub fn estimate_blowup_time(traj: &Trajectory) -> Result<f64, AnalysisError> {
    if !matches!(traj.termination, Termination::BlowupDetected { .. }) {
        return Err(AnalysisError::NotBlowup(traj.termination));
    }
    estimate_blowup_from_series(&traj.times(), &traj.sup_norms())
}

/// Fits `1/sup_norm ~ a + b*t` on the trailing quarter of the series and
/// returns the root `-a/b`. Near a Riccati-type blow-up the reciprocal sup
/// norm decays asymptotically linearly (for the diagonal su2c flow it is
/// exactly linear), so the root extrapolates `t_star` past the last sample.
pub fn estimate_blowup_from_series(ts: &[f64], sups: &[f64]) -> Result<f64, AnalysisError> {
    assert_eq!(ts.len(), sups.len(), "time/norm series length mismatch");
    let lo = tail_index(ts.len(), 4)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in lo..ts.len() {
        if sups[i] > 0.0 {
            xs.push(ts[i]);
            ys.push(1.0 / sups[i]);
        }
    }
    if xs.len() < 2 {
        return Err(AnalysisError::InsufficientData {
            needed: 2,
            got: xs.len(),
            context: "with positive sup norm in the fit window",
        });
    }
    let fit = linear_fit(&xs, &ys)
        .ok_or_else(|| AnalysisError::DegenerateFit("time axis has no spread".into()))?;
    if fit.param >= 0.0 {
        return Err(AnalysisError::DegenerateFit(format!(
            "1/sup_norm is not decaying on the tail (slope {:.3e})",
            fit.param
        )));
    }
    Ok(-fit.intercept / fit.param)
}

// ---------------------------------------------------------------------------
// Pinching
// ---------------------------------------------------------------------------

/// Frobenius distance from `h / sup_norm(h)` to the ray `{ s*target : s > 0 }`.
///
/// The target enters only through its ray, so the distance is exactly
/// invariant under positive rescaling of the target; it is normalized to
/// unit Frobenius norm up front and the closed-form least-squares `s` is
/// clamped to be nonnegative. The Ad-orbit of the target is *not* searched:
/// the distance is measured against this one representative, so a nonzero
/// floor may reflect a wrong representative rather than failed pinching.
pub fn pinching_distance(
    h: &HermitianForm,
    target: &HermitianForm,
) -> Result<f64, AnalysisError> {
    let tnorm = target.frobenius_norm();
    if tnorm <= 0.0 {
        return Err(AnalysisError::ZeroTarget);
    }
    let sup = h.sup_norm();
    if sup <= 0.0 {
        // The zero form lies in the closure of every ray.
        return Ok(0.0);
    }
    let hn = h.matrix().scale(1.0 / sup);
    let that = target.matrix().scale(1.0 / tnorm);
    let s_star = linalg::frobenius_inner(&hn, &that).re.max(0.0);
    Ok(linalg::frobenius_norm(&(hn - that.scale(s_star))))
}

/// [`pinching_distance`] against `target` at every trajectory sample.
pub fn pinching_series(
    traj: &Trajectory,
    target: &HermitianForm,
) -> Result<Vec<f64>, AnalysisError> {
    traj.samples
        .iter()
        .map(|s| pinching_distance(&s.form, target))
        .collect()
}

// ---------------------------------------------------------------------------
// Einstein residual
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EinsteinReport {
    /// Least-squares Einstein constant: the lambda minimizing
    /// ‖h# - lambda*h‖_F.
    pub lambda_star: f64,
    /// ‖h# - lambda_star*h‖_F / ‖h‖_F. Zero exactly when h# is
    /// proportional to h. Both lambda_star and the residual scale linearly
    /// under h -> c*h (the flow is quadratic), so "scale-static" shows up
    /// as a vanishing residual at every scale, with lambda_star carrying
    /// the scale.
    pub residual: f64,
}

pub fn einstein_residual(
    alg: &LieAlgebra,
    h: &HermitianForm,
) -> Result<EinsteinReport, AnalysisError> {
    let hh = h.frobenius_inner(h).re;
    if hh <= 0.0 {
        return Err(AnalysisError::ZeroForm);
    }
    let sq = forms::sharp_square(alg, h)?;
    let lambda_star = sq.frobenius_inner(h).re / hh;
    let diff = sq.matrix() - h.matrix().scale(lambda_star);
    let residual = linalg::frobenius_norm(&diff) / hh.sqrt();
    Ok(EinsteinReport { lambda_star, residual })
}

/// Rescales `h` so that its least-squares Einstein constant becomes 1,
/// i.e. `h -> h / lambda_star`; valid because `(c*h)# = c^2 * h#`. A true
/// fixed point of the flow equation is exactly a zero-residual form with
/// `lambda_star = 1`. Fails when `lambda_star <= 0` (nothing to rescale
/// toward). The resulting constant is algebra-dependent; no normalization
/// beyond the least-squares one is implied.
pub fn fixed_point_rescale(
    alg: &LieAlgebra,
    h: &HermitianForm,
) -> Result<(HermitianForm, EinsteinReport), AnalysisError> {
    let report = einstein_residual(alg, h)?;
    if report.lambda_star <= 0.0 {
        return Err(AnalysisError::DegenerateFit(format!(
            "lambda_star = {:.3e} is not positive; no fixed-point rescaling",
            report.lambda_star
        )));
    }
    Ok((h.scale(1.0 / report.lambda_star), report))
}

// ---------------------------------------------------------------------------
// Kernel lemma check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelReport {
    pub kernel_dim: usize,
    pub derived_dim: usize,
    /// dim g - dim [g,g]: what the kernel lemma predicts for kernel_dim.
    pub expected_dim: usize,
    pub spans_agree: bool,
    pub ok: bool,
}

/// Checks ker(h#k) = Ann([g,g]) for positive definite h and k.
///
/// The quadratic form of h#k evaluates to the (h tensor k)-norm of the
/// tensor w[e][d] = sum_a conj(xi_a) c[e][d][a], which for positive definite
/// h, k vanishes iff xi is Hermitian-orthogonal to every bracket coefficient
/// vector. The annihilator is therefore computed as the orthogonal
/// complement of the derived subalgebra's coefficient span, and compared
/// with the numerical kernel of sharp(h, k) by dimension and a mutual rank
/// test at relative tolerance 1e-8.
pub fn kernel_annihilator_check(
    alg: &LieAlgebra,
    h: &HermitianForm,
    k: &HermitianForm,
) -> Result<KernelReport, AnalysisError> {
    for (which, form) in [("h", h), ("k", k)] {
        let rep = forms::positivity_default(form);
        if rep.status != PositivityStatus::PositiveDefinite {
            return Err(AnalysisError::NotPositiveDefinite {
                which,
                min_eigenvalue: rep.min_eigenvalue,
            });
        }
    }
    let d = alg.dim();
    let s = forms::sharp(alg, h, k)?;
    let kernel = forms::positivity(&s, 1e-8 * s.sup_norm().max(1.0)).kernel_basis;

    let class = classify_algebra(alg);
    let derived = &class.derived_subalgebra;
    let annihilator: Vec<CVector> = if derived.is_empty() {
        (0..d).map(|i| alg.basis_vector(i)).collect()
    } else {
        let span = CMatrix::from_columns(derived);
        linalg::null_space(&span.adjoint(), 1e-8)
    };

    let kernel_dim = kernel.len();
    let expected_dim = d - derived.len();
    let spans_agree = if kernel_dim != annihilator.len() {
        false
    } else if kernel_dim == 0 {
        true
    } else {
        let combined: Vec<CVector> =
            kernel.iter().chain(annihilator.iter()).cloned().collect();
        linalg::rank_at(&CMatrix::from_columns(&combined), 1e-8) == kernel_dim
    };
    Ok(KernelReport {
        kernel_dim,
        derived_dim: derived.len(),
        expected_dim,
        spans_agree,
        ok: kernel_dim == expected_dim && spans_agree,
    })
}
