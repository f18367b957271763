//! Adaptive integration of the flow ODE dh/dt = h^# and its closed-form
//! oracles.
//!
//! The integrator is an embedded Dormand-Prince 5(4) scheme with PI step
//! control. State is the flattened complex coefficient matrix; every
//! accepted step is re-projected onto Hermitian matrices. Blow-up is a
//! normal termination: the run ends when the sup norm exceeds
//! `blowup_norm`, or when the controller demands steps below `min_step`
//! while the norm has grown (the Riccati blow-up signature). A step
//! underflow *without* norm growth is reported as an integration failure
//! carrying the partial trajectory.
//!
//! Independent oracles: the 3-scalar su(2) eigenvalue system, and exact
//! band solutions on strict_upper(n) / borel(n) computed by recursive
//! integration with rational coefficient arithmetic. The band recursions
//! are the ones derived from the sharp operation itself:
//!
//! ```text
//! nilpotent: df^(m)/dt = sum_{p=1}^{m-1} f^(p) f^(m-p)
//! borel:     df^(m)/dt = 2 f^(0) f^(m) + sum_{p=1}^{m-1} f^(p) f^(m-p)
//! ```
//!
//! (no 1/2 prefactor; unit tests pin them to brute-force sharp evaluation).

use crate::forms::{self, HermitianForm, PositivityStatus};
use crate::lie::{AlgebraSpec, LieAlgebra};
use crate::linalg::{c, CMatrix};
use nalgebra::DVector;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid integrator config: {0}")]
    BadConfig(String),
    #[error("form dimension {got} does not match algebra dimension {expected}")]
    DimMismatch { expected: usize, got: usize },
    #[error("step size underflow at t = {t_last:.6e} without norm growth (sup_norm {sup_norm:.3e}); integration failed")]
    StepUnderflow { t_last: f64, sup_norm: f64, partial: Box<Trajectory> },
    #[error("su(2) eigenvalue flow needs positive initial eigenvalues; component {index} is {value}")]
    NonPositiveEigenvalue { index: usize, value: f64 },
    #[error("comparison precondition {inequality} failed: min eigenvalue {min_eigenvalue:.3e}")]
    ComparisonPrecondition { inequality: &'static str, min_eigenvalue: f64 },
    #[error("band closed form: {0}")]
    BandArgument(String),
}

/// Controls for the adaptive integrator. `t_end: None` integrates until
/// blow-up or `max_steps`; `sample_interval: None` records every accepted
/// step.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_end: Option<f64>,
    pub max_steps: usize,
    pub blowup_norm: f64,
    pub min_step: f64,
    pub sample_interval: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            t_end: None,
            max_steps: 1_000_000,
            blowup_norm: 1e12,
            min_step: 1e-14,
            sample_interval: None,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        for (name, v) in [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("blowup_norm", self.blowup_norm),
            ("min_step", self.min_step),
        ] {
            if !(v > 0.0) {
                return Err(FlowError::BadConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if let Some(te) = self.t_end {
            if !(te > 0.0) {
                return Err(FlowError::BadConfig(format!("t_end must be > 0, got {te}")));
            }
        }
        if let Some(dt) = self.sample_interval {
            if !(dt > 0.0) {
                return Err(FlowError::BadConfig(format!("sample_interval must be > 0, got {dt}")));
            }
        }
        if self.max_steps == 0 {
            return Err(FlowError::BadConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    ReachedTEnd,
    BlowupDetected { t_last: f64 },
    StepUnderflow { t_last: f64 },
    MaxSteps,
}

/// One recorded state: the form plus the standard monitors and any extra
/// user-registered monitor values (names live on the trajectory).
#[derive(Clone, Debug)]
pub struct FlowSample {
    pub t: f64,
    pub form: HermitianForm,
    pub sup_norm: f64,
    pub min_eigenvalue: f64,
    pub extra: Vec<f64>,
}

/// A named per-sample scalar, e.g. a conserved quantity to watch.
pub struct Monitor {
    pub name: String,
    pub eval: Box<dyn Fn(f64, &HermitianForm) -> f64>,
}

impl Monitor {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64, &HermitianForm) -> f64 + 'static) -> Self {
        Monitor { name: name.into(), eval: Box::new(eval) }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    algebra: LieAlgebra,
    pub samples: Vec<FlowSample>,
    pub termination: Termination,
    pub monitor_names: Vec<String>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn sup_norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sup_norm).collect()
    }

    pub fn min_eigenvalues(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.min_eigenvalue).collect()
    }

    pub fn final_sample(&self) -> &FlowSample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    /// Sample recorded at time `t` (exact grid hit up to 1e-12 relative).
    pub fn sample_at_time(&self, t: f64) -> Option<&FlowSample> {
        self.samples.iter().find(|s| (s.t - t).abs() <= 1e-12 * 1.0f64.max(t.abs()))
    }

    /// Values of the extra monitor `name` across samples.
    pub fn monitor(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.monitor_names.iter().position(|n| n == name)?;
        Some(self.samples.iter().map(|s| s.extra[idx]).collect())
    }
}

// ---- Dormand-Prince 5(4) core over real state vectors -------------------

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (identical to the last A row; the scheme is FSAL,
/// but we re-evaluate after the Hermitian projection instead of reusing k7).
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
/// B5 - B4: weights of the embedded error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

enum DriveEnd {
    ReachedTEnd,
    Blowup { t_last: f64 },
    Underflow { t_last: f64, norm_grew: bool },
    MaxSteps,
}

/// Weighted RMS of the error estimate with per-entry scale
/// abs_tol + rel_tol * max(|y_i|, |y_new_i|).
fn error_norm(err: &DVector<f64>, y: &DVector<f64>, y_new: &DVector<f64>, cfg: &IntegratorConfig) -> f64 {
    let n = err.len();
    let mut acc = 0.0;
    for i in 0..n {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / n as f64).sqrt()
}

/// Hairer-style initial step size guess.
fn initial_step(y: &DVector<f64>, f0: &DVector<f64>, cfg: &IntegratorConfig) -> f64 {
    let n = y.len() as f64;
    let sc = |yi: f64| cfg.abs_tol + cfg.rel_tol * yi.abs();
    let d0 = (y.iter().map(|&v| (v / sc(v)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (y
        .iter()
        .zip(f0.iter())
        .map(|(&yv, &fv)| (fv / sc(yv)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * (d0 / d1) };
    h0.max(cfg.min_step)
}

/// Drive the stepper from t = 0. `emit` receives the initial state, each
/// recorded state per the sampling policy, and the final state.
fn dopri5_drive(
    cfg: &IntegratorConfig,
    y0: DVector<f64>,
    mut rhs: impl FnMut(&DVector<f64>, &mut DVector<f64>),
    mut project: impl FnMut(&mut DVector<f64>),
    mut state_norm: impl FnMut(&DVector<f64>) -> f64,
    mut emit: impl FnMut(f64, &DVector<f64>),
) -> DriveEnd {
    let n = y0.len();
    let mut y = y0;
    project(&mut y);
    let mut t = 0.0f64;
    emit(t, &y);
    let norm0 = state_norm(&y);

    let mut k: Vec<DVector<f64>> = (0..7).map(|_| DVector::zeros(n)).collect();
    let mut f0 = DVector::zeros(n);
    rhs(&y, &mut f0);
    k[0] = f0;
    let mut h = initial_step(&y, &k[0], cfg);
    let mut facold = 1e-4f64;
    // Index of the next sample-grid time (when interval sampling is on).
    let mut grid_idx: u64 = 1;

    let underflow = |t: f64, y: &DVector<f64>, state_norm: &mut dyn FnMut(&DVector<f64>) -> f64| {
        let grew = state_norm(y) > 10.0 * norm0.max(1e-300);
        DriveEnd::Underflow { t_last: t, norm_grew: grew }
    };

    for _step in 0..cfg.max_steps {
        if h < cfg.min_step {
            emit(t, &y); // ensure the final state is recorded
            return underflow(t, &y, &mut state_norm);
        }
        // Clamp to the next stop (sample-grid time or t_end) and land exactly.
        let mut stop: Option<f64> = cfg.t_end;
        if let Some(dt) = cfg.sample_interval {
            let g = grid_idx as f64 * dt;
            stop = Some(match stop {
                Some(s) => s.min(g),
                None => g,
            });
        }
        let mut h_try = h;
        let mut landing = None;
        if let Some(s) = stop {
            if t + h_try >= s {
                h_try = s - t;
                landing = Some(s);
            }
        }

        // Stages.
        let mut y_stage = DVector::zeros(n);
        for stage in 1..7 {
            y_stage.copy_from(&y);
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    y_stage.axpy(h_try * a, kj, 1.0);
                }
            }
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            rhs(&y_stage, &mut tail[0]);
        }
        let mut y_new = y.clone();
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y_new.axpy(h_try * B5[j], kj, 1.0);
            }
        }
        let mut err_vec = DVector::zeros(n);
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err_vec.axpy(h_try * E[j], kj, 1.0);
            }
        }
        let err = error_norm(&err_vec, &y, &y_new, cfg);

        if !err.is_finite() {
            // Overflow inside the stages: retry much smaller.
            h = h_try * 0.1;
            continue;
        }

        if err <= 1.0 {
            // Accept.
            t = landing.unwrap_or(t + h_try);
            y = y_new;
            project(&mut y);

            let norm_now = state_norm(&y);
            let blown = !norm_now.is_finite() || norm_now > cfg.blowup_norm;

            let mut emitted = false;
            match cfg.sample_interval {
                None => {
                    emit(t, &y);
                    emitted = true;
                }
                Some(dt) => {
                    if landing == Some(grid_idx as f64 * dt) {
                        emit(t, &y);
                        emitted = true;
                        grid_idx += 1;
                    }
                }
            }
            if blown {
                if !emitted {
                    emit(t, &y);
                }
                return DriveEnd::Blowup { t_last: t };
            }
            if let Some(te) = cfg.t_end {
                if t >= te {
                    if !emitted {
                        emit(t, &y);
                    }
                    return DriveEnd::ReachedTEnd;
                }
            }

            // PI controller (Hairer DOPRI5 defaults).
            let fac11 = err.powf(EXPO1);
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h = h_try / fac;
            if cfg.t_end.is_none() {
                // Unbounded horizon: keep t from running off to overflow on
                // flows whose norm never grows (zero right-hand side).
                h = h.min(1e8);
            }
            facold = err.max(1e-4);

            rhs(&y, &mut k[0]);
        } else {
            // Reject: shrink based on the error alone.
            let fac11 = err.powf(EXPO1);
            h = h_try / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
    emit(t, &y);
    DriveEnd::MaxSteps
}

// ---- Matrix flow ---------------------------------------------------------

fn flatten(m: &CMatrix, out: &mut DVector<f64>) {
    for (idx, v) in m.iter().enumerate() {
        out[2 * idx] = v.re;
        out[2 * idx + 1] = v.im;
    }
}

fn unflatten(y: &DVector<f64>, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        let idx = 2 * (j * d + i); // column-major, matching CMatrix iteration order
        c(y[idx], y[idx + 1])
    })
}

/// Bounded-memory sample collector: keeps every `stride`-th emitted state
/// and doubles the stride whenever the cap is exceeded (interval thinning).
struct Thinner {
    cap: usize,
    stride: usize,
    seen: usize,
    samples: Vec<FlowSample>,
}

impl Thinner {
    fn new(cfg: &IntegratorConfig) -> Self {
        let cap = match (cfg.sample_interval, cfg.t_end) {
            (Some(dt), Some(te)) => 10_000usize.max((te / dt).ceil() as usize + 2),
            _ => 10_000,
        };
        Thinner { cap, stride: 1, seen: 0, samples: Vec::new() }
    }

    fn push(&mut self, s: FlowSample) {
        // Replace a re-emission of the final state at an already-recorded time.
        if let Some(last) = self.samples.last() {
            if s.t <= last.t {
                if s.t == last.t {
                    *self.samples.last_mut().expect("nonempty") = s;
                    self.seen -= 1;
                } // else: out-of-order emission cannot happen
                self.seen += 1;
                return;
            }
        }
        if self.seen % self.stride == 0 {
            self.samples.push(s);
            if self.samples.len() > self.cap {
                let mut i = 0;
                self.samples.retain(|_| {
                    let keep = i % 2 == 0;
                    i += 1;
                    keep
                });
                self.stride *= 2;
            }
        }
        self.seen += 1;
    }

    /// The final state must always be present, independent of the stride.
    fn force_push_final(&mut self, s: FlowSample) {
        match self.samples.last() {
            Some(last) if last.t >= s.t => {
                *self.samples.last_mut().expect("nonempty") = s;
            }
            _ => self.samples.push(s),
        }
    }
}

/// Integrate dh/dt = sharp_square(alg, h) from h0.
pub fn integrate(
    alg: &LieAlgebra,
    h0: &HermitianForm,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, FlowError> {
    integrate_with_monitors(alg, h0, cfg, &[])
}

/// [`integrate`] recording additional named per-sample monitors.
pub fn integrate_with_monitors(
    alg: &LieAlgebra,
    h0: &HermitianForm,
    cfg: &IntegratorConfig,
    monitors: &[Monitor],
) -> Result<Trajectory, FlowError> {
    cfg.validate()?;
    let d = alg.dim();
    if h0.dim() != d {
        return Err(FlowError::DimMismatch { expected: d, got: h0.dim() });
    }
    let mut warnings = Vec::new();
    let rep = forms::positivity_default(h0);
    if rep.status == PositivityStatus::Indefinite {
        warnings.push(format!(
            "initial form is indefinite (min eigenvalue {:.3e}); integrating anyway",
            rep.min_eigenvalue
        ));
    }

    let mut y0 = DVector::zeros(2 * d * d);
    flatten(h0.matrix(), &mut y0);

    let mut thinner = Thinner::new(cfg);
    let mut final_state: Option<FlowSample> = None;
    let make_sample = |t: f64, y: &DVector<f64>| -> FlowSample {
        let form = HermitianForm::from_matrix(unflatten(y, d));
        let sup_norm = form.sup_norm();
        let min_eigenvalue = form.min_eigenvalue();
        let extra = monitors.iter().map(|m| (m.eval)(t, &form)).collect();
        FlowSample { t, form, sup_norm, min_eigenvalue, extra }
    };

    let end = {
        let mut df = HermitianForm::zeros(d); // reused rhs output buffer
        let rhs = |y: &DVector<f64>, dy: &mut DVector<f64>| {
            let h = HermitianForm::from_matrix(unflatten(y, d));
            df = forms::sharp_square(alg, &h).expect("dimensions fixed");
            flatten(df.matrix(), dy);
        };
        let project = |y: &mut DVector<f64>| {
            let m = HermitianForm::from_matrix(unflatten(y, d));
            flatten(m.matrix(), y);
        };
        let state_norm = |y: &DVector<f64>| HermitianForm::from_matrix(unflatten(y, d)).sup_norm();
        let emit = |t: f64, y: &DVector<f64>| {
            let s = make_sample(t, y);
            final_state = Some(s.clone());
            thinner.push(s);
        };
        dopri5_drive(cfg, y0, rhs, project, state_norm, emit)
    };
    if let Some(s) = final_state {
        thinner.force_push_final(s);
    }

    let samples = thinner.samples;
    let monitor_names = monitors.iter().map(|m| m.name.clone()).collect();
    let build = |termination: Termination| Trajectory {
        algebra: alg.clone(),
        samples: samples.clone(),
        termination,
        monitor_names,
        warnings: warnings.clone(),
    };
    match end {
        DriveEnd::ReachedTEnd => Ok(build(Termination::ReachedTEnd)),
        DriveEnd::Blowup { t_last } => Ok(build(Termination::BlowupDetected { t_last })),
        DriveEnd::MaxSteps => Ok(build(Termination::MaxSteps)),
        DriveEnd::Underflow { t_last, norm_grew } => {
            if norm_grew {
                // Vanishing stable step with norm growth is the blow-up
                // signature below the norm threshold.
                Ok(build(Termination::BlowupDetected { t_last }))
            } else {
                let partial = build(Termination::StepUnderflow { t_last });
                let sup_norm = partial.final_sample().sup_norm;
                Err(FlowError::StepUnderflow { t_last, sup_norm, partial: Box::new(partial) })
            }
        }
    }
}

// ---- su(2) scalar oracle --------------------------------------------------

/// Eigenvalue trajectory of the su(2) system d lambda_1/dt = lambda_2 lambda_3 (cyclic).
#[derive(Clone, Debug)]
pub struct ScalarTrajectory {
    pub samples: Vec<(f64, [f64; 3])>,
    pub termination: Termination,
}

impl ScalarTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    /// Max eigenvalue per sample (all components positive along the flow).
    pub fn sup_norms(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1.iter().fold(0.0f64, |a, &v| a.max(v.abs()))).collect()
    }

    pub fn final_sample(&self) -> (f64, [f64; 3]) {
        *self.samples.last().expect("nonempty")
    }
}

/// Integrate the 3-scalar eigenvalue system directly; the independent
/// oracle for [`integrate`] on su2c with diagonal initial data.
pub fn su2_diagonal_flow(
    lambda0: [f64; 3],
    cfg: &IntegratorConfig,
) -> Result<ScalarTrajectory, FlowError> {
    cfg.validate()?;
    for (index, &value) in lambda0.iter().enumerate() {
        if !(value > 0.0) {
            return Err(FlowError::NonPositiveEigenvalue { index, value });
        }
    }
    let y0 = DVector::from_row_slice(&lambda0);
    let mut samples: Vec<(f64, [f64; 3])> = Vec::new();
    let end = dopri5_drive(
        cfg,
        y0,
        |y, dy| {
            dy[0] = y[1] * y[2];
            dy[1] = y[0] * y[2];
            dy[2] = y[0] * y[1];
        },
        |_| {},
        |y| y.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
        |t, y| {
            let s = (t, [y[0], y[1], y[2]]);
            match samples.last() {
                Some(last) if last.0 == t => *samples.last_mut().expect("nonempty") = s,
                _ => samples.push(s),
            }
        },
    );
    let termination = match end {
        DriveEnd::ReachedTEnd => Termination::ReachedTEnd,
        DriveEnd::Blowup { t_last } => Termination::BlowupDetected { t_last },
        DriveEnd::MaxSteps => Termination::MaxSteps,
        DriveEnd::Underflow { t_last, norm_grew } => {
            if norm_grew {
                Termination::BlowupDetected { t_last }
            } else {
                Termination::StepUnderflow { t_last }
            }
        }
    };
    Ok(ScalarTrajectory { samples, termination })
}

// ---- Band closed forms ----------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandKind {
    NilpotentPolynomial,
    BorelExponential,
}

/// Exact per-band solution on strict_upper(n) or borel(n) for initial data
/// constant along each band (f^(m) multiplies every E_{i,i+m} (x) E-bar).
///
/// Nilpotent: band m is a polynomial in t of degree m-1.
/// Borel: band 0 (diagonal) is constant f0; band m >= 1 is a polynomial with
/// zero constant term in u = exp(2 f0 t), of degree m.
#[derive(Clone, Debug)]
pub struct BandSolution {
    pub kind: BandKind,
    pub n: usize,
    /// Borel diagonal value f^(0); None for the nilpotent case.
    diagonal: Option<f64>,
    /// bands[m-1]: nilpotent — coefficients of t^0..t^{m-1};
    /// borel — coefficients of u^1..u^m.
    bands: Vec<Vec<f64>>,
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut Vec<BigRational>, src: &[BigRational]) {
    if acc.len() < src.len() {
        acc.resize(src.len(), BigRational::zero());
    }
    for (a, s) in acc.iter_mut().zip(src.iter()) {
        *a += s;
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

/// Exact solution of the nilpotent band system
/// df^(m)/dt = sum_{p=1}^{m-1} f^(p) f^(m-p) on strict_upper(n).
pub fn nilpotent_band_closed_form(n: usize, f0: &[f64]) -> Result<BandSolution, FlowError> {
    if n < 2 {
        return Err(FlowError::BandArgument(format!("need n >= 2, got {n}")));
    }
    if f0.len() != n - 1 {
        return Err(FlowError::BandArgument(format!(
            "strict_upper({n}) has {} bands, got {} initial values",
            n - 1,
            f0.len()
        )));
    }
    for (i, &v) in f0.iter().enumerate() {
        if !(v > 0.0) {
            return Err(FlowError::BandArgument(format!("band {} initial value must be > 0, got {v}", i + 1)));
        }
    }
    // Exact recursion on rational polynomial coefficients in t.
    let mut bands: Vec<Vec<BigRational>> = Vec::with_capacity(n - 1);
    for m in 1..n {
        let mut poly = vec![rational(f0[m - 1])];
        if m >= 2 {
            let mut source: Vec<BigRational> = Vec::new();
            for p in 1..m {
                poly_add_into(&mut source, &poly_mul(&bands[p - 1], &bands[m - p - 1]));
            }
            // Integrate: coefficient of t^j becomes coefficient of t^{j+1} / (j+1).
            poly.resize(source.len() + 1, BigRational::zero());
            for (j, sv) in source.iter().enumerate() {
                poly[j + 1] = sv / BigRational::from_usize(j + 1).expect("small");
            }
        }
        bands.push(poly);
    }
    Ok(BandSolution {
        kind: BandKind::NilpotentPolynomial,
        n,
        diagonal: None,
        bands: bands
            .iter()
            .map(|p| p.iter().map(|r| r.to_f64().expect("fits f64")).collect())
            .collect(),
    })
}

/// Exact solution of the Borel band system
/// df^(m)/dt = 2 f^(0) f^(m) + sum_{p=1}^{m-1} f^(p) f^(m-p), f^(0) constant,
/// as polynomials in u = exp(2 f^(0) t) with zero constant term.
///
/// f0 = (f^(0), f^(1), ..., f^(n-1)). A zero diagonal is accepted only for
/// n = 2 (where bands are constant); for n >= 3 the u-polynomial ansatz
/// needs f^(0) > 0.
pub fn borel_band_closed_form(n: usize, f0: &[f64]) -> Result<BandSolution, FlowError> {
    if n < 2 {
        return Err(FlowError::BandArgument(format!("need n >= 2, got {n}")));
    }
    if f0.len() != n {
        return Err(FlowError::BandArgument(format!(
            "borel({n}) takes the diagonal value plus {} band values, got {} entries",
            n - 1,
            f0.len()
        )));
    }
    let diag = f0[0];
    if !(diag >= 0.0) {
        return Err(FlowError::BandArgument(format!("diagonal value must be >= 0, got {diag}")));
    }
    if diag == 0.0 && n >= 3 {
        return Err(FlowError::BandArgument(
            "zero diagonal with n >= 3 leaves band sources uncoupled from the exponential ansatz (bands grow polynomially); only n = 2 admits f^(0) = 0".into(),
        ));
    }
    for (i, &v) in f0[1..].iter().enumerate() {
        if !(v > 0.0) {
            return Err(FlowError::BandArgument(format!("band {} initial value must be > 0, got {v}", i + 1)));
        }
    }
    let two_diag = rational(2.0 * diag);
    let mut bands: Vec<Vec<BigRational>> = Vec::with_capacity(n - 1);
    for m in 1..n {
        // q_m(u) = sum_{d=1}^{m} q_{m,d} u^d; coefficients indexed d-1.
        let mut q = vec![BigRational::zero(); m];
        if m >= 2 {
            // Source sum_{p} q_p q_{m-p} has powers u^2..u^m; matching
            // 2 f0 d q_{m,d} = 2 f0 q_{m,d} + s_d gives q_{m,d} = s_d / (2 f0 (d-1)).
            let mut source: Vec<BigRational> = Vec::new();
            for p in 1..m {
                // Product coefficients live at u^{d1+d2}; shift by the u^1 offset.
                let prod = poly_mul(&bands[p - 1], &bands[m - p - 1]);
                poly_add_into(&mut source, &prod);
            }
            for (idx, sv) in source.iter().enumerate() {
                let d = idx + 2; // u^{d}: offsets (d1-1)+(d2-1) = d-2
                q[d - 1] = sv / (&two_diag * BigRational::from_usize(d - 1).expect("small"));
            }
        }
        // Initial condition q_m(1) = f0[m] fixes the u^1 coefficient.
        let tail: BigRational = q[1..].iter().fold(BigRational::zero(), |a, b| a + b);
        q[0] = rational(f0[m]) - tail;
        bands.push(q);
    }
    Ok(BandSolution {
        kind: BandKind::BorelExponential,
        n,
        diagonal: Some(diag),
        bands: bands
            .iter()
            .map(|p| p.iter().map(|r| r.to_f64().expect("fits f64")).collect())
            .collect(),
    })
}

impl BandSolution {
    /// Value of band m at time t (m = 0 is the Borel diagonal).
    pub fn band_value(&self, m: usize, t: f64) -> f64 {
        match self.kind {
            BandKind::NilpotentPolynomial => {
                assert!((1..self.n).contains(&m), "band index out of range");
                let mut acc = 0.0;
                for &coef in self.bands[m - 1].iter().rev() {
                    acc = acc * t + coef;
                }
                acc
            }
            BandKind::BorelExponential => {
                if m == 0 {
                    return self.diagonal.expect("borel has a diagonal");
                }
                assert!(m < self.n, "band index out of range");
                let u = (2.0 * self.diagonal.expect("borel") * t).exp();
                let mut acc = 0.0;
                for &coef in self.bands[m - 1].iter().rev() {
                    acc = (acc + coef) * u;
                }
                acc
            }
        }
    }

    /// Coefficients of band m >= 1: powers t^0.. (nilpotent) or u^1.. (Borel).
    pub fn band_coefficients(&self, m: usize) -> &[f64] {
        &self.bands[m - 1]
    }

    /// The algebra this solution lives on.
    pub fn algebra_spec(&self) -> AlgebraSpec {
        match self.kind {
            BandKind::NilpotentPolynomial => AlgebraSpec::StrictUpper { n: self.n },
            BandKind::BorelExponential => AlgebraSpec::Borel { n: self.n },
        }
    }

    /// The diagonal form on the band-major basis at time t.
    pub fn form_at(&self, t: f64) -> HermitianForm {
        let n = self.n;
        let mut diag = Vec::new();
        if self.kind == BandKind::BorelExponential {
            diag.extend(std::iter::repeat(self.band_value(0, t)).take(n));
        }
        for m in 1..n {
            let v = self.band_value(m, t);
            diag.extend(std::iter::repeat(v).take(n - m));
        }
        HermitianForm::from_diagonal(&diag)
    }

    pub fn initial_form(&self) -> HermitianForm {
        self.form_at(0.0)
    }

    /// Polynomial degree of the top band (nilpotent): n - 2.
    pub fn top_band_degree(&self) -> usize {
        self.bands.last().map(|p| p.len() - 1).unwrap_or(0)
    }

    /// Asymptotic log-growth rate of the top band (Borel): 2 f^(0) (n-1).
    pub fn top_band_rate(&self) -> f64 {
        match self.kind {
            BandKind::BorelExponential => {
                2.0 * self.diagonal.expect("borel") * (self.n - 1) as f64
            }
            BandKind::NilpotentPolynomial => 0.0,
        }
    }
}

// ---- Comparison monitor ----------------------------------------------------

/// Series of min eigenvalue of h(t) - k(t) for two jointly integrated flows.
#[derive(Clone, Debug)]
pub struct ComparisonSeries {
    pub times: Vec<f64>,
    pub min_eigenvalue_diff: Vec<f64>,
    pub termination: Termination,
}

/// Integrate h and k as one stacked system (shared adaptive grid) and track
/// the ordering h(t) >= k(t). Preconditions h0 >= k0 >= 0 are checked.
pub fn comparison_monitor(
    alg: &LieAlgebra,
    h0: &HermitianForm,
    k0: &HermitianForm,
    cfg: &IntegratorConfig,
) -> Result<ComparisonSeries, FlowError> {
    cfg.validate()?;
    let d = alg.dim();
    for f in [h0, k0] {
        if f.dim() != d {
            return Err(FlowError::DimMismatch { expected: d, got: f.dim() });
        }
    }
    let tol = 1e-10 * 1.0f64.max(h0.sup_norm());
    let k0_min = k0.min_eigenvalue();
    if k0_min < -tol {
        return Err(FlowError::ComparisonPrecondition {
            inequality: "k0 >= 0",
            min_eigenvalue: k0_min,
        });
    }
    let diff_min = (h0 - k0).min_eigenvalue();
    if diff_min < -tol {
        return Err(FlowError::ComparisonPrecondition {
            inequality: "h0 >= k0",
            min_eigenvalue: diff_min,
        });
    }

    let block = 2 * d * d;
    let mut y0 = DVector::zeros(2 * block);
    {
        let mut tmp = DVector::zeros(block);
        flatten(h0.matrix(), &mut tmp);
        y0.rows_mut(0, block).copy_from(&tmp);
        flatten(k0.matrix(), &mut tmp);
        y0.rows_mut(block, block).copy_from(&tmp);
    }
    let halves = |y: &DVector<f64>| -> (HermitianForm, HermitianForm) {
        let yh = y.rows(0, block).into_owned();
        let yk = y.rows(block, block).into_owned();
        (
            HermitianForm::from_matrix(unflatten(&yh, d)),
            HermitianForm::from_matrix(unflatten(&yk, d)),
        )
    };

    let mut times = Vec::new();
    let mut min_eigenvalue_diff = Vec::new();
    let end = dopri5_drive(
        cfg,
        y0,
        |y, dy| {
            let (h, k) = halves(y);
            let dh = forms::sharp_square(alg, &h).expect("dims fixed");
            let dk = forms::sharp_square(alg, &k).expect("dims fixed");
            let mut tmp = DVector::zeros(block);
            flatten(dh.matrix(), &mut tmp);
            dy.rows_mut(0, block).copy_from(&tmp);
            flatten(dk.matrix(), &mut tmp);
            dy.rows_mut(block, block).copy_from(&tmp);
        },
        |y| {
            let (h, k) = halves(y);
            let mut tmp = DVector::zeros(block);
            flatten(h.matrix(), &mut tmp);
            y.rows_mut(0, block).copy_from(&tmp);
            flatten(k.matrix(), &mut tmp);
            y.rows_mut(block, block).copy_from(&tmp);
        },
        |y| {
            let (h, k) = halves(y);
            h.sup_norm().max(k.sup_norm())
        },
        |t, y| {
            let (h, k) = halves(y);
            let v = (&h - &k).min_eigenvalue();
            if times.last() == Some(&t) {
                *min_eigenvalue_diff.last_mut().expect("nonempty") = v;
            } else {
                times.push(t);
                min_eigenvalue_diff.push(v);
            }
        },
    );
    let termination = match end {
        DriveEnd::ReachedTEnd => Termination::ReachedTEnd,
        DriveEnd::Blowup { t_last } => Termination::BlowupDetected { t_last },
        DriveEnd::MaxSteps => Termination::MaxSteps,
        DriveEnd::Underflow { t_last, norm_grew } => {
            if norm_grew {
                Termination::BlowupDetected { t_last }
            } else {
                Termination::StepUnderflow { t_last }
            }
        }
    };
    Ok(ComparisonSeries { times, min_eigenvalue_diff, termination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::AlgebraSpec;

    fn alg(spec: &str) -> LieAlgebra {
        LieAlgebra::from_spec(&AlgebraSpec::parse(spec).unwrap()).unwrap()
    }

    #[test]
    fn su2c_isotropic_reaches_ten_at_0_9() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { t_end: Some(0.9), ..Default::default() };
        let traj = integrate(&g, &HermitianForm::identity(3), &cfg).unwrap();
        assert_eq!(traj.termination, Termination::ReachedTEnd);
        let last = traj.final_sample();
        assert_eq!(last.t, 0.9);
        let dev = (&last.form - &HermitianForm::identity(3).scale(10.0)).frobenius_norm();
        assert!(dev < 1e-8, "h(0.9) off by {dev:.3e}");
    }

    #[test]
    fn su2_scalar_oracle_blowup_and_conservation() {
        let cfg = IntegratorConfig::default();
        let traj = su2_diagonal_flow([1.0, 1.0, 1.0], &cfg).unwrap();
        assert!(matches!(traj.termination, Termination::BlowupDetected { .. }));
        // 1/lambda is exactly linear; the trailing fit lands on t* = 1.
        let est = crate::analysis::estimate_blowup_from_series(&traj.times(), &traj.sup_norms())
            .unwrap();
        assert!((est - 1.0).abs() < 1e-4, "t* estimate {est}");

        // Conservation of lambda_i^2 - lambda_j^2. Checked up to sup norm
        // 1e3: past lambda ~ 1e4 the squares themselves lose the 1e-8
        // absolute digits in f64, independent of the integrator.
        let cfg = IntegratorConfig { blowup_norm: 1e3, ..Default::default() };
        let traj = su2_diagonal_flow([1.0, 1.0, 2.0], &cfg).unwrap();
        assert!(matches!(traj.termination, Termination::BlowupDetected { .. }));
        for (_, l) in &traj.samples {
            assert!((l[2] * l[2] - l[0] * l[0] - 3.0).abs() < 1e-8);
            assert!((l[1] * l[1] - l[0] * l[0]).abs() < 1e-8);
        }

        assert!(matches!(
            su2_diagonal_flow([1.0, -1.0, 1.0], &cfg),
            Err(FlowError::NonPositiveEigenvalue { index: 1, .. })
        ));
    }

    #[test]
    fn su2_lambda3_at_lambda1_crossing() {
        // Find t with lambda_1(t) = 2 by secant refinement on fresh
        // integrations, then check lambda_3 = sqrt(7) via the conservation law.
        let lambda1_at = |t: f64| -> [f64; 3] {
            let cfg = IntegratorConfig { t_end: Some(t), ..Default::default() };
            su2_diagonal_flow([1.0, 1.0, 2.0], &cfg).unwrap().final_sample().1
        };
        let (mut a, mut b) = (0.3, 0.7);
        let mut fa = lambda1_at(a)[0] - 2.0;
        for _ in 0..60 {
            let fb = lambda1_at(b)[0] - 2.0;
            let c = b - fb * (b - a) / (fb - fa);
            a = b;
            fa = fb;
            b = c;
            if (b - a).abs() < 1e-13 {
                break;
            }
        }
        let l = lambda1_at(b);
        assert!((l[0] - 2.0).abs() < 1e-9, "crossing refinement failed: {l:?}");
        assert!((l[2] - 7f64.sqrt()).abs() < 1e-6, "lambda3 = {} vs sqrt(7)", l[2]);
    }

    #[test]
    fn strict_upper_3_matrix_flow_is_linear_in_top_band() {
        let g = alg("strict_upper:3");
        let cfg = IntegratorConfig { t_end: Some(5.0), ..Default::default() };
        let h0 = HermitianForm::from_diagonal(&[1.0, 2.0, 3.0]);
        let traj = integrate(&g, &h0, &cfg).unwrap();
        let expected = HermitianForm::from_diagonal(&[1.0, 2.0, 13.0]);
        let dev = (&traj.final_sample().form - &expected).frobenius_norm();
        assert!(dev < 1e-8, "h(5) off by {dev:.3e}");
    }

    #[test]
    fn abelian_flow_is_constant() {
        let g = alg("abelian:4");
        let cfg =
            IntegratorConfig { t_end: Some(10.0), sample_interval: Some(0.5), ..Default::default() };
        let h0 = HermitianForm::from_diagonal(&[1.0, 2.0, 3.0, 4.0]);
        let traj = integrate(&g, &h0, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::ReachedTEnd);
        for s in &traj.samples {
            assert!((&s.form - &h0).frobenius_norm() < 1e-14);
        }
        // Grid samples land exactly.
        assert_eq!(traj.samples[3].t, 1.5);
    }

    #[test]
    fn indefinite_h0_warns_but_integrates() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { t_end: Some(0.1), ..Default::default() };
        let h0 = HermitianForm::from_diagonal(&[1.0, 1.0, -0.5]);
        let traj = integrate(&g, &h0, &cfg).unwrap();
        assert_eq!(traj.warnings.len(), 1);
        assert!(traj.warnings[0].contains("indefinite"));
    }

    #[test]
    fn max_steps_termination() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { max_steps: 5, t_end: Some(1000.0), ..Default::default() };
        let traj = integrate(&g, &HermitianForm::identity(3), &cfg).unwrap();
        assert_eq!(traj.termination, Termination::MaxSteps);
    }

    #[test]
    fn diagonal_preservation_on_su2c() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { blowup_norm: 1e6, ..Default::default() };
        let traj = integrate(&g, &HermitianForm::from_diagonal(&[1.0, 2.0, 3.0]), &cfg).unwrap();
        assert!(matches!(traj.termination, Termination::BlowupDetected { .. }));
        for s in &traj.samples {
            let mut off = 0.0f64;
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        off = off.max(s.form.entry(i, j).norm());
                    }
                }
            }
            assert!(off < 1e-10 * s.sup_norm);
        }
    }

    #[test]
    fn thinning_caps_per_step_sampling() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { rel_tol: 1e-13, abs_tol: 1e-15, ..Default::default() };
        let traj = integrate(&g, &HermitianForm::identity(3), &cfg).unwrap();
        assert!(matches!(traj.termination, Termination::BlowupDetected { .. }));
        assert!(traj.samples.len() <= 10_001, "got {} samples", traj.samples.len());
        assert_eq!(traj.samples[0].t, 0.0);
        for w in traj.samples.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        let t_last = match traj.termination {
            Termination::BlowupDetected { t_last } => t_last,
            _ => unreachable!(),
        };
        assert_eq!(traj.final_sample().t, t_last);
        // At these tolerances the controller's step can hit min_step just
        // short of blowup_norm; either trigger counts, so only require that
        // the norm actually diverged.
        assert!(traj.final_sample().sup_norm > 1e10);
    }

    #[test]
    fn nilpotent_band_values() {
        // n = 3, f0 = (a, c): band 1 constant, band 2 = c + a^2 t.
        let sol = nilpotent_band_closed_form(3, &[1.5, 0.5]).unwrap();
        assert_eq!(sol.band_coefficients(1), &[1.5]);
        assert_eq!(sol.band_coefficients(2), &[0.5, 2.25]);
        assert_eq!(sol.band_value(2, 2.0), 0.5 + 2.25 * 2.0);

        // n = 2: single constant band.
        let sol = nilpotent_band_closed_form(2, &[3.0]).unwrap();
        assert_eq!(sol.band_coefficients(1), &[3.0]);
        assert_eq!(sol.top_band_degree(), 0);

        // n = 4, all-ones: band 3 = 1 + 2t + t^2 (exact rational recursion).
        let sol = nilpotent_band_closed_form(4, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(sol.band_coefficients(3), &[1.0, 2.0, 1.0]);
        assert_eq!(sol.top_band_degree(), 2);

        assert!(nilpotent_band_closed_form(1, &[]).is_err());
        assert!(nilpotent_band_closed_form(3, &[1.0]).is_err());
        assert!(nilpotent_band_closed_form(3, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn borel_band_values() {
        // n = 2, f0 = (p, r): band 1 = r e^{2pt}.
        let sol = borel_band_closed_form(2, &[0.7, 2.0]).unwrap();
        let t = 0.3;
        assert!((sol.band_value(1, t) - 2.0 * (1.4 * t).exp()).abs() < 1e-14);
        assert_eq!(sol.band_value(0, t), 0.7);
        assert!((sol.top_band_rate() - 1.4).abs() < 1e-15);

        // Zero diagonal: constant band for n = 2, error for n >= 3.
        let sol = borel_band_closed_form(2, &[0.0, 5.0]).unwrap();
        assert_eq!(sol.band_value(1, 10.0), 5.0);
        assert!(borel_band_closed_form(3, &[0.0, 1.0, 1.0]).is_err());

        // n = 3 all-ones: band 2 = (u + u^2)/2.
        let sol = borel_band_closed_form(3, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(sol.band_coefficients(2), &[0.5, 0.5]);
        let u = (2.0f64 * 0.25).exp();
        assert!((sol.band_value(2, 0.25) - (u + u * u) / 2.0).abs() < 1e-14);

        assert!(borel_band_closed_form(1, &[1.0]).is_err());
        assert!(borel_band_closed_form(3, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn band_solutions_match_integrator() {
        // Nilpotent n = 4.
        let sol = nilpotent_band_closed_form(4, &[1.0, 0.5, 2.0]).unwrap();
        let g = alg("strict_upper:4");
        let cfg = IntegratorConfig { t_end: Some(3.0), ..Default::default() };
        let traj = integrate(&g, &sol.initial_form(), &cfg).unwrap();
        let num = &traj.final_sample().form;
        let exact = sol.form_at(3.0);
        let rel = (num - &exact).frobenius_norm() / exact.frobenius_norm();
        assert!(rel < 1e-6, "nilpotent mismatch {rel:.3e}");

        // Borel n = 3 at t = 2 (the spec's cross-check instance).
        let sol = borel_band_closed_form(3, &[1.0, 1.0, 1.0]).unwrap();
        let g = alg("borel:3");
        let cfg = IntegratorConfig { t_end: Some(2.0), ..Default::default() };
        let traj = integrate(&g, &sol.initial_form(), &cfg).unwrap();
        let exact = sol.form_at(2.0);
        let rel = (&traj.final_sample().form - &exact).frobenius_norm() / exact.frobenius_norm();
        assert!(rel < 1e-6, "borel mismatch {rel:.3e}");
    }

    #[test]
    fn comparison_monitor_basics() {
        let g = alg("su2c");
        let cfg = IntegratorConfig { blowup_norm: 1e6, ..Default::default() };
        let two = HermitianForm::identity(3).scale(2.0);
        let one = HermitianForm::identity(3);
        let series = comparison_monitor(&g, &two, &one, &cfg).unwrap();
        assert!(matches!(series.termination, Termination::BlowupDetected { .. }));
        assert!(series.min_eigenvalue_diff.iter().all(|&v| v >= -1e-8));

        let cfg = IntegratorConfig { t_end: Some(0.5), ..Default::default() };
        let series = comparison_monitor(&g, &one, &one, &cfg).unwrap();
        assert!(series.min_eigenvalue_diff.iter().all(|&v| v.abs() <= 1e-10));

        match comparison_monitor(&g, &one, &two, &cfg) {
            Err(FlowError::ComparisonPrecondition { inequality: "h0 >= k0", .. }) => {}
            other => panic!("expected h0 >= k0 violation, got {other:?}"),
        }
        let neg = HermitianForm::from_diagonal(&[-1.0, 0.0, 0.0]);
        match comparison_monitor(&g, &one, &neg, &cfg) {
            Err(FlowError::ComparisonPrecondition { inequality: "k0 >= 0", .. }) => {}
            other => panic!("expected k0 >= 0 violation, got {other:?}"),
        }
    }

    #[test]
    fn positivity_persists_along_flow() {
        let g = alg("borel:3");
        let cfg =
            IntegratorConfig { t_end: Some(2.0), sample_interval: Some(0.05), ..Default::default() };
        let h0 = HermitianForm::from_diagonal(&[0.5, 0.5, 0.5, 1.0, 1.0, 2.0]);
        let traj = integrate(&g, &h0, &cfg).unwrap();
        let floor = h0.min_eigenvalue() - 1e-8;
        for s in &traj.samples {
            assert!(s.min_eigenvalue >= floor, "min eig dipped to {}", s.min_eigenvalue);
        }
    }

    #[test]
    fn config_validation_errors() {
        let g = alg("su2c");
        let bad = IntegratorConfig { rel_tol: -1.0, ..Default::default() };
        assert!(matches!(
            integrate(&g, &HermitianForm::identity(3), &bad),
            Err(FlowError::BadConfig(_))
        ));
        assert!(matches!(
            integrate(&g, &HermitianForm::identity(4), &IntegratorConfig::default()),
            Err(FlowError::DimMismatch { expected: 3, got: 4 })
        ));
    }
}
