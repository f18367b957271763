//! Command-line harness: single flow runs, seeded randomized sweeps,
//! geometry cross-validation, algebra classification, and markdown report
//! generation. Everything is reproducible from the recorded config — the
//! seed is fixed before any random draw, and identical configs produce
//! byte-identical CSV outputs.
//!
//! Exit codes: 0 ok, 2 config error, 3 integration failure (partial outputs
//! retained), 4 verification tolerance breach, 5 no data for a report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, EinsteinReport, GrowthRegime, GrowthReport};
use crate::flow::{self, FlowError, IntegratorConfig, Monitor, Termination, Trajectory};
use crate::forms::{self, HermitianForm};
use crate::geometry::{self, build_model, ModelSpec};
use crate::lie::{classify_algebra, AlgebraSpec, LieAlgebra};
use crate::linalg::{self, CVector};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_INTEGRATION: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;
pub const EXIT_NO_DATA: u8 = 5;

/// Cross-check tolerances used by `verify` (relative to the bracket-formula
/// norm, floored at 1): analytic coordinate path, finite-difference path,
/// and the pushforward identity.
pub const VERIFY_TOL_ANALYTIC: f64 = 1e-10;
pub const VERIFY_TOL_FD: f64 = 1e-5;
pub const VERIFY_TOL_PUSH: f64 = 1e-10;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    fn io(context: &str, err: std::io::Error) -> Self {
        CliError { code: 1, message: format!("{context}: {err}") }
    }
}

pub type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// Form specs
// ---------------------------------------------------------------------------

/// Textual initial-form description. `identity`, `diag:1,1,2`,
/// `random_pd(seed[,scale])`, `random_pd_diag(seed[,scale])`, `file:path`.
#[derive(Clone, Debug, PartialEq)]
pub enum FormSpec {
    Identity,
    Diagonal(Vec<f64>),
    RandomPd { seed: u64, scale: f64, diagonal: bool },
    File(PathBuf),
}

impl FormSpec {
    pub fn parse(input: &str) -> Result<Self, String> {
        let s = input.trim();
        if s == "identity" {
            return Ok(FormSpec::Identity);
        }
        if let Some(rest) = s.strip_prefix("diag:") {
            let diag = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| format!("bad diagonal entry in {s:?}: {e}"))?;
            if diag.is_empty() {
                return Err(format!("empty diagonal in {s:?}"));
            }
            return Ok(FormSpec::Diagonal(diag));
        }
        for (prefix, diagonal) in [("random_pd(", false), ("random_pd_diag(", true)] {
            if let Some(rest) = s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                let (seed_str, scale_str) = match parts.as_slice() {
                    [seed] => (*seed, "1"),
                    [seed, scale] => (*seed, *scale),
                    _ => return Err(format!("expected (seed[,scale]) in {s:?}")),
                };
                let seed = seed_str.parse::<u64>().map_err(|e| format!("bad seed in {s:?}: {e}"))?;
                let scale =
                    scale_str.parse::<f64>().map_err(|e| format!("bad scale in {s:?}: {e}"))?;
                if !(scale > 0.0) {
                    return Err(format!("scale must be positive in {s:?}"));
                }
                return Ok(FormSpec::RandomPd { seed, scale, diagonal });
            }
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(FormSpec::File(PathBuf::from(rest)));
        }
        Err(format!(
            "cannot parse form spec {s:?} (expected identity, diag:..., \
             random_pd(seed[,scale]), random_pd_diag(seed[,scale]), or file:path)"
        ))
    }

    pub fn resolve(&self, dim: usize) -> Result<HermitianForm, String> {
        match self {
            FormSpec::Identity => Ok(HermitianForm::identity(dim)),
            FormSpec::Diagonal(d) => {
                if d.len() != dim {
                    return Err(format!(
                        "diagonal has {} entries but the algebra has dimension {dim}",
                        d.len()
                    ));
                }
                Ok(HermitianForm::from_diagonal(d))
            }
            FormSpec::RandomPd { seed, scale, diagonal } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok(if *diagonal {
                    forms::random_pd_diagonal(&mut rng, dim, *scale)
                } else {
                    forms::random_pd(&mut rng, dim, *scale)
                })
            }
            FormSpec::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read form file {}: {e}", path.display()))?;
                let form: HermitianForm = serde_json::from_str(&text)
                    .map_err(|e| format!("bad form file {}: {e}", path.display()))?;
                if form.dim() != dim {
                    return Err(format!(
                        "form file has dimension {} but the algebra has dimension {dim}",
                        form.dim()
                    ));
                }
                Ok(form)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Run configuration and records
// ---------------------------------------------------------------------------

fn default_form_spec() -> String {
    "identity".into()
}

/// Everything needed to reproduce one flow run. Serializes to/from the
/// `--config` JSON file; integrator fields default like
/// [`IntegratorConfig::default`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: String,
    #[serde(default = "default_form_spec")]
    pub h0: String,
    #[serde(default)]
    pub t_end: Option<f64>,
    #[serde(default = "RunConfig::default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "RunConfig::default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "RunConfig::default_blowup_norm")]
    pub blowup_norm: f64,
    #[serde(default = "RunConfig::default_min_step")]
    pub min_step: f64,
    #[serde(default = "RunConfig::default_max_steps")]
    pub max_steps: usize,
    #[serde(default)]
    pub sample_interval: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Pinching target form spec; distance to its ray is recorded as a
    /// monitor column.
    #[serde(default = "default_form_spec")]
    pub target: String,
}

impl RunConfig {
    fn default_rel_tol() -> f64 {
        IntegratorConfig::default().rel_tol
    }
    fn default_abs_tol() -> f64 {
        IntegratorConfig::default().abs_tol
    }
    fn default_blowup_norm() -> f64 {
        IntegratorConfig::default().blowup_norm
    }
    fn default_min_step() -> f64 {
        IntegratorConfig::default().min_step
    }
    fn default_max_steps() -> usize {
        IntegratorConfig::default().max_steps
    }

    pub fn new(algebra: impl Into<String>) -> Self {
        RunConfig {
            algebra: algebra.into(),
            h0: default_form_spec(),
            t_end: None,
            rel_tol: Self::default_rel_tol(),
            abs_tol: Self::default_abs_tol(),
            blowup_norm: Self::default_blowup_norm(),
            min_step: Self::default_min_step(),
            max_steps: Self::default_max_steps(),
            sample_interval: None,
            seed: 0,
            target: default_form_spec(),
        }
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            t_end: self.t_end,
            max_steps: self.max_steps,
            blowup_norm: self.blowup_norm,
            min_step: self.min_step,
            sample_interval: self.sample_interval,
        }
    }
}

/// Everything a run left behind, written as `run.json` next to the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub config: RunConfig,
    pub algebra: AlgebraSpec,
    pub labels: Vec<String>,
    pub termination: Termination,
    pub samples: usize,
    pub t_last: f64,
    pub final_sup_norm: f64,
    pub growth: Option<GrowthReport>,
    pub growth_error: Option<String>,
    pub blowup_estimate: Option<f64>,
    /// Einstein residual of the final recorded form.
    pub einstein_final: Option<EinsteinReport>,
    /// Minimum pinching distance to the target's ray over the samples.
    pub pinching_floor: Option<f64>,
    pub warnings: Vec<String>,
    pub trajectory_csv: String,
    pub plot_script: String,
    pub wall_time_ms: f64,
    pub integration_error: Option<String>,
}

// ---------------------------------------------------------------------------
// File outputs
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal for f64 (Rust's Display guarantees the value
/// parses back bit-identically), keeping CSV outputs byte-reproducible.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// CSV layout: t, then re/im of the upper-triangle entries in row-major
/// index order, then the standard monitors, then any extra monitor columns.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> std::io::Result<()> {
    let d = traj.samples.first().map(|s| s.form.dim()).unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for i in 0..d {
        for j in i..d {
            let _ = write!(out, ",re_{i}_{j},im_{i}_{j}");
        }
    }
    out.push_str(",sup_norm,min_eigenvalue");
    for name in &traj.monitor_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for s in &traj.samples {
        out.push_str(&fmt_f64(s.t));
        for i in 0..d {
            for j in i..d {
                let v = s.form.entry(i, j);
                out.push(',');
                out.push_str(&fmt_f64(v.re));
                out.push(',');
                out.push_str(&fmt_f64(v.im));
            }
        }
        out.push(',');
        out.push_str(&fmt_f64(s.sup_norm));
        out.push(',');
        out.push_str(&fmt_f64(s.min_eigenvalue));
        for v in &s.extra {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push('\n');
    }
    fs::write(path, out)
}

pub fn write_plot_script(csv_name: &str, path: &Path) -> std::io::Result<()> {
    let script = format!(
        "# Norm evolution; run: gnuplot -persist {name}\n\
         set datafile separator ','\n\
         set xlabel 't'\n\
         set ylabel 'value'\n\
         set logscale y\n\
         plot '{csv}' using (column('t')):(column('sup_norm')) with lines title 'sup norm', \\\n\
         \x20    '' using (column('t')):(column('min_eigenvalue')) with lines title 'min eigenvalue'\n",
        name = path.file_name().and_then(|n| n.to_str()).unwrap_or("plot.gp"),
        csv = csv_name,
    );
    fs::write(path, script)
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

fn resolve_algebra(spec_str: &str) -> CliResult<(AlgebraSpec, LieAlgebra)> {
    let spec = AlgebraSpec::parse(spec_str).map_err(|e| CliError::config(e.to_string()))?;
    let alg = LieAlgebra::from_spec(&spec).map_err(|e| CliError::config(e.to_string()))?;
    Ok((spec, alg))
}

fn resolve_form(spec_str: &str, dim: usize) -> CliResult<HermitianForm> {
    FormSpec::parse(spec_str)
        .and_then(|s| s.resolve(dim))
        .map_err(CliError::config)
}

/// Runs one configuration into `out_dir` (created if needed), writing
/// trajectory.csv, plot.gp, and run.json. Returns the record plus the exit
/// code this run maps to (0, or 3 when the integration failed but partial
/// outputs were retained).
pub fn execute_run(cfg: &RunConfig, out_dir: &Path) -> CliResult<(RunRecord, u8)> {
    let (spec, alg) = resolve_algebra(&cfg.algebra)?;
    let h0 = resolve_form(&cfg.h0, alg.dim())?;
    let target = resolve_form(&cfg.target, alg.dim())?;
    let icfg = cfg.integrator();

    fs::create_dir_all(out_dir).map_err(|e| CliError::io("cannot create output directory", e))?;

    let monitor_target = target.clone();
    let monitors = vec![Monitor::new("pinching", move |_t, h: &HermitianForm| {
        analysis::pinching_distance(h, &monitor_target).unwrap_or(f64::NAN)
    })];

    let started = Instant::now();
    let result = flow::integrate_with_monitors(&alg, &h0, &icfg, &monitors);
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;

    let (traj, integration_error, code) = match result {
        Ok(t) => (t, None, 0u8),
        Err(FlowError::StepUnderflow { t_last, sup_norm, partial }) => (
            *partial,
            Some(format!(
                "step size underflow at t = {t_last:.6e} without norm growth (sup_norm {sup_norm:.3e})"
            )),
            EXIT_INTEGRATION,
        ),
        Err(e @ (FlowError::BadConfig(_) | FlowError::DimMismatch { .. })) => {
            return Err(CliError::config(e.to_string()));
        }
        Err(e) => {
            return Err(CliError { code: EXIT_INTEGRATION, message: e.to_string() });
        }
    };

    let csv_path = out_dir.join("trajectory.csv");
    let plot_path = out_dir.join("plot.gp");
    write_trajectory_csv(&traj, &csv_path).map_err(|e| CliError::io("cannot write CSV", e))?;
    write_plot_script("trajectory.csv", &plot_path)
        .map_err(|e| CliError::io("cannot write plot script", e))?;

    let (growth, growth_error) = match analysis::classify_growth(&traj) {
        Ok(g) => (Some(g), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let blowup_estimate = analysis::estimate_blowup_time(&traj).ok();
    let last = traj.final_sample();
    let einstein_final = analysis::einstein_residual(&alg, &last.form).ok();
    let pinching_floor = traj
        .monitor("pinching")
        .map(|vals| vals.into_iter().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min))
        .filter(|v| v.is_finite());

    let record = RunRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        algebra: spec,
        labels: alg.labels().to_vec(),
        termination: traj.termination,
        samples: traj.samples.len(),
        t_last: last.t,
        final_sup_norm: last.sup_norm,
        growth,
        growth_error,
        blowup_estimate,
        einstein_final,
        pinching_floor,
        warnings: traj.warnings.clone(),
        trajectory_csv: "trajectory.csv".into(),
        plot_script: "plot.gp".into(),
        wall_time_ms,
        integration_error,
    };
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    fs::write(out_dir.join("run.json"), json)
        .map_err(|e| CliError::io("cannot write run.json", e))?;
    Ok((record, code))
}

fn regime_cell(record: &RunRecord) -> String {
    match &record.growth {
        Some(g) => match g.regime {
            GrowthRegime::Polynomial { degree } => format!("polynomial(degree={degree:.3})"),
            GrowthRegime::Exponential { rate } => format!("exponential(rate={rate:.3})"),
            GrowthRegime::FiniteTimeBlowup { t_star } => {
                format!("finite_time_blowup(t*={t_star:.6})")
            }
        },
        None => "unclassified".into(),
    }
}

fn termination_cell(t: &Termination) -> String {
    match t {
        Termination::ReachedTEnd => "reached_t_end".into(),
        Termination::BlowupDetected { t_last } => format!("blowup_detected(t_last={t_last:.6})"),
        Termination::StepUnderflow { t_last } => format!("step_underflow(t_last={t_last:.6})"),
        Termination::MaxSteps => "max_steps".into(),
    }
}

fn print_run_summary(record: &RunRecord, out_dir: &Path) {
    println!(
        "algebra {} (dim {}), h0 {}",
        record.config.algebra,
        record.labels.len(),
        record.config.h0
    );
    println!(
        "termination: {}, {} samples, wall {:.1} ms",
        termination_cell(&record.termination),
        record.samples,
        record.wall_time_ms
    );
    match (&record.growth, &record.growth_error) {
        (Some(g), _) => println!("growth: {} (fit R^2 {:.4})", regime_cell(record), g.fit_quality),
        (None, Some(e)) => println!("growth: unclassified ({e})"),
        (None, None) => {}
    }
    if let Some(t) = record.blowup_estimate {
        println!("blow-up estimate: t* = {t:.6}");
    }
    if let Some(e) = &record.einstein_final {
        println!(
            "einstein residual at t_last: {:.3e} (lambda* = {:.6e})",
            e.residual, e.lambda_star
        );
    }
    if let Some(p) = record.pinching_floor {
        println!("pinching floor vs {}: {:.3e}", record.config.target, p);
    }
    if let Some(err) = &record.integration_error {
        println!("integration error: {err}");
    }
    println!(
        "wrote {}, {}, {}",
        out_dir.join("trajectory.csv").display(),
        out_dir.join("run.json").display(),
        out_dir.join("plot.gp").display()
    );
}

pub fn cmd_flow(cfg: &RunConfig, out_dir: &Path) -> CliResult<RunRecord> {
    let (record, code) = execute_run(cfg, out_dir)?;
    print_run_summary(&record, out_dir);
    if code != 0 {
        return Err(CliError {
            code,
            message: format!(
                "integration failed ({}); partial outputs retained in {}",
                record.integration_error.as_deref().unwrap_or("unknown"),
                out_dir.display()
            ),
        });
    }
    Ok(record)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct SweepOpts {
    pub count: usize,
    pub jobs: usize,
    pub scale: f64,
    pub diagonal: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRunEntry {
    pub index: usize,
    pub seed: u64,
    pub dir: String,
    pub regime: Option<String>,
    pub blowup_estimate: Option<f64>,
    pub pinching_floor: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepSummary {
    pub algebra: String,
    pub master_seed: u64,
    pub count: usize,
    pub scale: f64,
    pub diagonal: bool,
    pub regime_counts: BTreeMap<String, usize>,
    pub runs: Vec<SweepRunEntry>,
}

/// `count` runs with per-run seed `master_seed + i` (wrapping) and seeded
/// random PD initial forms, executed by `jobs` workers. Work order does not
/// affect any output: each run is a pure function of its own config and
/// writes only inside its own `run_###` directory.
pub fn cmd_sweep(base: &RunConfig, opts: SweepOpts, out_dir: &Path) -> CliResult<SweepSummary> {
    if opts.count == 0 {
        return Err(CliError::config("sweep needs count >= 1"));
    }
    // Fail fast on an unresolvable algebra before spawning workers.
    resolve_algebra(&base.algebra)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io("cannot create output directory", e))?;

    let results: Mutex<Vec<Option<SweepRunEntry>>> = Mutex::new(vec![None; opts.count]);
    let next = AtomicUsize::new(0);
    let workers = opts.jobs.clamp(1, opts.count);
    let kind = if opts.diagonal { "random_pd_diag" } else { "random_pd" };

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= opts.count {
                    break;
                }
                let seed = base.seed.wrapping_add(i as u64);
                let mut cfg = base.clone();
                cfg.seed = seed;
                cfg.h0 = format!("{kind}({seed},{scale})", scale = opts.scale);
                let dir = out_dir.join(format!("run_{i:03}"));
                let entry = match execute_run(&cfg, &dir) {
                    Ok((record, code)) => SweepRunEntry {
                        index: i,
                        seed,
                        dir: format!("run_{i:03}"),
                        regime: record.growth.as_ref().map(|g| regime_tag(&g.regime).to_string()),
                        blowup_estimate: record.blowup_estimate,
                        pinching_floor: record.pinching_floor,
                        error: if code == 0 { None } else { record.integration_error.clone() },
                    },
                    Err(e) => SweepRunEntry {
                        index: i,
                        seed,
                        dir: format!("run_{i:03}"),
                        regime: None,
                        blowup_estimate: None,
                        pinching_floor: None,
                        error: Some(e.message),
                    },
                };
                results.lock().expect("no poisoned workers")[i] = Some(entry);
            });
        }
    });

    let runs: Vec<SweepRunEntry> = results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|e| e.expect("every index visited"))
        .collect();

    let mut regime_counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &runs {
        let key = match (&r.error, &r.regime) {
            (Some(_), _) => "failed",
            (None, Some(tag)) => tag.as_str(),
            (None, None) => "unclassified",
        };
        *regime_counts.entry(key.to_string()).or_insert(0) += 1;
    }

    let summary = SweepSummary {
        algebra: base.algebra.clone(),
        master_seed: base.seed,
        count: opts.count,
        scale: opts.scale,
        diagonal: opts.diagonal,
        regime_counts,
        runs,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(out_dir.join("summary.json"), json)
        .map_err(|e| CliError::io("cannot write summary.json", e))?;

    println!("sweep {} x {}: seeds {}..", base.algebra, opts.count, base.seed);
    for (tag, n) in &summary.regime_counts {
        println!("  {tag}: {n}");
    }
    println!("wrote {}", out_dir.join("summary.json").display());

    let failed = summary.runs.iter().filter(|r| r.error.is_some()).count();
    if failed == opts.count {
        return Err(CliError {
            code: EXIT_INTEGRATION,
            message: format!("all {failed} sweep runs failed; see {}", out_dir.display()),
        });
    }
    Ok(summary)
}

fn regime_tag(r: &GrowthRegime) -> &'static str {
    match r {
        GrowthRegime::Polynomial { .. } => "polynomial",
        GrowthRegime::Exponential { .. } => "exponential",
        GrowthRegime::FiniteTimeBlowup { .. } => "finite_time_blowup",
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub model: String,
    pub trials: usize,
    pub max_coordinate_vs_brackets: f64,
    pub max_fd_vs_brackets: f64,
    pub max_brackets_vs_pushforward: f64,
    pub ok: bool,
}

fn rel_dev(a: &linalg::CMatrix, b: &linalg::CMatrix) -> f64 {
    linalg::frobenius_norm(&(a - b)) / linalg::frobenius_norm(b).max(1.0)
}

fn fmt_point(z: &CVector) -> String {
    let coords: Vec<String> =
        z.iter().map(|v| format!("{:.6}{:+.6}i", v.re, v.im)).collect();
    format!("({})", coords.join(", "))
}

/// Draws `trials` random (point, PD form) pairs and cross-checks the three
/// Theta computations against each other; breaching any tolerance exits 4
/// with the worst case printed.
pub fn cmd_verify(model_str: &str, trials: usize, seed: u64) -> CliResult<VerifyReport> {
    let spec = ModelSpec::parse(model_str).map_err(|e| CliError::config(e.to_string()))?;
    let model = build_model(&spec).map_err(|e| CliError::config(e.to_string()))?;
    let dim = model.algebra().dim();
    let n = model.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut maxima = [0.0f64; 3]; // analytic, fd, pushforward
    let mut worst: Option<(usize, usize, CVector, HermitianForm, f64)> = None;
    for trial in 0..trials {
        let h = forms::random_pd(&mut rng, dim, 1.0);
        let z = loop {
            let z = geometry::random_points(&mut rng, n, 1, 0.1, 10.0).pop().expect("one point");
            if model.in_domain(&z) {
                break z;
            }
        };
        let err = |e: geometry::GeometryError| CliError {
            code: EXIT_VERIFY,
            message: format!("evaluation failed at trial {trial}, z = {}: {e}", fmt_point(&z)),
        };
        let th_b = geometry::theta_brackets(&model, &h, &z).map_err(err)?;
        let th_c = geometry::theta_coordinate(&model, &h, &z)
            .map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
        let th_fd = geometry::theta_coordinate_fd(&model, &h, &z)
            .map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
        let sq = forms::sharp_square(model.algebra(), &h)
            .map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;
        let pushed = geometry::ev_pushforward(&model, &sq, &z)
            .map_err(|e| CliError { code: EXIT_VERIFY, message: e.to_string() })?;

        let devs = [rel_dev(&th_c, &th_b), rel_dev(&th_fd, &th_b), rel_dev(&th_b, &pushed)];
        for (which, d) in devs.into_iter().enumerate() {
            maxima[which] = maxima[which].max(d);
            // Track the case that is worst relative to its own tolerance.
            if worst.as_ref().is_none_or(|w| d / check_tol(which) > w.4 / check_tol(w.1)) {
                worst = Some((trial, which, z.clone(), h.clone(), d));
            }
        }
    }

    let ok = maxima[0] <= VERIFY_TOL_ANALYTIC
        && maxima[1] <= VERIFY_TOL_FD
        && maxima[2] <= VERIFY_TOL_PUSH;
    let report = VerifyReport {
        model: model_str.into(),
        trials,
        max_coordinate_vs_brackets: maxima[0],
        max_fd_vs_brackets: maxima[1],
        max_brackets_vs_pushforward: maxima[2],
        ok,
    };
    println!("verify {model_str}: {trials} trials");
    println!(
        "  coordinate vs brackets: max rel deviation {:.3e} (tol {:.0e})",
        maxima[0], VERIFY_TOL_ANALYTIC
    );
    println!(
        "  finite-diff vs brackets: max rel deviation {:.3e} (tol {:.0e})",
        maxima[1], VERIFY_TOL_FD
    );
    println!(
        "  brackets vs pushed sharp-square: max rel deviation {:.3e} (tol {:.0e})",
        maxima[2], VERIFY_TOL_PUSH
    );
    if !ok {
        let (trial, which, z, h, d) = worst.expect("breach implies a worst case");
        let name = ["coordinate-vs-brackets", "fd-vs-brackets", "brackets-vs-pushforward"][which];
        return Err(CliError {
            code: EXIT_VERIFY,
            message: format!(
                "verification failed: {name} deviation {d:.3e} at trial {trial}, z = {}, h = {}",
                fmt_point(&z),
                serde_json::to_string(&h).expect("form serializes"),
            ),
        });
    }
    println!("  ok");
    Ok(report)
}

fn check_tol(which: usize) -> f64 {
    [VERIFY_TOL_ANALYTIC, VERIFY_TOL_FD, VERIFY_TOL_PUSH][which]
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ClassifySummary {
    pub algebra: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub kind: crate::lie::AlgebraKind,
    pub lower_central_dims: Vec<usize>,
    pub derived_dims: Vec<usize>,
    pub derived_dim: usize,
    pub warnings: Vec<String>,
}

pub fn cmd_classify(algebra: &str, json: bool) -> CliResult<ClassifySummary> {
    let (_, alg) = resolve_algebra(algebra)?;
    let class = classify_algebra(&alg);
    let summary = ClassifySummary {
        algebra: algebra.into(),
        dim: alg.dim(),
        labels: alg.labels().to_vec(),
        kind: class.kind,
        lower_central_dims: class.lower_central_dims.clone(),
        derived_dims: class.derived_dims.clone(),
        derived_dim: class.derived_subalgebra.len(),
        warnings: class.warnings.clone(),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    } else {
        println!("algebra: {} (dim {})", summary.algebra, summary.dim);
        println!("kind: {:?}", summary.kind);
        println!("lower central series dims: {:?}", summary.lower_central_dims);
        println!("derived series dims: {:?}", summary.derived_dims);
        println!("derived subalgebra dim: {}", summary.derived_dim);
        println!("basis labels: {}", summary.labels.join(", "));
        for w in &summary.warnings {
            println!("warning: {w}");
        }
    }
    Ok(summary)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

/// Collects run.json records from `dir` and its immediate subdirectories,
/// writes `report.md` with one sorted row per record, and regenerates plot
/// scripts next to the CSVs they reference.
pub fn cmd_report(dir: &Path) -> CliResult<String> {
    let mut candidates = vec![dir.join("run.json")];
    if let Ok(entries) = fs::read_dir(dir) {
        let mut subs: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.is_dir())
            .collect();
        subs.sort();
        candidates.extend(subs.into_iter().map(|p| p.join("run.json")));
    }

    let mut records: Vec<(PathBuf, RunRecord)> = Vec::new();
    let mut broken: Vec<(PathBuf, String)> = Vec::new();
    for path in candidates {
        if !path.is_file() {
            continue;
        }
        match fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| serde_json::from_str::<RunRecord>(&text).map_err(|e| e.to_string()))
        {
            Ok(record) => records.push((path, record)),
            Err(e) => broken.push((path, e)),
        }
    }
    for (path, e) in &broken {
        eprintln!("skipping {}: {e}", path.display());
    }
    if records.is_empty() {
        return Err(CliError {
            code: EXIT_NO_DATA,
            message: format!("no valid run records under {}", dir.display()),
        });
    }
    records.sort_by(|(_, a), (_, b)| {
        (&a.config.algebra, a.config.seed).cmp(&(&b.config.algebra, b.config.seed))
    });

    let mut md = String::new();
    md.push_str("# Flow run summary\n\n");
    md.push_str(
        "| run | algebra | h0 | seed | termination | regime | fit R2 | t* | einstein residual | pinching floor | samples |\n",
    );
    md.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
    for (path, r) in &records {
        let run_dir = path.parent().unwrap_or(dir);
        let rel = run_dir.strip_prefix(dir).unwrap_or(run_dir);
        let name = if rel.as_os_str().is_empty() { ".".into() } else { rel.display().to_string() };
        let opt = |v: Option<f64>, prec: usize| {
            v.map(|x| format!("{x:.prec$e}")).unwrap_or_else(|| "-".into())
        };
        let _ = writeln!(
            md,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            name,
            r.config.algebra,
            r.config.h0,
            r.config.seed,
            termination_cell(&r.termination),
            regime_cell(r),
            r.growth.as_ref().map(|g| format!("{:.4}", g.fit_quality)).unwrap_or_else(|| "-".into()),
            opt(r.blowup_estimate, 6),
            opt(r.einstein_final.map(|e| e.residual), 3),
            opt(r.pinching_floor, 3),
            r.samples,
        );
        // Refresh the plot script next to the CSV it references.
        let csv = run_dir.join(&r.trajectory_csv);
        if csv.is_file() {
            let _ = write_plot_script(&r.trajectory_csv, &run_dir.join(&r.plot_script));
        }
    }
    if !broken.is_empty() {
        md.push_str("\nSkipped (unreadable records):\n");
        for (path, e) in &broken {
            let _ = writeln!(md, "- {}: {e}", path.display());
        }
    }
    fs::write(dir.join("report.md"), &md).map_err(|e| CliError::io("cannot write report.md", e))?;
    print!("{md}");
    Ok(md)
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "hcf",
    version,
    about = "Sharp-flow runs, sweeps, and curvature cross-checks on complex Lie groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct IntegratorArgs {
    /// Stop time (omit to run until blow-up or max steps)
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Terminate when the sup norm exceeds this
    #[arg(long)]
    pub blowup_norm: Option<f64>,
    #[arg(long)]
    pub min_step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Record samples on this uniform grid (omit to record every step)
    #[arg(long)]
    pub sample_interval: Option<f64>,
}

impl IntegratorArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if self.t_end.is_some() {
            cfg.t_end = self.t_end;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.blowup_norm {
            cfg.blowup_norm = v;
        }
        if let Some(v) = self.min_step {
            cfg.min_step = v;
        }
        if let Some(v) = self.max_steps {
            cfg.max_steps = v;
        }
        if self.sample_interval.is_some() {
            cfg.sample_interval = self.sample_interval;
        }
    }
}

#[derive(Args)]
pub struct FlowArgs {
    /// Algebra spec: su2c, strict_upper:n, borel:n, abelian:n, heisenberg3,
    /// direct_sum(a,b), or JSON
    #[arg(long)]
    pub algebra: Option<String>,
    /// Initial form: identity, diag:..., random_pd(seed[,scale]),
    /// random_pd_diag(seed[,scale]), file:path.json
    #[arg(long)]
    pub h0: Option<String>,
    /// Pinching target form spec (monitor column "pinching")
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// JSON RunConfig file; explicit flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $HCF_OUT or ./hcf_out)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub algebra: Option<String>,
    /// Number of runs
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Scale of the random initial forms
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Draw diagonal random forms instead of dense ones
    #[arg(long)]
    pub diagonal: bool,
    /// Master seed; run i uses seed + i
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pinching target form spec
    #[arg(long)]
    pub target: Option<String>,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Model spec: hopf_sl2, heisenberg_left, translations:n
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub algebra: String,
    /// Emit JSON instead of the human-readable listing
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Directory containing run.json records (itself or one level down)
    pub dir: PathBuf,
}

#[derive(Subcommand)]
pub enum Command {
    /// Integrate one flow; writes trajectory.csv, run.json, plot.gp
    Flow(FlowArgs),
    /// Many seeded runs with random initial forms, aggregated into summary.json
    Sweep(SweepArgs),
    /// Cross-validate the curvature formulas on a homogeneous model
    Verify(VerifyArgs),
    /// Classify an algebra: kind plus central and derived series
    Classify(ClassifyArgs),
    /// Summarize run records in a directory as markdown
    Report(ReportArgs),
}

fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
}

fn build_run_config(
    config: &Option<PathBuf>,
    algebra: &Option<String>,
    h0: &Option<String>,
    target: &Option<String>,
    seed: Option<u64>,
    integrator: &IntegratorArgs,
) -> CliResult<RunConfig> {
    let mut cfg = match config {
        Some(path) => load_config(path)?,
        None => RunConfig::new(""),
    };
    if let Some(a) = algebra {
        cfg.algebra = a.clone();
    }
    if cfg.algebra.is_empty() {
        return Err(CliError::config("missing --algebra (or an algebra field in --config)"));
    }
    if let Some(h) = h0 {
        cfg.h0 = h.clone();
    }
    if let Some(t) = target {
        cfg.target = t.clone();
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    integrator.apply(&mut cfg);
    Ok(cfg)
}

/// --out flag, then $HCF_OUT, then ./hcf_out.
fn resolve_out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os("HCF_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hcf_out"))
}

pub fn cli_main() -> ExitCode {
    let cli = Cli::parse();
    let result: CliResult<()> = match cli.command {
        Command::Flow(args) => {
            let cfg = build_run_config(
                &args.config,
                &args.algebra,
                &args.h0,
                &args.target,
                args.seed,
                &args.integrator,
            );
            cfg.and_then(|cfg| cmd_flow(&cfg, &resolve_out_dir(&args.out)).map(|_| ()))
        }
        Command::Sweep(args) => {
            // Sweeps generate their own per-run h0 specs, so no h0 flag here.
            let cfg = build_run_config(
                &args.config,
                &args.algebra,
                &None,
                &args.target,
                args.seed,
                &args.integrator,
            );
            let jobs = args.jobs.unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            });
            let opts = SweepOpts {
                count: args.count,
                jobs,
                scale: args.scale,
                diagonal: args.diagonal,
            };
            cfg.and_then(|cfg| cmd_sweep(&cfg, opts, &resolve_out_dir(&args.out)).map(|_| ()))
        }
        Command::Verify(args) => cmd_verify(&args.model, args.trials, args.seed).map(|_| ()),
        Command::Classify(args) => cmd_classify(&args.algebra, args.json).map(|_| ()),
        Command::Report(args) => cmd_report(&args.dir).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
