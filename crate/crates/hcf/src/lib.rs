//! Hermitian curvature flow on complex Lie groups, reduced to an ODE.
//!
//! On a complex Lie group with a left-invariant metric, the curvature-flow
//! equation for the metric coefficients closes into a matrix Riccati ODE
//! `dh/dt = h^#`, where `#` is a quadratic operation built from the structure
//! constants of the Lie algebra. This crate implements that reduction end to
//! end:
//!
//! - [`lie`]: complex Lie algebras as structure-constant tables, with
//!   construction of the standard families (su(2) complexified, strictly
//!   upper-triangular, Borel, Heisenberg, abelian, direct sums), validation
//!   (antisymmetry, Jacobi), classification by the lower-central and derived
//!   series, Killing forms, and homomorphism checks.
//! - [`forms`]: Hermitian forms on a Lie algebra, the sharp operation
//!   `h # k` and its square `h^# = ½ (h # h)`, positivity analysis,
//!   pushforwards along homomorphisms, and a trilinear contraction.
//! - [`flow`]: adaptive Dormand-Prince 5(4) integration of `dh/dt = h^#`
//!   with blow-up detection, a scalar oracle for the su(2) eigenvalue
//!   system, closed-form band solutions for nilpotent and Borel algebras,
//!   and a two-trajectory comparison monitor.
//! - [`analysis`]: growth-regime classification (polynomial / exponential /
//!   finite-time blow-up), blow-up-time estimation, pinching distances,
//!   Einstein-type residuals, and the kernel/annihilator rank check.
//! - [`geometry`]: explicit homogeneous models as affine holomorphic frames,
//!   induced metrics, and two independent computations of the
//!   torsion-twisted Chern-Ricci form that must agree.
//! - [`run`]: run configuration, CSV/JSON trajectory output, and the
//!   subcommand drivers behind the `hcf` binary
//!   (`flow`, `sweep`, `verify`, `classify`, `report`).
//!
//! The `examples/` directory exercises each capability end to end; start
//! with `cargo run --example sharp_basics`. The acceptance suite lives in
//! `tests/acceptance.rs` and prints one line per criterion.

pub mod analysis;
pub mod flow;
pub mod forms;
pub mod geometry;
pub mod lie;
mod linalg;
pub mod run;

pub use linalg::{C64, CMatrix, CVector};
