//! The Hopf model: su(2) complexified acting on C^2 \ {0}. For the identity
//! form the curvature tensor reproduces the metric itself (lambda = 1), so
//! the flow from the identity stays on the identity ray: self-similar
//! evolution c(t) I with c' = c^2, blowing up at t = 1/c(0).

use hcf::flow::{integrate, IntegratorConfig};
use hcf::forms::HermitianForm;
use hcf::geometry::{
    build_model, induced_metric, random_points, scale_static_check, theta_coordinate, ModelSpec,
};
use hcf::lie::{AlgebraSpec, LieAlgebra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let model = build_model(&ModelSpec::HopfSl2).unwrap();
    let id = HermitianForm::identity(3);

    // Theta(g_h) = lambda * g_h pointwise, with the same lambda everywhere.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let points = random_points(&mut rng, 2, 25, 0.2, 5.0);
    let report = scale_static_check(&model, &id, &points).unwrap();
    println!(
        "identity form: lambda = {:.12}, max relative deviation {:.3e} over {} points",
        report.lambda, report.max_relative_deviation, report.points_used
    );

    // A non-identity form is not scale-static on this model.
    let skew = HermitianForm::from_diagonal(&[1.0, 1.0, 2.0]);
    let report = scale_static_check(&model, &skew, &points).unwrap();
    println!(
        "diag(1,1,2):   best lambda = {:.4}, max relative deviation {:.3}",
        report.lambda, report.max_relative_deviation
    );

    // Consequence for the flow: h^# = h at the identity, and along the ray
    // c I the sharp square is c^2 I, so h(t) = I / (1 - t) exactly.
    let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("su2c").unwrap()).unwrap();
    let cfg = IntegratorConfig {
        t_end: Some(0.75),
        sample_interval: Some(0.25),
        ..IntegratorConfig::default()
    };
    let traj = integrate(&alg, &id, &cfg).unwrap();
    for s in &traj.samples {
        println!(
            "t = {:.2}: h = {:.12} I (closed form {})",
            s.t,
            s.form.entry(0, 0).re,
            1.0 / (1.0 - s.t)
        );
    }

    // The induced metric and its curvature at one concrete point.
    let z = points[0].clone();
    let g = induced_metric(&model, &id, &z).unwrap();
    let theta = theta_coordinate(&model, &id, &z).unwrap();
    println!("at z with |z| = {:.3}:", z.norm());
    println!("  g_upper[0][0]     = {:.6}", g.g_upper[(0, 0)].re);
    println!("  theta_upper[0][0] = {:.6}", theta[(0, 0)].re);
}
