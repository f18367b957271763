//! Building a homogeneous model from user-supplied fields. The constructor
//! measures the bracket sign convention, rejects field systems that do not
//! realize the algebra, and the spec round-trips through JSON.

use hcf::geometry::{build_model, random_points, AffineField, GeometryError, ModelSpec};
use hcf::lie::AlgebraSpec;
use hcf::{C64, CMatrix, CVector};

fn main() {
    // Two commuting translation fields on C^2: a realization of abelian:2.
    let d0 = AffineField::constant(CVector::from_fn(2, |i, _| C64::new(f64::from(i == 0), 0.0)));
    let d1 = AffineField::constant(CVector::from_fn(2, |i, _| C64::new(f64::from(i == 1), 0.0)));

    let spec = ModelSpec::custom(AlgebraSpec::parse("abelian:2").unwrap(), &[d0, d1], None).unwrap();
    let json = serde_json::to_string(&spec).unwrap();
    println!("spec as JSON ({} bytes): {}...", json.len(), &json[..72]);
    let parsed: ModelSpec = serde_json::from_str(&json).unwrap();
    let model = build_model(&parsed).unwrap();
    println!(
        "built: ambient dim {}, measured bracket sign {:+}",
        model.ambient_dim(),
        model.sign_convention()
    );

    // Flat model: curvature vanishes identically.
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let z = random_points(&mut rng, 2, 1, 0.5, 2.0).pop().unwrap();
    let h = hcf::forms::HermitianForm::from_diagonal(&[1.0, 3.0]);
    let theta = hcf::geometry::theta_brackets(&model, &h, &z).unwrap();
    println!("theta at a random point: frobenius norm {:.3e}", theta.norm());

    // A rotation field does NOT commute with the translations, so the same
    // algebra with these fields is rejected with the failing pair named.
    let rot = AffineField::linear(CMatrix::from_fn(2, 2, |i, j| {
        C64::new(0.0, if i == 0 && j == 1 { -1.0 } else if i == 1 && j == 0 { 1.0 } else { 0.0 })
    }));
    let bad = ModelSpec::custom(AlgebraSpec::parse("abelian:2").unwrap(), &[d0_clone(), rot], None)
        .unwrap();
    match build_model(&bad) {
        Err(GeometryError::BracketMismatch { alpha, beta, residual, .. }) => println!(
            "rejected as expected: fields {alpha} and {beta} disagree with the table (residual {residual:.2})"
        ),
        other => println!("unexpected: {other:?}"),
    }
}

fn d0_clone() -> AffineField {
    AffineField::constant(CVector::from_fn(2, |i, _| C64::new(f64::from(i == 0), 0.0)))
}
