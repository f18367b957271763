//! Randomized invariants of the sharp operation and the flow. Each property
//! states something the math guarantees for *every* admissible input, so a
//! single counterexample is a bug, not noise.

use hcf::analysis::estimate_blowup_time;
use hcf::flow::{integrate, IntegratorConfig};
use hcf::forms::{
    positivity_default, pushforward, random_hermitian, random_pd, sharp, sharp_square,
    HermitianForm, PositivityStatus,
};
use hcf::lie::{AlgebraSpec, Homomorphism, LieAlgebra};
use hcf::CMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cx(re: f64) -> hcf::C64 {
    hcf::C64::new(re, 0.0)
}

fn alg(spec: &str) -> LieAlgebra {
    LieAlgebra::from_spec(&AlgebraSpec::parse(spec).unwrap()).unwrap()
}

fn family() -> impl Strategy<Value = LieAlgebra> {
    prop_oneof![
        Just(alg("su2c")),
        Just(alg("strict_upper:3")),
        Just(alg("strict_upper:4")),
        Just(alg("borel:2")),
        Just(alg("heisenberg3")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// h # k = k # h: the structure constants enter antisymmetrically twice.
    #[test]
    fn sharp_is_symmetric(a in family(), seed in 0u64..1 << 20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, a.dim());
        let k = random_hermitian(&mut rng, a.dim());
        let hk = sharp(&a, &h, &k).unwrap();
        let kh = sharp(&a, &k, &h).unwrap();
        prop_assert!((&hk - &kh).frobenius_norm() <= 1e-12 * hk.frobenius_norm().max(1.0));
    }

    /// Sharp is real-bilinear: (x h1 + y h2) # k matches the expansion.
    #[test]
    fn sharp_is_bilinear(a in family(), seed in 0u64..1 << 20, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = a.dim();
        let h1 = random_hermitian(&mut rng, d);
        let h2 = random_hermitian(&mut rng, d);
        let k = random_hermitian(&mut rng, d);
        let combo = HermitianForm::from_matrix(h1.matrix() * cx(x) + h2.matrix() * cx(y));
        let lhs = sharp(&a, &combo, &k).unwrap();
        let s1 = sharp(&a, &h1, &k).unwrap();
        let s2 = sharp(&a, &h2, &k).unwrap();
        let rhs = HermitianForm::from_matrix(s1.matrix() * cx(x) + s2.matrix() * cx(y));
        let scale = lhs.frobenius_norm().max(rhs.frobenius_norm()).max(1.0);
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-11 * scale);
    }

    /// The sharp square of a positive semidefinite form is again PSD.
    #[test]
    fn sharp_square_preserves_positivity(a in family(), seed in 0u64..1 << 20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_pd(&mut rng, a.dim(), 1.0);
        let sq = sharp_square(&a, &h).unwrap();
        let report = positivity_default(&sq);
        prop_assert!(report.status != PositivityStatus::Indefinite,
            "min eigenvalue {:.3e}", report.min_eigenvalue);
    }

    /// Mixed sharp of commuting positive forms is PSD (k = polynomial in h).
    #[test]
    fn sharp_of_commuting_pair_is_psd(a in family(), seed in 0u64..1 << 20, c in 0.1f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_pd(&mut rng, a.dim(), 1.0);
        let k = HermitianForm::from_matrix(h.matrix() * h.matrix() + h.matrix() * cx(c));
        let hk = sharp(&a, &h, &k).unwrap();
        let report = positivity_default(&hk);
        prop_assert!(report.status != PositivityStatus::Indefinite,
            "min eigenvalue {:.3e}", report.min_eigenvalue);
    }

    /// Pushing a block-diagonal form off a direct sum commutes with sharp.
    #[test]
    fn sharp_is_natural_under_projections(seed in 0u64..1 << 20) {
        let sum = alg("direct_sum(su2c,strict_upper:3)");
        let su2 = alg("su2c");
        let n3 = alg("strict_upper:3");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h1 = random_pd(&mut rng, 3, 1.0);
        let h2 = random_pd(&mut rng, 3, 1.0);
        let mut m = CMatrix::zeros(6, 6);
        m.view_mut((0, 0), (3, 3)).copy_from(h1.matrix());
        m.view_mut((3, 3), (3, 3)).copy_from(h2.matrix());
        let h = HermitianForm::from_matrix(m);
        let sq = sharp_square(&sum, &h).unwrap();

        for (proj, comp, part) in [
            (Homomorphism::first_projection(6, 3), &su2, &h1),
            (Homomorphism::second_projection(6, 3), &n3, &h2),
        ] {
            let lhs = pushforward(&proj, &sq).unwrap();
            let rhs = sharp_square(comp, &pushforward(&proj, &h).unwrap()).unwrap();
            prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-12 * rhs.frobenius_norm().max(1.0));
            prop_assert!((&pushforward(&proj, &h).unwrap() - part).frobenius_norm() < 1e-14);
        }
    }

    /// Every eigenvalue-squared difference is a constant of the su2c
    /// diagonal flow: d(l_i^2 - l_j^2)/dt = 2 l_1 l_2 l_3 - 2 l_1 l_2 l_3.
    #[test]
    fn su2_squared_eigenvalue_differences_are_conserved(
        l1 in 0.3f64..2.0, l2 in 0.3f64..2.0, l3 in 0.3f64..2.0,
    ) {
        let a = alg("su2c");
        let h0 = HermitianForm::from_diagonal(&[l1, l2, l3]);
        // Conservation is checked in absolute terms, so stop the run while
        // the squares still carry the required digits in f64.
        let cfg = IntegratorConfig { blowup_norm: 1e3, ..IntegratorConfig::default() };
        let traj = integrate(&a, &h0, &cfg).unwrap();
        let c0 = l3 * l3 - l1 * l1;
        let scale = 1.0f64.max(h0.sup_norm().powi(2));
        for s in &traj.samples {
            let v3 = s.form.entry(2, 2).re;
            let v1 = s.form.entry(0, 0).re;
            prop_assert!(((v3 * v3 - v1 * v1) - c0).abs() <= 1e-7 * scale,
                "drift {:.3e} at t = {:.4}", (v3 * v3 - v1 * v1) - c0, s.t);
        }
    }

    /// eps I <= h0 <= L I squeezes the blow-up time: 1/L <= t* <= 1/eps.
    #[test]
    fn su2_blowup_time_bounded_by_extremal_rays(seed in 0u64..1 << 20) {
        let a = alg("su2c");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h0 = random_pd(&mut rng, 3, 1.0);
        let traj = integrate(&a, &h0, &IntegratorConfig::default()).unwrap();
        let t_star = estimate_blowup_time(&traj).unwrap();
        let lo = 1.0 / h0.max_eigenvalue();
        let hi = 1.0 / h0.min_eigenvalue();
        prop_assert!(t_star >= lo * 0.999 && t_star <= hi * 1.001,
            "t* = {t_star:.4} outside [{lo:.4}, {hi:.4}]");
    }
}

#[test]
fn custom_algebra_validation_rejects_jacobi_violations() {
    // A plausible-looking table that fails Jacobi must be rejected with the
    // offending triple named; the valid table on the same support builds.
        let bad = LieAlgebra::from_brackets(
        3,
        vec!["x".into(), "y".into(), "z".into()],
        &[(0, 1, 2, cx(1.0)), (0, 2, 0, cx(1.0)), (1, 2, 1, cx(-1.0)), (0, 1, 0, cx(1.0))],
    );
    assert!(bad.is_err(), "expected Jacobi failure, got {bad:?}");

    let good = LieAlgebra::from_brackets(
        3,
        vec!["x".into(), "y".into(), "z".into()],
        &[(0, 1, 2, cx(1.0))],
    );
    assert!(good.is_ok());
}
