//! Exponential growth on Borel (upper-triangular) algebras. The diagonal
//! bands are flow-invariant; the strictly upper bands grow like
//! exp(2 f0 (n-1) t) where f0 is the diagonal value.

use hcf::analysis::{classify_growth, GrowthRegime};
use hcf::flow::{borel_band_closed_form, integrate, IntegratorConfig};
use hcf::lie::{AlgebraSpec, LieAlgebra};

fn main() {
    let n = 3;
    let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("borel:3").unwrap()).unwrap();

    // Bands: diagonal f^(0), then one value per superdiagonal band.
    let f0 = [0.5, 1.0, 0.25];
    let exact = borel_band_closed_form(n, &f0).unwrap();
    let h0 = exact.initial_form();

    let cfg = IntegratorConfig {
        t_end: Some(2.0),
        sample_interval: Some(0.01),
        blowup_norm: 1e15, // exp(2t) reaches the default threshold fast
        ..IntegratorConfig::default()
    };
    let traj = integrate(&alg, &h0, &cfg).unwrap();

    println!("   t    top band numeric   closed form");
    for &t in &[0.5, 1.0, 2.0] {
        let s = traj.sample_at_time(t).unwrap();
        // E_{1,3} is the last basis element of borel(3).
        let top = s.form.entry(5, 5).re;
        println!("{t:5.2}  {top:17.10e}  {:17.10e}", exact.band_value(2, t));
    }

    let report = classify_growth(&traj).unwrap();
    match report.regime {
        GrowthRegime::Exponential { rate } => println!(
            "classified exponential, fitted rate {rate:.4} (2 f0 (n-1) = {})",
            exact.top_band_rate()
        ),
        other => println!("unexpected regime {other:?}"),
    }

    // The diagonal itself never moves: brackets of E_{i,i} with E_{j,j}
    // vanish, so those coefficients are constants of motion.
    let last = traj.final_sample();
    println!(
        "diagonal band at t = {:.1}: {:.12} (started at {})",
        last.t,
        last.form.entry(0, 0).re,
        f0[0]
    );
}
