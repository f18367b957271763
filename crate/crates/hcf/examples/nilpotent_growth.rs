//! Polynomial growth on strictly upper-triangular algebras: band-constant
//! initial data evolves band by band, with exact polynomial solutions.

use hcf::analysis::{classify_growth, GrowthRegime};
use hcf::flow::{integrate, nilpotent_band_closed_form, IntegratorConfig};
use hcf::lie::{AlgebraSpec, LieAlgebra};

fn main() {
    let n = 4;
    let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("strict_upper:4").unwrap()).unwrap();

    // One value per band m = 1..n-1; every E_{i,i+m} coefficient starts there.
    let f0 = [1.0, 0.5, 0.25];
    let exact = nilpotent_band_closed_form(n, &f0).unwrap();
    let h0 = exact.initial_form();

    let cfg = IntegratorConfig {
        t_end: Some(100.0),
        sample_interval: Some(0.5),
        ..IntegratorConfig::default()
    };
    let traj = integrate(&alg, &h0, &cfg).unwrap();

    // Band values at a few times, numeric vs closed form. Band m is a
    // polynomial of degree m - 1, so the top band dominates: sup ~ t^{n-2}.
    println!("   t      band2 numeric    band2 exact     band3 numeric    band3 exact");
    for &t in &[1.0, 10.0, 100.0] {
        let s = traj.sample_at_time(t).unwrap();
        // E_{1,3} sits at index 3, E_{1,4} at index 5 (band-major order).
        let b2 = s.form.entry(3, 3).re;
        let b3 = s.form.entry(5, 5).re;
        println!(
            "{t:6.1}  {b2:15.8e} {:15.8e}  {b3:15.8e} {:15.8e}",
            exact.band_value(2, t),
            exact.band_value(3, t)
        );
    }

    let report = classify_growth(&traj).unwrap();
    match report.regime {
        GrowthRegime::Polynomial { degree } => {
            println!(
                "classified polynomial, fitted degree {degree:.3} (top band has degree {})",
                exact.top_band_degree()
            );
        }
        other => println!("unexpected regime {other:?}"),
    }
    println!("fit R^2 = {:.5} over t in [{:.1}, {:.1}]",
        report.fit_quality, report.window.0, report.window.1);
}
