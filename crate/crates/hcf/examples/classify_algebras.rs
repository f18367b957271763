//! Structural classification of the built-in families: nilpotent, solvable,
//! or neither, read off the lower-central and derived series.

use hcf::lie::{classify_algebra, AlgebraKind, AlgebraSpec, LieAlgebra};

fn main() {
    let specs = [
        "abelian:3",
        "heisenberg3",
        "strict_upper:4",
        "strict_upper:5",
        "borel:2",
        "borel:3",
        "su2c",
        "direct_sum(su2c,strict_upper:3)",
    ];

    println!("{:<34} {:<22} {:<18} {}", "algebra", "kind", "lower central", "derived");
    for spec_str in specs {
        let spec = AlgebraSpec::parse(spec_str).unwrap();
        let alg = LieAlgebra::from_spec(&spec).unwrap();
        let class = classify_algebra(&alg);
        let kind = match class.kind {
            AlgebraKind::Nilpotent => "nilpotent",
            AlgebraKind::SolvableNotNilpotent => "solvable (not nilp.)",
            AlgebraKind::NonSolvable => "non-solvable",
        };
        println!(
            "{:<34} {:<22} {:<18} {:?}",
            spec_str,
            kind,
            format!("{:?}", class.lower_central_dims),
            class.derived_dims
        );
    }

    // The derived subalgebra drives the sharp operation's kernel: only
    // bracket directions receive curvature.
    let alg = LieAlgebra::from_spec(&AlgebraSpec::parse("strict_upper:4").unwrap()).unwrap();
    let class = classify_algebra(&alg);
    println!(
        "\nstrict_upper(4): dim [g,g] = {} of {}, so h^# has rank <= {} for every h",
        class.derived_subalgebra.len(),
        alg.dim(),
        class.derived_subalgebra.len()
    );
}
