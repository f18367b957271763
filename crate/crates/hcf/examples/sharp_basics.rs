//! The sharp operation on Hermitian forms: h^# = (h # h) / 2, its
//! positivity, and the kernel identity ker(h # k) = annihilator of [g, g].

use hcf::analysis::kernel_annihilator_check;
use hcf::forms::{positivity_default, sharp, sharp_square, HermitianForm};
use hcf::lie::{AlgebraSpec, LieAlgebra};

fn main() {
    // On su(2) complexified, # of the identity is the identity: the flow
    // direction at h = I is I itself, so the identity ray is Einstein.
    let su2 = LieAlgebra::from_spec(&AlgebraSpec::parse("su2c").unwrap()).unwrap();
    let id = HermitianForm::identity(3);
    let sq = sharp_square(&su2, &id).unwrap();
    println!("su2c: identity^# = diag{:?}", sq.diagonal());

    // Mixed sharp of two diagonal forms. Entry alpha collects products of
    // the other two eigenvalues through the structure constants.
    let h = HermitianForm::from_diagonal(&[1.0, 2.0, 3.0]);
    let k = HermitianForm::from_diagonal(&[4.0, 5.0, 6.0]);
    let hk = sharp(&su2, &h, &k).unwrap();
    println!("su2c: diag(1,2,3) # diag(4,5,6) = diag{:?}", hk.diagonal());

    // On a nilpotent algebra the sharp square is only positive
    // SEMI-definite: its kernel is exactly the Hermitian-orthogonal
    // complement of the derived subalgebra's coefficient span.
    let n3 = LieAlgebra::from_spec(&AlgebraSpec::parse("strict_upper:3").unwrap()).unwrap();
    let h = HermitianForm::from_diagonal(&[1.0, 2.0, 5.0]);
    let sq = sharp_square(&n3, &h).unwrap();
    let pos = positivity_default(&sq);
    println!(
        "strict_upper(3): h^# eigenvalues {:?}, status {:?}, kernel dim = {}",
        sq.eigenvalues()
            .iter()
            .map(|v| (v * 1e6).round() / 1e6)
            .collect::<Vec<_>>(),
        pos.status,
        pos.kernel_basis.len()
    );

    let report = kernel_annihilator_check(&n3, &h, &h).unwrap();
    println!(
        "kernel dim {} == dim(g) - dim[g,g] = {}; spans agree: {}",
        report.kernel_dim, report.expected_dim, report.spans_agree
    );

    // The same identity on an algebra with full derived subalgebra: the
    // sharp square of a definite form stays definite.
    let report = kernel_annihilator_check(&su2, &h, &h).unwrap();
    println!(
        "su2c: kernel dim {} (derived subalgebra is everything), ok = {}",
        report.kernel_dim, report.ok
    );
}
