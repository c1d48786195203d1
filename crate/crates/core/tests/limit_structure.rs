use std::f64::consts::PI;

use deltamass::catalog::{builtin, DEFAULT_SEED};
use deltamass::limitop::{
    apply_limit_resolvent, blocks, classify, counted, eigenvector_basis, limit_eigenvalues_below,
    limit_spectrum, limit_spectrum_csv, merge_block_spectra, operator_residual, root_vector,
    second_chain_obstruction, theta_factor, JORDAN_TOL,
};
use deltamass::slsolve::{eigenfunction, eigenfunction_at, eigenvalues_below};
use deltamass::{Curve, Kind, ProblemSpec, Triple, C64};

fn spec(name: &str) -> ProblemSpec {
    builtin(name, DEFAULT_SEED).unwrap()
}

#[test]
fn spectrum_is_the_union_of_block_spectra() {
    for name in [
        "dirichlet-symmetric",
        "generic-random",
        "jordan-left",
        "neumann-trivial",
    ] {
        let s = spec(name);
        let bl = blocks(&s);
        let cut = 120.0;
        let direct = merge_block_spectra(
            &eigenvalues_below(&bl.aa, cut).unwrap(),
            &eigenvalues_below(&bl.b, cut).unwrap(),
            &eigenvalues_below(&bl.ab, cut).unwrap(),
        );
        let got = limit_eigenvalues_below(&s, cut).unwrap();
        assert_eq!(counted(&got), counted(&direct), "{name}");
        for d in &got {
            let flags = [d.in_aa, d.in_b, d.in_ab].iter().filter(|&&f| f).count();
            assert_eq!(flags, d.alg_mult);
        }
    }
}

#[test]
fn generic_spectrum_is_simple() {
    let got = limit_eigenvalues_below(&spec("generic-random"), 200.0).unwrap();
    assert!(got
        .iter()
        .all(|d| d.alg_mult == 1 && d.kind == Kind::Simple));
}

#[test]
fn jordan_entries_of_the_catalog() {
    for (name, lam) in [
        ("jordan-left", PI * PI / 4.0),
        ("dirichlet-asymmetric", PI * PI / 4.0),
    ] {
        let list = limit_spectrum(&spec(name), 4).unwrap();
        let d = list.iter().find(|d| (d.lambda - lam).abs() < 1e-8).unwrap();
        assert_eq!(d.kind, Kind::DoubleJordan, "{name}");
        assert_eq!(d.basis.len(), 2);
    }
}

#[test]
fn classification_table() {
    let expect =
        |aa: bool, b: bool, ab: bool| match (aa as u8 + b as u8 + ab as u8, aa && ab && !b, b) {
            (1, _, _) => Kind::Simple,
            (2, true, _) => Kind::DoubleDiagonal,
            (2, false, true) => Kind::DoubleJordan,
            (3, _, _) => Kind::TripleJordan,
            _ => unreachable!(),
        };
    for m in 1..8u8 {
        let (aa, b, ab) = (m & 1 != 0, m & 2 != 0, m & 4 != 0);
        let k = classify(aa, b, ab).unwrap();
        assert_eq!(k, expect(aa, b, ab));
        assert_eq!(k.has_root_vector(), b && (aa || ab));
    }
    assert!(classify(false, false, false).is_err());
}

#[test]
fn root_constants_match_block_data() {
    let s = spec("jordan-left");
    let lam = PI * PI / 4.0;
    let bl = blocks(&s);
    let du = eigenfunction_at(&bl.aa, lam, 0.0).unwrap().1;
    let wl = eigenfunction_at(&bl.b, lam, -1.0).unwrap().0;
    let d = limit_spectrum(&s, 3)
        .unwrap()
        .into_iter()
        .find(|d| d.kind == Kind::DoubleJordan)
        .unwrap();
    let rv = root_vector(&s, &d).unwrap();
    assert!((rv.c0 * wl * du - 1.0).abs() < 1e-9);
    assert!(rv.jordan_residual <= JORDAN_TOL);
    // Reversing the middle mode reverses c0: the product with w(-1) is fixed.
    assert!(((-rv.c0) * (-wl) * du - 1.0).abs() < 1e-9);

    let m = spec("dirichlet-asymmetric");
    let bl = blocks(&m);
    let dv = eigenfunction_at(&bl.ab, lam, 0.0).unwrap().1;
    let wr = eigenfunction_at(&bl.b, lam, 1.0).unwrap().0;
    let d = limit_spectrum(&m, 3)
        .unwrap()
        .into_iter()
        .find(|d| d.kind == Kind::DoubleJordan)
        .unwrap();
    let rv = root_vector(&m, &d).unwrap();
    assert!((rv.c0 * wr * dv + 1.0).abs() < 1e-9);
    assert!(rv.jordan_residual <= JORDAN_TOL);
}

#[test]
fn triple_chains_and_obstruction() {
    let s = spec("dirichlet-symmetric");
    for d in limit_spectrum(&s, 9)
        .unwrap()
        .iter()
        .filter(|d| d.alg_mult == 3)
    {
        assert_eq!(d.kind, Kind::TripleJordan);
        let rv = root_vector(&s, d).unwrap();
        assert!(
            rv.jordan_residual <= JORDAN_TOL,
            "{}: {}",
            d.lambda,
            rv.jordan_residual
        );
        assert!(second_chain_obstruction(&s, d).unwrap() > 0.5);
    }
}

#[test]
fn double_diagonal_has_orthogonal_eigenvectors() {
    let s = ProblemSpec::constant(-1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 2.0);
    let d = limit_spectrum(&s, 4)
        .unwrap()
        .into_iter()
        .find(|d| (d.lambda - PI * PI).abs() < 1e-8)
        .unwrap();
    assert_eq!(d.kind, Kind::DoubleDiagonal);
    let v = eigenvector_basis(&s, &d).unwrap();
    assert_eq!(v.len(), 2);
    assert!(v[0].inner(&v[1], &s).norm() < 1e-12);
    assert!(root_vector(&s, &d).is_err());
}

#[test]
fn theta_on_the_symmetric_model() {
    let s = spec("dirichlet-symmetric");
    let lam = PI * PI / 4.0;
    let w = eigenfunction(&blocks(&s).b, lam).unwrap().curve;
    let t = theta_factor(&s, lam, &w).unwrap();
    assert!((t.theta - 1.0).abs() < 1e-8, "{t:?}");
    assert!((t.norm_ta_sq - t.norm_tb_sq).abs() < 1e-9);
    let g = theta_factor(&spec("generic-random"), 0.0, &Curve::zero(-1.0, 1.0));
    assert!(g.is_err() || g.unwrap().theta > 0.0);
}

#[test]
fn middle_eigenvector_has_closed_form_outer_parts() {
    let s = spec("dirichlet-symmetric");
    let d = limit_spectrum(&s, 2)
        .unwrap()
        .into_iter()
        .find(|d| d.alg_mult == 1 && d.lambda > 1.0)
        .unwrap();
    let v = &eigenvector_basis(&s, &d).unwrap()[0];
    // Unit triple (cos(pi x / 2), cos(pi (t + 1) / 2), -cos(pi x / 2)) / sqrt(2).
    let c = 1.0 / 2f64.sqrt();
    let sign = v.mid.value(-1.0).re.signum();
    for x in [-0.7, -0.2] {
        assert!((sign * v.a.value(x).re - c * (PI * x / 2.0).cos()).abs() < 1e-8);
    }
    assert!((sign * v.b.value(0.4).re + c * (PI * 0.2).cos()).abs() < 1e-8);
}

#[test]
fn resolvent_blocks_and_identity() {
    let s = spec("dirichlet-symmetric");
    let z = C64::new(0.0, 1.0);
    let f = Triple::new(
        Curve::from_real(s.a, 0.0, |x| (3.0 * x).sin() + x),
        Curve::from_real(-1.0, 1.0, |t| t * t - 0.3),
        Curve::from_real(0.0, s.b, |x| (x - 0.5).exp()),
    );
    let y = apply_limit_resolvent(&s, z, &f).unwrap();
    assert!(operator_residual(&s, z, &y, &f).relative() < 1e-8);
    assert!((y.a.value(0.0) - y.mid.value(-1.0)).norm() < 1e-10);
    assert!((y.b.value(0.0) - y.mid.value(1.0)).norm() < 1e-10);

    let only_a = Triple::new(f.a.clone(), Curve::zero(-1.0, 1.0), Curve::zero(0.0, s.b));
    let y = apply_limit_resolvent(&s, z, &only_a).unwrap();
    assert!(y.mid.value(0.3).norm() == 0.0 && y.b.value(0.5).norm() == 0.0);
    assert!(apply_limit_resolvent(&s, C64::new(PI * PI, 0.0), &f).is_err());
}

#[test]
fn spectrum_table_columns() {
    let csv = limit_spectrum_csv(&limit_spectrum(&spec("dirichlet-symmetric"), 5).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,lambda,mult,in_Aa,in_B,in_Ab,kind");
    assert!(lines[3].starts_with("3,") && lines[3].ends_with(",3,true,true,true,triple_jordan"));
}
