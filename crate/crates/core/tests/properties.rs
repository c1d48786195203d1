use deltamass::coeffs::validate_spec;
use deltamass::convergence::{fit_rate, hausdorff_truncated, projector_gap};
use deltamass::limitop::{classify, merge_block_spectra};
use deltamass::slsolve::eigenvalue_list;
use deltamass::{Bc, Kind, ProblemSpec, SLProblem, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn gram(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.adjoint() * b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_symmetric_metric(
        s1 in prop::collection::vec(0.0..40.0f64, 1..12),
        s2 in prop::collection::vec(0.0..40.0f64, 1..12),
    ) {
        let d12 = hausdorff_truncated(&s1, &s2, 50.0).unwrap();
        let d21 = hausdorff_truncated(&s2, &s1, 50.0).unwrap();
        prop_assert_eq!(d12, d21);
        prop_assert!(d12 >= 0.0);
        prop_assert_eq!(hausdorff_truncated(&s1, &s1, 50.0).unwrap(), 0.0);
    }

    #[test]
    fn projector_gap_lies_in_the_unit_interval(
        re in prop::collection::vec(-1.0..1.0f64, 24),
        im in prop::collection::vec(-1.0..1.0f64, 24),
        k in 1usize..3,
    ) {
        let n = 6;
        let v: Vec<C64> = re.iter().zip(&im).map(|(r, i)| C64::new(*r, *i)).collect();
        let a = DMatrix::from_column_slice(n, k, &v[..n * k]);
        let b = DMatrix::from_column_slice(n, k, &v[12..12 + n * k]);
        let g = projector_gap(&gram(&a, &a), &gram(&a, &b), &gram(&b, &b));
        if let Ok(g) = g {
            prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
        }
        let same = projector_gap(&gram(&a, &a), &gram(&a, &a), &gram(&a, &a));
        if let Ok(g) = same {
            prop_assert!(g < 1e-6);
        }
    }

    #[test]
    fn rate_fit_recovers_power_laws(c in 0.01..10.0f64, p in 0.2..2.0f64) {
        let eps = [0.2, 0.1, 0.05, 0.025, 0.0125];
        let gaps: Vec<f64> = eps.iter().map(|e: &f64| c * e.powf(p)).collect();
        let f = fit_rate(&eps, &gaps).unwrap();
        prop_assert!((f.slope - p).abs() < 1e-9);
    }

    #[test]
    fn merged_multiplicities_follow_the_flags(
        aa in prop::collection::btree_set(1u32..12, 1..5),
        b in prop::collection::btree_set(1u32..12, 1..5),
        ab in prop::collection::btree_set(1u32..12, 1..5),
    ) {
        let f = |s: &std::collections::BTreeSet<u32>| s.iter().map(|&x| x as f64).collect::<Vec<_>>();
        let merged = merge_block_spectra(&f(&aa), &f(&b), &f(&ab));
        let total: usize = merged.iter().map(|d| d.alg_mult).sum();
        prop_assert_eq!(total, aa.len() + b.len() + ab.len());
        for d in &merged {
            prop_assert_eq!(d.kind, classify(d.in_aa, d.in_b, d.in_ab).unwrap());
            prop_assert_eq!(d.kind == Kind::DoubleDiagonal, d.in_aa && d.in_ab && !d.in_b);
        }
        prop_assert!(merged.windows(2).all(|w| w[1].lambda > w[0].lambda));
    }

    #[test]
    fn weight_positivity_decides_validity(r in -1.0..2.0f64, h in -1.0..2.0f64) {
        let s = ProblemSpec::constant(-1.0, 1.0, 0.0, 0.0, 0.0, r, h);
        prop_assert_eq!(validate_spec(&s).is_valid(), r > 1e-12 && h > 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_the_weight_scales_the_spectrum(c in 0.3..3.0f64, theta in 0.0..3.0f64) {
        let base = SLProblem::constant((0.0, 1.3), 0.0, 1.0, Bc::from_angle(theta), Bc::dirichlet());
        let scaled = SLProblem::constant((0.0, 1.3), 0.0, c, Bc::from_angle(theta), Bc::dirichlet());
        let l0 = eigenvalue_list(&base, 4).unwrap();
        let l1 = eigenvalue_list(&scaled, 4).unwrap();
        for (a, b) in l0.iter().zip(&l1) {
            prop_assert!((a - c * b).abs() <= 1e-8 * a.abs().max(1.0));
        }
    }
}
