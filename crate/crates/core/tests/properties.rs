use proptest::prelude::*;

use qeigen::dd::DoubleDouble;
use qeigen::lambda::{lambda_batch, lambda_eval};
use qeigen::operators::{apply_d, eigen_residual};
use qeigen::params::{casimir_eigenvalue, eigenvalue, ulp_distance, ParamSet, SolutionKind};
use qeigen::recurrence::{three_term_residual, Family};
use qeigen::structrep::StructuredEigenfunction;

fn k(i: u8) -> SolutionKind {
    SolutionKind::new(i).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalue_forms_agree(mu in -40i32..40, nu in -40i32..40, j in -200i64..200) {
        let p = ParamSet::new(mu as f64, nu as f64).unwrap();
        prop_assert!(ulp_distance(eigenvalue(&p, j), casimir_eigenvalue(&p, j)) <= 4);
    }

    #[test]
    fn ic1_classification(mu in -3i32..8, nu in -3i32..8) {
        let p = ParamSet::new(mu as f64, nu as f64).unwrap();
        let want = mu >= nu && nu >= -1 && (mu - nu) % 2 == 0 && !(mu == -1 && nu == -1);
        prop_assert_eq!(p.ic1, want);
        prop_assert_eq!(p.ic2, mu >= 1 && mu % 2 == 1);
    }

    #[test]
    fn eigen_equation_holds(mu in -0.9f64..6.0, nu in -0.9f64..4.0, i in 1u8..=2, j in 0i64..6, x in 0.2f64..8.0) {
        let p = ParamSet::new(mu, nu).unwrap();
        let r = eigen_residual(k(i), &p, j, &[x]).unwrap();
        prop_assert!(r <= 1e-9, "residual {:e}", r);
    }

    #[test]
    fn operator_is_symmetric_in_parameters(mu in -0.9f64..6.0, nu in -0.9f64..4.0, j in 0i64..4, x in 0.3f64..6.0) {
        let p = ParamSet::new(mu, nu).unwrap();
        let q = ParamSet::new(nu, mu).unwrap();
        let f = StructuredEigenfunction::build(k(2), &p, j).unwrap().func;
        let (a, b) = (apply_d(&p, &f).unwrap(), apply_d(&q, &f).unwrap());
        let (va, sa) = a.eval_dd_scaled(x).unwrap();
        let vb = b.eval_dd(x).unwrap();
        prop_assert!((va - vb).to_f64().abs() <= 1e-13 * sa.max(1e-300));
    }

    #[test]
    fn three_term_relation(mu in -0.9f64..6.0, nu in -0.9f64..4.0, i in 1u8..=2, j in 0i64..6, x in 0.2f64..8.0) {
        let p = ParamSet::new(mu, nu).unwrap();
        let fam = Family::new(k(i), &p, j + 1).unwrap();
        prop_assert!(three_term_residual(&fam, j, x).unwrap() <= 1e-10);
    }

    #[test]
    fn first_kind_is_even_on_odd_nu(mu in 0u8..4, nu in 0u8..3, j in 0i64..5, x in 0.1f64..6.0) {
        let p = ParamSet::new((2 * mu + 1) as f64, (2 * nu) as f64 - 1.0).unwrap();
        let f = StructuredEigenfunction::build(k(1), &p, j).unwrap();
        let (a, b) = (f.evaluate(x).unwrap(), f.evaluate(-x).unwrap());
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-300));
    }

    #[test]
    fn json_round_trip_is_bitwise(mu in -0.9f64..6.0, nu in -0.9f64..4.0, i in 1u8..=2, j in 0i64..6) {
        let p = ParamSet::new(mu, nu).unwrap();
        let f = StructuredEigenfunction::build(k(i), &p, j).unwrap();
        let g = StructuredEigenfunction::from_json_str(&f.to_json_string()).unwrap();
        prop_assert_eq!(&f, &g);
        prop_assert_eq!(f.evaluate(1.3).unwrap().to_bits(), g.evaluate(1.3).unwrap().to_bits());
    }

    #[test]
    fn batch_equals_pointwise(mu in 0.1f64..5.0, nu in -0.9f64..3.0, i in 1u8..=2, x in 0.2f64..10.0) {
        let p = ParamSet::new(mu, nu).unwrap();
        let rows = lambda_batch(k(i), &p, 3, &[x]).unwrap();
        for (j, row) in rows.iter().enumerate() {
            prop_assert_eq!(row[0].to_bits(), lambda_eval(k(i), j as i64, &p, x).unwrap().to_bits());
        }
    }

    #[test]
    fn double_double_sum_recovers_small_part(a in -1e6f64..1e6, b in -1e-6f64..1e-6) {
        let s = DoubleDouble::from_f64(a) + b;
        prop_assert_eq!((s - a).to_f64(), b);
    }

    #[test]
    fn double_double_division_inverts(a in 0.1f64..1e3, b in 0.1f64..1e3) {
        let q = DoubleDouble::from_f64(a) / b;
        let back = q * b - a;
        prop_assert!(back.to_f64().abs() <= 1e-30 * a);
    }
}
