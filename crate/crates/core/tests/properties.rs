use adwlab_core::analysis::{fit_decay, log_grid, max_reg_identity};
use adwlab_core::exp_poly::ExpPoly;
use adwlab_core::modal::{build_u_chain, solve_damped_mode};
use adwlab_core::profiles::recursion_residual;
use adwlab_core::series::TruncatedSeries;
use adwlab_core::spectral::{apply_spectral_function, sobolev_norm, Mode, ModalVector, SpectralMeasure};
use adwlab_core::verify;
use num_complex::Complex64;
use proptest::prelude::*;

fn measure_and_vector() -> impl Strategy<Value = (SpectralMeasure, ModalVector)> {
    prop::collection::vec((0.0..10.0f64, 0.01..2.0f64, -3.0..3.0f64), 1..12).prop_map(|rows| {
        let modes = rows.iter().map(|&(lambda, weight, _)| Mode { lambda, weight }).collect();
        let measure = SpectralMeasure::new("random", modes).unwrap();
        let f = ModalVector::new(rows.iter().map(|r| r.2).collect());
        (measure, f)
    })
}

fn exp_poly() -> impl Strategy<Value = ExpPoly> {
    prop::collection::vec((-2.0..2.0f64, 0u32..4, -3.0..0.5f64, -2.0..2.0f64), 1..6).prop_map(|terms| {
        terms.into_iter().fold(ExpPoly::zero(), |acc, (c, p, re, im)| {
            &acc + &ExpPoly::term(Complex64::new(c, 0.0), p, Complex64::new(re, im))
        })
    })
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functional_calculus_is_multiplicative((m, f) in measure_and_vector(), s in 0.0..2.0f64, t in 0.0..3.0f64) {
        let both = apply_spectral_function(&m, &f, |l| (-t * l).exp() * l.powf(s)).unwrap();
        let inner = apply_spectral_function(&m, &f, |l| l.powf(s)).unwrap();
        let composed = apply_spectral_function(&m, &inner, |l| (-t * l).exp()).unwrap();
        for (a, b) in both.coeffs.iter().zip(&composed.coeffs) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn heat_flow_contracts((m, f) in measure_and_vector(), t in 0.0..50.0f64) {
        let g = apply_spectral_function(&m, &f, |l| (-t * l).exp()).unwrap();
        prop_assert!(sobolev_norm(&m, &g, 0.0).unwrap() <= sobolev_norm(&m, &f, 0.0).unwrap() * (1.0 + 1e-15));
    }

    #[test]
    fn measure_json_round_trips((m, _) in measure_and_vector()) {
        let text = m.to_json().unwrap();
        prop_assert_eq!(SpectralMeasure::from_json(&text).unwrap(), m.clone());
        prop_assert_eq!(SpectralMeasure::from_json(&text).unwrap().to_json().unwrap(), text);
    }

    #[test]
    fn integral_matches_antiderivative(e in exp_poly(), t in 0.0..5.0f64) {
        let big_f = e.antiderivative();
        prop_assert!((&big_f.derivative(1) - &e).is_negligible(1e-9 * (1.0 + e.max_abs_coef())));
        let direct = e.definite_integral(t);
        let via = big_f.eval(t) - big_f.eval(0.0);
        prop_assert!(close(direct, via, 1e-8), "{} vs {}", direct, via);
    }

    #[test]
    fn derivative_matches_finite_difference(e in exp_poly(), t in 0.5..4.0f64) {
        let h = 1e-5;
        let fd = (e.eval(t + h) - e.eval(t - h)) / (2.0 * h);
        prop_assert!(close(e.derivative(1).eval(t), fd, 1e-6));
    }

    #[test]
    fn product_evaluates_pointwise(a in exp_poly(), b in exp_poly(), t in 0.0..4.0f64) {
        prop_assert!(close((&a * &b).eval(t), a.eval(t) * b.eval(t), 1e-10));
    }

    #[test]
    fn modal_solutions_are_real_and_exact(lambda in 0.0..20.0f64, a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let sol = solve_damped_mode(lambda, a, b).unwrap();
        prop_assert!(sol.residual_is_zero(1e-10));
        prop_assert!(sol.u.imaginary_defect() <= 1e-12);
        prop_assert!((sol.u.eval_re(0.0) - a).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!((sol.u.derivative(1).eval_re(0.0) - b).abs() <= 1e-10 * (1.0 + b.abs() + a.abs()));
    }

    #[test]
    fn chain_members_solve_their_equations(lambda in 0.05..5.0f64, v0 in -2.0..2.0f64, u1 in -2.0..2.0f64) {
        for sol in build_u_chain(lambda, v0, u1, 3).unwrap() {
            prop_assert!(sol.residual_is_zero(1e-9));
        }
    }

    #[test]
    fn recursion_and_decomposition_hold(lambda in 0.05..5.0f64, u0 in -2.0..2.0f64, u1 in -2.0..2.0f64, m in 0usize..4) {
        let scale = 1.0 + u0.abs() + u1.abs();
        prop_assert!(recursion_residual(m, lambda, u0 + u1, u1).unwrap().is_negligible(1e-10 * scale * (1.0 + lambda).powi(m as i32 + 2)));
        prop_assert!(verify::chain_defect(m, lambda, u0, u1).unwrap() < 1e-8);
        prop_assert!(verify::first_order_defect(lambda, u0, u1).unwrap() < 1e-10);
    }

    #[test]
    fn max_reg_identity_balances((m, f) in measure_and_vector(), n in 0usize..5, t in 0.0..30.0f64) {
        let r = max_reg_identity(&m, &f, n, t).unwrap();
        let norm_sq = sobolev_norm(&m, &f, 0.0).unwrap().powi(2);
        prop_assert!((r.lhs - r.rhs).abs() <= 1e-10 * norm_sq.max(1e-300));
        prop_assert!(r.paper_form_gap >= 0.0);
    }

    #[test]
    fn power_laws_are_recovered(p in 0.2..6.0f64, c in 0.1..10.0f64) {
        let samples: Vec<(f64, f64)> = log_grid(10.0, 1e3, 24).into_iter().map(|t| (t, c * (1.0 + t).powf(-p))).collect();
        let fit = fit_decay(&samples).unwrap();
        prop_assert!((fit.slope + p).abs() < 1e-9);
    }

    #[test]
    fn series_square_root_squares_back(c in prop::collection::vec(-5i64..5, 1..6), order in 1usize..8) {
        let mut vals = vec![1];
        vals.extend(c);
        let s = TruncatedSeries::from_ints(&vals, order);
        let r = s.sqrt().unwrap();
        prop_assert_eq!(r.mul(&r).unwrap(), s.clone());
        prop_assert_eq!(s.mul(&s.reciprocal().unwrap()).unwrap(), TruncatedSeries::from_ints(&[1], order));
    }
}
