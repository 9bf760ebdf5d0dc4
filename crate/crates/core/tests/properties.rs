//! Randomized invariants: parameter-independent identities of the basis, the
//! coefficient tables, and the eigensolver.

use proptest::prelude::*;

use dunkl_spectra::basis::{self, BasisParams};
use dunkl_spectra::coeffs::{self, MixedParams, TParams};
use dunkl_spectra::spectra::{self, OperatorSpec, USpec};
use dunkl_spectra::specfun;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn gamma_ratio_functional_equation(p in 0u32..5000, t in 0.05f64..3.5) {
        let lhs = specfun::gamma_ratio(p, t).unwrap() * (p as f64 + 1.0) / (p as f64 + t);
        let rhs = specfun::gamma_ratio(p + 1, t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }

    #[test]
    fn hermite_parity(sigma in -0.45f64..3.0, k in 0u32..60, x in 0.01f64..4.0) {
        let params = BasisParams::new(sigma, 1.0).unwrap();
        let plus = basis::hermite_p(&params, k, x).unwrap();
        let minus = basis::hermite_p(&params, k, -x).unwrap();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((minus - sign * plus).abs() <= 1e-10 * plus.abs().max(1.0));
    }

    #[test]
    fn c_table_symmetric_with_parity_zeros(
        sigma in 0.3f64..2.5,
        u in 0.1f64..0.9,
        s in 0.5f64..2.0,
    ) {
        prop_assume!(sigma > u - 0.5);
        let m = coeffs::t_matrix_closed(&TParams::new(sigma, u, s).unwrap(), 16).unwrap();
        for k in 0..16 {
            for l in 0..16 {
                if (k + l) % 2 == 1 {
                    prop_assert_eq!(m.get(k, l), 0.0);
                } else {
                    prop_assert!((m.get(k, l) - m.get(l, k)).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn c_scaling_law(sigma in 0.3f64..2.5, u in 0.1f64..0.9, s in 0.5f64..3.0) {
        prop_assume!(sigma > u - 0.5);
        let at_one = coeffs::t_coeff_closed(&TParams::new(sigma, u, 1.0).unwrap(), 6, 4).unwrap();
        let at_s = coeffs::t_coeff_closed(&TParams::new(sigma, u, s).unwrap(), 6, 4).unwrap();
        prop_assert!((at_s - s.powf(u) * at_one).abs() <= 1e-12 * at_s.abs().max(1e-300));
    }

    #[test]
    fn sigma_table_positive_and_monotone(sigma in 0.1f64..2.5, u in 0.05f64..0.95) {
        prop_assume!(sigma > u - 0.5);
        let table = coeffs::sigma_table(sigma, u, 24).unwrap();
        for k in 0..24u32 {
            for l in ((k % 2)..=k).step_by(2) {
                prop_assert!(table.get(k, l) > 0.0);
                if l == 0 {
                    continue;
                }
                // Even pairs sit strictly above their odd predecessor, odd
                // pairs strictly below.
                if k % 2 == 0 {
                    prop_assert!(table.get(k - 1, l - 1) < table.get(k, l));
                } else {
                    prop_assert!(table.get(k, l) < table.get(k - 1, l - 1));
                }
            }
        }
    }

    #[test]
    fn chat_swap_symmetry(
        sigma in 0.2f64..2.0,
        tau in 0.2f64..2.0,
        theta in 0.0f64..1.5,
        k in 0u32..10,
        l in 0u32..10,
    ) {
        prop_assume!((k + l) % 2 == 0);
        let fwd = MixedParams::new(sigma, tau, theta, 1.0).unwrap();
        let bwd = MixedParams::new(tau, sigma, theta, 1.0).unwrap();
        match (coeffs::chat_coeff(&fwd, k, l), coeffs::chat_coeff(&bwd, l, k)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}")
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one side refused: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn chat_index_shift(
        sigma in 0.2f64..2.0,
        tau in 0.2f64..2.0,
        theta in 0.0f64..1.5,
        m in 0u32..6,
        n in 0u32..6,
    ) {
        let low = MixedParams::new(sigma, tau, theta, 1.0).unwrap();
        let high = MixedParams::new(sigma + 1.0, tau + 1.0, theta + 1.0, 1.0).unwrap();
        match (coeffs::chat_coeff(&low, 2 * m + 1, 2 * n + 1), coeffs::chat_coeff(&high, 2 * m, 2 * n)) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}")
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "one side refused: {a:?} vs {b:?}"),
        }
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn jacobi_reconstructs_symmetric_matrices(
        seed in prop::collection::vec(-10.0f64..10.0, 36),
    ) {
        let n = 6;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = seed[i * n + j];
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let decomp = spectra::eigen_sym(&a).unwrap();
        let scale = seed.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for i in 0..n {
            for j in 0..n {
                // A v_j = lambda_j v_j, columns stored as rows of `vectors`.
                let av: f64 = (0..n).map(|t| a[i][t] * decomp.vectors[j][t]).sum();
                let err = av - decomp.values[j] * decomp.vectors[j][i];
                prop_assert!(err.abs() <= 1e-10 * scale, "residual {err} at ({i},{j})");
            }
        }
        for p in 0..n {
            for q in 0..n {
                let dot: f64 =
                    (0..n).map(|t| decomp.vectors[p][t] * decomp.vectors[q][t]).sum();
                let expect = if p == q { 1.0 } else { 0.0 };
                prop_assert!((dot - expect).abs() <= 1e-12);
            }
        }
        for w in decomp.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn ritz_values_decrease_with_order(
        sigma in 0.3f64..2.0,
        u in 0.1f64..0.9,
        xi in 0.1f64..2.0,
    ) {
        prop_assume!(sigma > u - 0.5);
        let spec = OperatorSpec::U(USpec::new(sigma, u, 1.0, xi).unwrap());
        let runs = spectra::ritz_spectrum(&spec, &[16, 32]).unwrap();
        for (coarse, fine) in runs[0].eigenvalues.iter().zip(&runs[1].eigenvalues) {
            prop_assert!(*fine <= coarse + 1e-12);
            prop_assert!(*fine > 0.0);
        }
    }

    #[test]
    fn eigenvalues_increase_in_coupling(sigma in 0.3f64..2.0, u in 0.1f64..0.9) {
        prop_assume!(sigma > u - 0.5);
        let mut previous: Option<Vec<f64>> = None;
        for xi in [0.0, 0.5, 1.0] {
            let spec = OperatorSpec::U(USpec::new(sigma, u, 1.0, xi).unwrap());
            let run = spectra::ritz_spectrum(&spec, &[16]).unwrap().pop().unwrap();
            if let Some(prev) = &previous {
                for (lo, hi) in prev.iter().zip(&run.eigenvalues) {
                    prop_assert!(lo < hi);
                }
            }
            previous = Some(run.eigenvalues);
        }
    }
}
