use framekz::hilbert::*;
use framekz_testkit as tk;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn gram_is_hermitian_psd(seed in any::<u64>(), d in 1usize..12, n in 1usize..24) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let vs: Vec<HVector> = (0..n).map(|_| tk::gaussian_vector(&mut rng, d)).collect();
        let g = gram(&vs).unwrap();
        let scale = max_abs(&g).max(1.0);
        prop_assert!(hermitian_asymmetry(&g).unwrap() <= tol.eps_herm * scale);
        let min = hermitian_eigenvalues(&g).unwrap()[0];
        prop_assert!(min >= -tol.eps_eig * scale, "min eigenvalue {min}");
    }

    #[test]
    fn unit_lower_inverse_is_exact(seed in any::<u64>(), n in 1usize..=64) {
        let mut rng = tk::rng(seed);
        let mut l = CMatrix::identity(n, n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            }
        }
        let inv = invert_unit_lower(&l).unwrap();
        prop_assert!(max_abs(&(&l * &inv - CMatrix::identity(n, n))) <= 1e-12);
        for i in 0..n {
            prop_assert_eq!(inv[(i, i)], Complex64::new(1.0, 0.0));
            for j in i + 1..n {
                prop_assert_eq!(inv[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn operator_norm_dominates_monte_carlo(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..10) {
        let mut rng = tk::rng(seed);
        let a = tk::gaussian_matrix(&mut rng, rows, cols);
        let norm = operator_norm(&a);
        let sampled = (0..1000)
            .map(|_| (&a * tk::unit_vector(&mut rng, cols)).norm())
            .fold(0.0, f64::max);
        prop_assert!(sampled <= norm + 1e-6, "sampled {sampled} > norm {norm}");
        // the top eigenvalue of A*A is the squared norm
        let top = *hermitian_eigenvalues(&(a.adjoint() * &a)).unwrap().last().unwrap();
        prop_assert!((top.sqrt() - norm).abs() <= 1e-9 * norm.max(1.0));
    }

    #[test]
    fn projection_implies_contraction(seed in any::<u64>(), d in 1usize..10, r in 0usize..10) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let r = r.min(d);
        let w = tk::isometry(&mut rng, d, r);
        let p = &w * w.adjoint();
        prop_assert!(is_projection(&p, &tol).unwrap());
        prop_assert!(is_contraction(&p, &tol).unwrap());
        // a PSD matrix that is not a contraction is never a projection
        let big = p + CMatrix::identity(d, d).scale(2.0);
        prop_assert!(!is_contraction(&big, &tol).unwrap());
        prop_assert!(!is_projection(&big, &tol).unwrap());
    }

    #[test]
    fn inner_is_sesquilinear(seed in any::<u64>(), d in 1usize..8) {
        let mut rng = tk::rng(seed);
        let u = tk::gaussian_vector(&mut rng, d);
        let v = tk::gaussian_vector(&mut rng, d);
        let c = tk::complex_normal(&mut rng);
        let uv = inner(&u, &v).unwrap();
        prop_assert!((inner(&(&u * c), &v).unwrap() - c * uv).norm() <= 1e-12 * (1.0 + uv.norm() * c.norm()));
        prop_assert!((inner(&u, &(&v * c)).unwrap() - c.conj() * uv).norm() <= 1e-12 * (1.0 + uv.norm() * c.norm()));
        prop_assert!((inner(&v, &u).unwrap() - uv.conj()).norm() <= 1e-12 * (1.0 + uv.norm()));
    }

    #[test]
    fn rank_of_random_family(seed in any::<u64>(), d in 1usize..10, n in 1usize..16) {
        let tol = ToleranceConfig::default();
        let mut rng = tk::rng(seed);
        let vs = tk::unit_sequence(&mut rng, d, n);
        prop_assert_eq!(numerical_rank(&vs, &tol).unwrap(), n.min(d));
        prop_assert_eq!(spans(&vs, d, &tol).unwrap(), n >= d);
    }
}
