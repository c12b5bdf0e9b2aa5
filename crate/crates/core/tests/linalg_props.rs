use gmre_core::linalg::{
    eigh, log_gradient, matrix_function, psd_project, trace_norm, Matrix, EIGEN_FLOOR,
};
use gmre_core::random::{random_density, random_hermitian, random_psd, Rng64};
use proptest::prelude::*;

fn dist(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigh_reconstructs_and_is_unitary(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = Rng64::new(seed);
        let h = random_hermitian(n, &mut rng);
        let e = eigh(&h);
        prop_assert!(dist(&e.reconstruct(), &h) < 1e-11 * (1.0 + h.frobenius_norm()));
        let u = &e.vectors;
        prop_assert!(dist(&u.adjoint_mul(u), &Matrix::identity(n)) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_norm_triangle_inequality(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = Rng64::new(seed);
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let lhs = trace_norm(&(&a + &b)).unwrap();
        prop_assert!(lhs <= trace_norm(&a).unwrap() + trace_norm(&b).unwrap() + 1e-12);
        prop_assert!(trace_norm(&a).unwrap() + 1e-12 >= a.trace_re().abs());
    }

    #[test]
    fn psd_projection_is_nearest(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = Rng64::new(seed);
        let h = random_hermitian(n, &mut rng);
        let p = psd_project(&h);
        prop_assert!(eigh(&p).min_value() >= -1e-12);
        prop_assert!(dist(&psd_project(&p), &p) < 1e-12);
        let other = random_psd(n, &mut rng);
        prop_assert!(dist(&h, &p) <= dist(&h, &other) + 1e-12);
        // Variational form: the residual makes an obtuse angle with the cone.
        prop_assert!((&h - &p).inner_re(&(&other - &p)) <= 1e-8);
    }

    #[test]
    fn log_gradient_matches_finite_difference(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(n, n, &mut rng);
        // Keep the spectrum of tau away from zero so the difference quotient is accurate.
        let mut tau = random_density(n, n, &mut rng).scale(0.5);
        tau.axpy(0.5 / n as f64, &Matrix::identity(n));
        let dir = random_hermitian(n, &mut rng);
        let f = |t: &Matrix| {
            let log = matrix_function(t, f64::log2, EIGEN_FLOOR).unwrap();
            rho.inner_re(&log)
        };
        let h = 1e-6;
        let mut up = tau.clone();
        up.axpy(h, &dir);
        let mut down = tau.clone();
        down.axpy(-h, &dir);
        let fd = (f(&up) - f(&down)) / (2.0 * h);
        let analytic = log_gradient(&tau, &rho).matrix.inner_re(&dir);
        prop_assert!((fd - analytic).abs() < 1e-5 * (1.0 + analytic.abs()), "{fd} vs {analytic}");
    }
}
