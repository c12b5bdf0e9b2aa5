use gmre_core::entropy::{
    binary_entropy, binary_rel_entropy_profile, classical_rel_entropy, quantum_entropy,
    quantum_rel_entropy, sandwiched_renyi, second_argument_minimizer,
};
use gmre_core::linalg::{Matrix, C64};
use gmre_core::multistate::KrausChannel;
use gmre_core::random::{haar_unitary, random_density, Rng64};
use proptest::prelude::*;

/// Channel `d_in -> d_out` from the first `d_in` columns of a Haar unitary,
/// read as a Stinespring isometry with environment dimension `k`.
fn random_channel(d_in: usize, d_out: usize, k: usize, rng: &mut Rng64) -> KrausChannel {
    let u = haar_unitary(d_out * k, rng);
    let ops = (0..k)
        .map(|e| Matrix::from_fn(d_out, d_in, |i, j| u[(i * k + e, j)]))
        .collect();
    KrausChannel::new(ops).unwrap()
}

fn full_rank(n: usize, rng: &mut Rng64) -> Matrix {
    let mut m = random_density(n, n, rng).scale(0.9);
    m.axpy(0.1 / n as f64, &Matrix::identity(n));
    m
}

fn direct_sum(blocks: &[Matrix]) -> Matrix {
    let n: usize = blocks.iter().map(Matrix::rows).sum();
    let mut out = Matrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(off + i, off + j)] = b[(i, j)];
            }
        }
        off += b.rows();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn relative_entropy_contracts_under_channels(seed in any::<u64>(), d_in in 2usize..5, d_out in 2usize..5) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(d_in, d_in, &mut rng);
        let sigma = full_rank(d_in, &mut rng);
        let ch = random_channel(d_in, d_out, 3, &mut rng);
        let before = quantum_rel_entropy(&rho, &sigma).unwrap();
        let after = quantum_rel_entropy(&ch.apply(&rho), &ch.apply(&sigma)).unwrap();
        prop_assert!(after <= before + 1e-8, "{after} > {before}");
        prop_assert!(before >= -1e-10);
    }

    #[test]
    fn renyi_contracts_under_channels(seed in any::<u64>(), alpha in 1.01f64..3.0) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(3, 3, &mut rng);
        let sigma = full_rank(3, &mut rng);
        let ch = random_channel(3, 2, 2, &mut rng);
        let before = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
        let after = sandwiched_renyi(&ch.apply(&rho), &ch.apply(&sigma), alpha).unwrap();
        prop_assert!(after <= before + 1e-8);
    }

    #[test]
    fn direct_sum_splits_the_divergence(seed in any::<u64>(), p in 0.05f64..0.95) {
        let mut rng = Rng64::new(seed);
        let (r0, r1) = (random_density(2, 2, &mut rng), random_density(3, 3, &mut rng));
        let (s0, s1) = (full_rank(2, &mut rng), full_rank(3, &mut rng));
        let q = 0.05 + 0.9 * rng.uniform();
        let rho = direct_sum(&[r0.scale(p), r1.scale(1.0 - p)]);
        let sigma = direct_sum(&[s0.scale(q), s1.scale(1.0 - q)]);
        let lhs = quantum_rel_entropy(&rho, &sigma).unwrap();
        let rhs = p * quantum_rel_entropy(&r0, &s0).unwrap()
            + (1.0 - p) * quantum_rel_entropy(&r1, &s1).unwrap()
            + classical_rel_entropy(&[p, 1.0 - p], &[q, 1.0 - q]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn renyi_is_nondecreasing_in_alpha(seed in any::<u64>()) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(4, 4, &mut rng);
        let sigma = full_rank(4, &mut rng);
        let mut prev = quantum_rel_entropy(&rho, &sigma).unwrap();
        for alpha in [1.001, 1.1, 1.5, 2.0, 3.0, 5.0] {
            let v = sandwiched_renyi(&rho, &sigma, alpha).unwrap();
            prop_assert!(v >= prev - 1e-9, "alpha {alpha}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn renyi_approaches_umegaki_divergence(seed in any::<u64>()) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(3, 3, &mut rng);
        let sigma = full_rank(3, &mut rng);
        let d = quantum_rel_entropy(&rho, &sigma).unwrap();
        let r = sandwiched_renyi(&rho, &sigma, 1.0001).unwrap();
        prop_assert!((r - d).abs() < 1e-2);
    }

    #[test]
    fn subnormalized_reference_keeps_divergence_nonnegative(seed in any::<u64>(), s in 0.1f64..1.0) {
        let mut rng = Rng64::new(seed);
        let rho = random_density(3, 3, &mut rng);
        let sigma = full_rank(3, &mut rng).scale(s);
        prop_assert!(quantum_rel_entropy(&rho, &sigma).unwrap() >= -s.log2() - 1e-9);
    }

    #[test]
    fn binary_profile_is_minimised_at_the_reference_ratio(
        r0 in 0.01f64..1.0, r1 in 0.01f64..1.0, p in 0.0f64..=1.0,
    ) {
        let star = binary_rel_entropy_profile(p, r0, r1).unwrap().p_star;
        let at = |x: f64| binary_rel_entropy_profile(x, r0, r1).unwrap().value;
        prop_assert!(at(star) <= at(p) + 1e-12);
        // Monotone on each side of the minimiser.
        let (lo, hi) = if p < star { (p, star) } else { (star, p) };
        let mid = 0.5 * (lo + hi);
        if p < star {
            prop_assert!(at(lo) >= at(mid) - 1e-12);
        } else {
            prop_assert!(at(hi) >= at(mid) - 1e-12);
        }
    }

    #[test]
    fn second_argument_minimizer_is_proportional(p in 0.01f64..0.99, s in 0.05f64..1.0) {
        let r = second_argument_minimizer(p, s).unwrap();
        let f = |x: f64| classical_rel_entropy(&[p, 1.0 - p], &[x, s - x]).unwrap();
        for t in [0.5, 0.9, 1.1, 1.5] {
            let x = (r * t).min(s * 0.999);
            prop_assert!(f(r) <= f(x) + 1e-12);
        }
        prop_assert!((f(r) + s.log2()).abs() < 1e-12);
    }
}

#[test]
fn reference_values() {
    assert!((binary_entropy(0.1).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-12);
    let rho = Matrix::diag(&[0.5, 0.5]);
    assert!((quantum_entropy(&rho) - 1.0).abs() < 1e-12);
    let psi = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let pure = Matrix::outer(&psi, &psi);
    assert!(quantum_entropy(&pure).abs() < 1e-12);
    assert!((quantum_rel_entropy(&pure, &rho).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(quantum_rel_entropy(&rho, &pure).unwrap(), f64::INFINITY);
    assert!(sandwiched_renyi(&rho, &rho, 1.0).is_err());
}
