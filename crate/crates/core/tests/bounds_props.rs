use gmre_core::bounds::{
    ghz_fidelity_lower_bound, one_shot_bound, renyi_lower_bound_check, renyi_one_shot_bound,
    DEFAULT_ALPHA_GRID,
};
use gmre_core::entropy::binary_entropy;
use gmre_core::multistate::{ghz_state, random_density_matrix, DensityMatrix, PartyShape};
use gmre_core::solver::{gmre, SolveConfig};
use proptest::prelude::*;

#[test]
fn reference_values() {
    let b = ghz_fidelity_lower_bound(0.9, 2).unwrap();
    assert!((b.exact - 0.53101).abs() < 1e-5);
    assert!((b.relaxed - 0.43101).abs() < 1e-5);
    let b = ghz_fidelity_lower_bound(1.0, 2).unwrap();
    assert!((b.exact - 1.0).abs() < 1e-12 && (b.relaxed - 1.0).abs() < 1e-12);
    assert!(ghz_fidelity_lower_bound(0.4, 2).is_err());
    let edge = ghz_fidelity_lower_bound(1.0 / 3.0, 3).unwrap();
    assert!(edge.exact.abs() < 1e-12 && edge.relaxed <= edge.exact);

    assert!((one_shot_bound(1.0, 0.1).unwrap() - 1.63221).abs() < 1e-5);
    assert_eq!(one_shot_bound(0.7, 0.0).unwrap(), 0.7);
    assert!(one_shot_bound(1.0, 1.0).is_err());
    // Tight on GHZ with no error allowance.
    assert_eq!(one_shot_bound(2f64.log2(), 0.0).unwrap(), 1.0);
}

#[test]
fn ghz_renyi_one_shot_candidate() {
    let ghz = ghz_state(2, 3).unwrap();
    let out = renyi_one_shot_bound(&ghz, 0.1, &[2.0], &SolveConfig::default()).unwrap();
    assert!((out.value - 1.30400).abs() < 1e-3, "{}", out.value);
    let grid = renyi_one_shot_bound(&ghz, 0.1, &[1.5, 2.0], &SolveConfig::default()).unwrap();
    assert!(grid.points.iter().all(|p| p.candidate.unwrap() >= grid.value));
}

#[test]
fn zero_error_grid_bound_dominates_gmre() {
    let rho = random_density_matrix(&PartyShape::qubits(2), 12);
    let cfg = SolveConfig::default();
    let base = gmre(&rho, &cfg).unwrap().value;
    let out = renyi_one_shot_bound(&rho, 0.0, &DEFAULT_ALPHA_GRID, &cfg).unwrap();
    assert!(out.value >= base - 1e-3);
}

#[test]
fn renyi_lower_bound_harness() {
    let cfg = SolveConfig::default();
    let ghz = ghz_state(2, 3).unwrap();
    for alpha in [1.1, 2.0] {
        let check = renyi_lower_bound_check(&ghz, alpha, None, 2, &cfg).unwrap();
        assert!((check.fidelity - 1.0).abs() < 1e-12);
        assert!(check.holds);
    }
    for seed in 0..3 {
        let rho = random_density_matrix(&PartyShape::qubits(3), 300 + seed);
        assert!(renyi_lower_bound_check(&rho, 2.0, None, 2, &cfg).unwrap().holds);
    }
    // Small fidelity: evaluated, and the logarithm term makes it hold.
    let mixed = DensityMatrix::maximally_mixed(PartyShape::qubits(3));
    let check = renyi_lower_bound_check(&mixed, 2.0, None, 2, &cfg).unwrap();
    assert!((check.fidelity - 0.125).abs() < 1e-12);
    assert!(check.holds);
}

proptest! {
    #[test]
    fn one_shot_bound_is_nondecreasing_in_epsilon(r in 0.0f64..3.0, e1 in 0.0f64..0.99, e2 in 0.0f64..0.99) {
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(one_shot_bound(r, lo).unwrap() <= one_shot_bound(r, hi).unwrap() + 1e-12);
        prop_assert!(one_shot_bound(r, lo).unwrap() >= r - 1e-12);
    }

    #[test]
    fn relaxed_fidelity_bound_never_exceeds_exact(f in 0.5f64..=1.0, d in 2usize..6) {
        let f = f.max(1.0 / d as f64);
        let b = ghz_fidelity_lower_bound(f, d).unwrap();
        prop_assert!(b.relaxed <= b.exact + 1e-12);
        let relaxed = f * (d as f64).log2() - binary_entropy(f).unwrap();
        prop_assert!((b.relaxed - relaxed).abs() < 1e-12);
    }
}
