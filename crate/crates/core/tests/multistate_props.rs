use gmre_core::linalg::{eigh, trace_norm, Matrix};
use gmre_core::multistate::{
    dephased_ghz, enumerate_bipartitions, fidelity, ghz_state, partial_trace, partial_transpose,
    random_density_matrix, swap_operator, Bipartition, PartyShape,
};
use gmre_core::random::{random_hermitian, Rng64};
use proptest::prelude::*;

fn shapes() -> impl Strategy<Value = PartyShape> {
    prop_oneof![
        Just(PartyShape::qubits(2)),
        Just(PartyShape::qubits(3)),
        Just(PartyShape::new(vec![2, 3]).unwrap()),
        Just(PartyShape::new(vec![3, 2, 2]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity(
        shape in shapes(),
        seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
    ) {
        let mut rng = Rng64::new(seed);
        let x = random_hermitian(shape.total(), &mut rng);
        let cuts = enumerate_bipartitions(shape.parties()).unwrap();
        let m = cuts[pick.index(cuts.len())];
        let t = partial_transpose(&x, &shape, m).unwrap();
        prop_assert!((t.trace_re() - x.trace_re()).abs() < 1e-12);
        prop_assert!(t.max_asymmetry().0 < 1e-14);
        let back = partial_transpose(&t, &shape, m).unwrap();
        prop_assert!((&back - &x).max_abs() < 1e-14);
    }

    #[test]
    fn fidelity_is_symmetric(shape in shapes(), seed in any::<u64>()) {
        let a = random_density_matrix(&shape, seed);
        let b = random_density_matrix(&shape, seed.wrapping_add(1));
        let ab = fidelity(a.matrix(), b.matrix()).unwrap();
        let ba = fidelity(b.matrix(), a.matrix()).unwrap();
        prop_assert!((ab - ba).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&ab));
    }
}

#[test]
fn bipartitions_are_canonical() {
    for k in 2..=6 {
        let cuts = enumerate_bipartitions(k).unwrap();
        assert_eq!(cuts.len(), (1 << (k - 1)) - 1);
        for (i, a) in cuts.iter().enumerate() {
            assert!(a.contains(0));
            let comp = Bipartition::new(&a.complement(), k).unwrap();
            // The complement names the same cut, so it canonicalises to `a`.
            assert_eq!(comp, *a);
            for b in &cuts[i + 1..] {
                assert_ne!(a.block(), b.block());
                assert_ne!(a.block(), b.complement());
            }
        }
    }
}

#[test]
fn fidelity_never_decreases_under_discarding() {
    let shape = PartyShape::qubits(3);
    for seed in 0..50 {
        let a = random_density_matrix(&shape, 2 * seed);
        let b = random_density_matrix(&shape, 2 * seed + 1);
        let full = fidelity(a.matrix(), b.matrix()).unwrap();
        let ra = partial_trace(a.matrix(), &shape, &[2]).unwrap();
        let rb = partial_trace(b.matrix(), &shape, &[2]).unwrap();
        assert!(fidelity(&ra, &rb).unwrap() >= full - 1e-10);
    }
}

#[test]
fn swap_operator_identities() {
    for (d, n) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
        let shape = PartyShape::uniform(d, n).unwrap();
        let ghz = ghz_state(d, n).unwrap();
        for m in enumerate_bipartitions(n).unwrap() {
            let f = swap_operator(&shape, m).unwrap();
            let t = partial_transpose(ghz.matrix(), &shape, m).unwrap();
            assert!((&t.scale(d as f64) - &f).max_abs() < 1e-12);
            let e = eigh(&f);
            assert!((e.max_value() - 1.0).abs() < 1e-12);
            assert!((e.min_value() + 1.0).abs() < 1e-12);
            let f2 = f.matmul(&f);
            assert!((&f2.matmul(&f2) - &f2).max_abs() < 1e-12);
            assert!((f2.trace_re() - (d * d) as f64).abs() < 1e-12);
        }
    }
}

#[test]
fn dephased_ghz_uses_full_budget_on_each_cut() {
    for (d, n) in [(2, 2), (2, 3), (3, 3)] {
        let shape = PartyShape::uniform(d, n).unwrap();
        let dg = dephased_ghz(d, n).unwrap();
        for m in enumerate_bipartitions(n).unwrap() {
            let t = partial_transpose(dg.matrix(), &shape, m).unwrap();
            assert!((trace_norm(&t).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn partial_trace_over_everything_is_the_trace() {
    let shape = PartyShape::new(vec![2, 3]).unwrap();
    let mut rng = Rng64::new(4);
    let x = random_hermitian(6, &mut rng);
    let t = partial_trace(&x, &shape, &[0, 1]).unwrap();
    assert_eq!(t.rows(), 1);
    assert!((t[(0, 0)].re - x.trace_re()).abs() < 1e-12);
    assert_eq!(
        random_density_matrix(&shape, 9).matrix(),
        random_density_matrix(&shape, 9).matrix()
    );
    let _ = Matrix::identity(1);
}
