use gmre_core::linalg::{eigh, Matrix, C64};
use gmre_core::solver::SolveConfig;
use gmre_core::tfim::{
    ground_state, sweep, three_site_rdm, Boundary, ChainConfig, Measures, SweepSpec,
};

/// `-Σ (X_i X_{i+1} + h Z_i)` built entry by entry; site 0 is the most
/// significant bit and a set bit means `Z = -1`.
fn reference_hamiltonian(n: usize, h: f64, periodic: bool) -> Matrix {
    let dim = 1 << n;
    let bit = |s: usize, i: usize| (s >> (n - 1 - i)) & 1;
    let bonds = if periodic { n } else { n - 1 };
    Matrix::from_fn(dim, dim, |r, c| {
        let mut v = 0.0;
        if r == c {
            for i in 0..n {
                v -= h * if bit(r, i) == 0 { 1.0 } else { -1.0 };
            }
        }
        for i in 0..bonds {
            let j = (i + 1) % n;
            let flip = (1 << (n - 1 - i)) | (1 << (n - 1 - j));
            if r ^ c == flip {
                v -= 1.0;
            }
        }
        C64::new(v, 0.0)
    })
}

#[test]
fn energies_match_dense_diagonalisation() {
    for h in [0.5, 1.0, 1.5] {
        let dense = eigh(&reference_hamiltonian(8, h, true)).min_value();
        let gs = ground_state(&ChainConfig::new(8, h, Boundary::Periodic).unwrap()).unwrap();
        assert!((gs.energy - dense).abs() < 1e-10, "h={h}: {} vs {dense}", gs.energy);
        let open = eigh(&reference_hamiltonian(8, h, false)).min_value();
        let gs = ground_state(&ChainConfig::new(8, h, Boundary::Open).unwrap()).unwrap();
        assert!((gs.energy - open).abs() < 1e-10);
    }
}

#[test]
fn limiting_fields() {
    let gs = ground_state(&ChainConfig::new(8, 0.0, Boundary::Periodic).unwrap()).unwrap();
    assert!((gs.energy + 8.0).abs() < 1e-10);
    let h = 10.0;
    let gs = ground_state(&ChainConfig::new(8, h, Boundary::Periodic).unwrap()).unwrap();
    let approx = -8.0 * h - 8.0 / (4.0 * h);
    assert!(((gs.energy - approx) / approx).abs() < 0.01);
}

#[test]
fn rdm_of_simple_chain_states() {
    let n = 6;
    let zero = vec![C64::new(0.0, 0.0); 1 << n];
    let mut product = zero.clone();
    product[0] = C64::new(1.0, 0.0);
    let rdm = three_site_rdm(&product, n, [2, 3, 4], Boundary::Periodic).unwrap();
    assert!((rdm.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);

    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut cat = zero;
    cat[0] = C64::new(s, 0.0);
    cat[(1 << n) - 1] = C64::new(s, 0.0);
    let rdm = three_site_rdm(&cat, n, [5, 0, 1], Boundary::Periodic).unwrap();
    // Tracing out sites kills the coherence between |000⟩ and |111⟩.
    let mut want = Matrix::zeros(8, 8);
    want[(0, 0)] = C64::new(0.5, 0.0);
    want[(7, 7)] = C64::new(0.5, 0.0);
    assert!((rdm.matrix() - &want).max_abs() < 1e-14);

    assert!(three_site_rdm(&product, n, [0, 2, 3], Boundary::Periodic).is_err());
    assert!(three_site_rdm(&product, n, [5, 0, 1], Boundary::Open).is_err());
}

#[test]
fn critical_rdm_is_a_translation_invariant_even_state() {
    let chain = ChainConfig::new(10, 1.0, Boundary::Periodic).unwrap();
    let gs = ground_state(&chain).unwrap();
    let first = three_site_rdm(&gs.amplitudes, 10, [0, 1, 2], Boundary::Periodic).unwrap();
    assert!((first.matrix().trace_re() - 1.0).abs() < 1e-12);
    assert!(eigh(first.matrix()).min_value() >= -1e-12);
    for start in 1..10 {
        let sites = [start, (start + 1) % 10, (start + 2) % 10];
        let other = three_site_rdm(&gs.amplitudes, 10, sites, Boundary::Periodic).unwrap();
        assert!((other.matrix() - first.matrix()).max_abs() < 1e-10, "start {start}");
    }
    // Entries linking opposite Z-parity are absent.
    for a in 0..8usize {
        for b in 0..8usize {
            if (a.count_ones() + b.count_ones()) % 2 == 1 {
                assert!(first.matrix()[(a, b)].norm() < 1e-10);
            }
        }
    }
}

fn gmre_peak(n: usize, grid: &[f64]) -> f64 {
    let spec = SweepSpec {
        h_values: grid.to_vec(),
        sites: None,
        measures: Measures { gmre: true, log_gmn: false },
    };
    let template = ChainConfig::new(n, 1.0, Boundary::Periodic).unwrap();
    let rows = sweep(&spec, &template, &SolveConfig::default()).unwrap();
    rows.iter()
        .map(|r| (r.h, r.gmre.clone().unwrap().unwrap().value))
        .fold((0.0, f64::NEG_INFINITY), |best, (h, v)| if v > best.1 { (h, v) } else { best })
        .0
}

#[test]
fn peak_location_is_stable_across_sizes() {
    let grid: Vec<f64> = (8..=18).map(|i| i as f64 / 10.0).collect();
    let p10 = gmre_peak(10, &grid);
    let p12 = gmre_peak(12, &grid);
    assert!((p10 - p12).abs() <= 0.2 + 1e-9, "n=10 peak {p10}, n=12 peak {p12}");
}

#[test]
fn sweep_rows_follow_input_order_and_record_failures() {
    let spec = SweepSpec {
        h_values: vec![1.5, 0.5],
        sites: Some([0, 2, 4]),
        measures: Measures::default(),
    };
    let template = ChainConfig::new(8, 1.0, Boundary::Periodic).unwrap();
    let rows = sweep(&spec, &template, &SolveConfig::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.h).collect::<Vec<_>>(), vec![1.5, 0.5]);
    assert!(rows.iter().all(|r| r.energy.is_err() && matches!(r.gmre, Some(Err(_)))));
    let bad = SweepSpec { h_values: vec![], ..spec };
    assert!(sweep(&bad, &template, &SolveConfig::default()).is_err());
}
