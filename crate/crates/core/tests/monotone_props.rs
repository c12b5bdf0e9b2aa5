use gmre_core::linalg::{eigh, trace_norm, Matrix, C64};
use gmre_core::monotone::{
    apply_selective, is_selective_ppt, local_projective_measurement, random_local_instrument,
    Branch, SelectiveOperation, SELECTIVE_TOL,
};
use gmre_core::multistate::{
    enumerate_bipartitions, ghz_state, partial_transpose, random_density_matrix, DensityMatrix,
    KrausChannel, PartyShape,
};

fn bell() -> Matrix {
    ghz_state(2, 2).unwrap().into_matrix()
}

/// Mixes `ρ` with the maximally mixed state just enough to make its partial
/// transpose across cut `m` positive.
fn ppt_across(rho: &Matrix, shape: &PartyShape, m: usize) -> Matrix {
    let cut = enumerate_bipartitions(shape.parties()).unwrap()[m];
    let low = eigh(&partial_transpose(rho, shape, cut).unwrap()).min_value();
    let n = shape.total() as f64;
    let t = if low < 0.0 { -low / (1.0 / n - low) } else { 0.0 };
    let mut out = rho.scale(1.0 - t);
    out.axpy(t / n, &Matrix::identity(shape.total()));
    out
}

fn min_pt_eigenvalue(x: &Matrix, shape: &PartyShape, m: usize) -> f64 {
    let cut = enumerate_bipartitions(shape.parties()).unwrap()[m];
    eigh(&partial_transpose(x, shape, cut).unwrap()).min_value()
}

#[test]
fn local_measurement_passes_every_condition() {
    let shape = PartyShape::qubits(3);
    let op = local_projective_measurement(&shape, 1).unwrap();
    assert!(is_selective_ppt(&op, SELECTIVE_TOL).unwrap().passes());
    for seed in 0..5 {
        let op = random_local_instrument(&shape, (seed % 3) as usize, seed).unwrap();
        assert!(is_selective_ppt(&op, SELECTIVE_TOL).unwrap().passes());
    }
}

#[test]
fn preparing_a_transposed_bell_state_is_not_completely_positive() {
    let shape = PartyShape::qubits(2);
    let cut = enumerate_bipartitions(2).unwrap()[0];
    let target = partial_transpose(&bell(), &shape, cut).unwrap();
    let branch = Branch::from_map(4, 4, |x| target.scale_c(x.trace())).unwrap();
    let op = SelectiveOperation::new(shape.clone(), shape, vec![branch]).unwrap();
    let report = is_selective_ppt(&op, SELECTIVE_TOL).unwrap();
    assert!(!report.completely_positive());
    assert!(report.trace_preserving());
}

#[test]
fn preparing_a_bell_state_is_completely_positive_but_not_ppt() {
    let shape = PartyShape::qubits(2);
    let target = bell();
    let branch = Branch::from_map(4, 4, |x| target.scale_c(x.trace())).unwrap();
    let op = SelectiveOperation::new(shape.clone(), shape, vec![branch]).unwrap();
    let report = is_selective_ppt(&op, SELECTIVE_TOL).unwrap();
    assert!(report.completely_positive());
    assert!(!report.ppt_preserving());
    assert!(!report.passes());
}

#[test]
fn identity_and_z_measurement_outcomes() {
    let shape = PartyShape::qubits(3);
    let rho = random_density_matrix(&shape, 2);
    let id = SelectiveOperation::from_kraus(shape.clone(), shape.clone(), &[KrausChannel::identity(8)])
        .unwrap();
    let out = apply_selective(&id, &rho).unwrap();
    assert_eq!(out.len(), 1);
    assert!((out[0].probability - 1.0).abs() < 1e-12);
    assert!((out[0].state.matrix() - rho.matrix()).max_abs() < 1e-12);

    let h = core::f64::consts::FRAC_1_SQRT_2;
    // |+++⟩
    let psi: Vec<C64> = (0..8).map(|_| C64::new(h * h * h, 0.0)).collect();
    let state = DensityMatrix::pure(shape.clone(), &psi).unwrap();
    let out = apply_selective(&local_projective_measurement(&shape, 0).unwrap(), &state).unwrap();
    assert_eq!(out.len(), 2);
    let total: f64 = out.iter().map(|o| o.probability).sum();
    assert!((total - 1.0).abs() < 1e-10);
    for o in &out {
        assert!((o.probability - 0.5).abs() < 1e-12);
    }
}

#[test]
fn zero_probability_branches_are_dropped() {
    let shape = PartyShape::qubits(3);
    let state = DensityMatrix::basis(shape.clone(), &[0, 1, 1]).unwrap();
    let out = apply_selective(&local_projective_measurement(&shape, 0).unwrap(), &state).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].index, 0);
}

#[test]
fn non_trace_preserving_families_are_rejected() {
    let shape = PartyShape::qubits(2);
    let half = KrausChannel::new(vec![Matrix::identity(4).scale(0.5)]);
    // A single Kraus operator I/2 is not trace preserving; construction may
    // refuse it outright, otherwise application must.
    if let Ok(ch) = half {
        let op = SelectiveOperation::from_kraus(shape.clone(), shape.clone(), &[ch]).unwrap();
        let rho = random_density_matrix(&shape, 1);
        assert!(apply_selective(&op, &rho).is_err());
    }
    let branch = Branch::from_map(4, 4, |x| x.scale(0.5)).unwrap();
    let op = SelectiveOperation::new(shape.clone(), shape.clone(), vec![branch]).unwrap();
    assert!(apply_selective(&op, &random_density_matrix(&shape, 1)).is_err());
}

/// Pushes a decomposition `σ = Σ_m r_m σ_m` through each branch.
#[test]
fn ppt_mixtures_stay_ppt_mixtures() {
    let shape = PartyShape::qubits(3);
    for seed in 0..20u64 {
        let op = random_local_instrument(&shape, (seed % 3) as usize, 500 + seed).unwrap();
        let r = [0.5, 0.3, 0.2];
        let parts: Vec<Matrix> = (0..3)
            .map(|m| ppt_across(random_density_matrix(&shape, 40 * seed + m as u64).matrix(), &shape, m))
            .collect();
        let mut sigma = Matrix::zeros(8, 8);
        for (w, p) in r.iter().zip(&parts) {
            sigma.axpy(*w, p);
        }
        let sigma = DensityMatrix::new(shape.clone(), sigma).unwrap();
        for outcome in apply_selective(&op, &sigma).unwrap() {
            let branch = &op.branches()[outcome.index];
            let mut rebuilt = Matrix::zeros(8, 8);
            for (m, (w, p)) in r.iter().zip(&parts).enumerate() {
                let y = branch.apply(p);
                let q = y.trace_re();
                if q <= 1e-12 {
                    continue;
                }
                assert!(min_pt_eigenvalue(&y.scale(1.0 / q), &shape, m) >= -1e-10);
                rebuilt.axpy(w * q / outcome.probability, &y.scale(1.0 / q));
            }
            assert!((&rebuilt - outcome.state.matrix()).max_abs() < 1e-10);
        }
    }
}

#[test]
fn partial_transpose_norms_contract_on_average() {
    let shape = PartyShape::qubits(3);
    let cuts = enumerate_bipartitions(3).unwrap();
    for seed in 0..20u64 {
        let op = random_local_instrument(&shape, (seed % 3) as usize, 900 + seed).unwrap();
        let r = [0.2, 0.5, 0.3];
        let omegas: Vec<Matrix> = (0..3)
            .map(|m| random_density_matrix(&shape, 70 * seed + m as u64).into_matrix())
            .collect();
        let before: f64 = (0..3)
            .map(|m| r[m] * trace_norm(&partial_transpose(&omegas[m], &shape, cuts[m]).unwrap()).unwrap())
            .sum();
        let mut after = 0.0;
        for branch in op.branches() {
            for m in 0..3 {
                let y = branch.apply(&omegas[m]);
                after += r[m] * trace_norm(&partial_transpose(&y, &shape, cuts[m]).unwrap()).unwrap();
            }
        }
        assert!(after <= before + 1e-9, "seed {seed}: {after} > {before}");
    }
}
