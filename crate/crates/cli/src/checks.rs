//! Seeded property suites behind `gmre check`.

use gmre_core::entropy::{classical_rel_entropy, quantum_rel_entropy, sandwiched_renyi};
use gmre_core::feasible::{
    assemble, jordan_hahn, random_feasible_point, t_membership, BipartitionSet, TSetPoint,
};
use gmre_core::linalg::{eigh, Matrix, C64};
use gmre_core::monotone::{apply_selective, random_local_instrument};
use gmre_core::multistate::{
    embed_local, ghz_state, partial_trace_channel, random_density_matrix, DensityMatrix,
    KrausChannel,
};
use gmre_core::random::{ginibre, random_density, random_psd, Rng64};
use gmre_core::solver::{gmre, SolveConfig};
use gmre_core::PartyShape;
use rayon::prelude::*;

/// Allowed excess of `Σ_x p_x R(ρ_x)` over `R(ρ)`.
pub const MONOTONICITY_SLACK: f64 = 2e-3;
pub const DIRECT_SUM_TOL: f64 = 1e-8;
pub const DATA_PROCESSING_SLACK: f64 = 1e-8;
pub const RENYI_SLACK: f64 = 1e-9;
pub const GHZ_OVERLAP_SLACK: f64 = 1e-9;
pub const ASSEMBLED_TRACE_SLACK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} {}/{} checks passed",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.checks - self.failures.len(),
            self.checks
        )
    }
}

pub const SUITES: [&str; 3] = ["monotonicity", "entropy", "feasible"];

/// Runs a suite by name.
pub fn run_suite(name: &str, seed: u64, trials: usize) -> Option<SuiteReport> {
    match name {
        "monotonicity" => Some(monotonicity_suite(seed, trials)),
        "entropy" => Some(entropy_suite(seed, trials)),
        "feasible" => Some(feasible_suite(seed, trials)),
        _ => None,
    }
}

/// Channel `X ↦ Tr_E[V X V^†]` for a random isometry `V` into `d_out · env`.
pub fn random_channel(d_in: usize, d_out: usize, env: usize, rng: &mut Rng64) -> KrausChannel {
    let g = ginibre(d_out * env, d_in, rng);
    // V = G (G^† G)^{-1/2}.
    let gram = g.adjoint_mul(&g);
    let e = eigh(&gram);
    let v = g.matmul(&e.map(|l| 1.0 / l.sqrt()));
    let ops = (0..env)
        .map(|k| Matrix::from_fn(d_out, d_in, |a, b| v[(a * env + k, b)]))
        .collect();
    KrausChannel::new(ops).expect("blocks share one shape")
}

/// Complete dephasing of `party` in the computational basis.
pub fn dephasing_channel(shape: &PartyShape, party: usize) -> KrausChannel {
    let d = shape.dims()[party];
    let ops = (0..d)
        .map(|i| {
            let mut p = Matrix::zeros(d, d);
            p[(i, i)] = C64::new(1.0, 0.0);
            embed_local(shape, party, &p).expect("party in range")
        })
        .collect();
    KrausChannel::new(ops).expect("projectors share one shape")
}

fn block_diagonal(weights: &[f64], blocks: &[Matrix]) -> Matrix {
    let d = blocks[0].rows();
    let n = d * blocks.len();
    let mut out = Matrix::zeros(n, n);
    for (x, (w, b)) in weights.iter().zip(blocks).enumerate() {
        for r in 0..d {
            for c in 0..d {
                out[(x * d + r, x * d + c)] = b[(r, c)].scale(*w);
            }
        }
    }
    out
}

fn random_distribution(n: usize, rng: &mut Rng64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.uniform()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// A classical-quantum pair `(Σ p_x |x⟩⟨x| ⊗ ω_x, Σ q_x |x⟩⟨x| ⊗ τ_x)` with
/// its parts.
pub struct CqPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub omega: Vec<Matrix>,
    pub tau: Vec<Matrix>,
}

impl CqPair {
    pub fn random(outcomes: usize, dim: usize, rng: &mut Rng64) -> Self {
        Self {
            p: random_distribution(outcomes, rng),
            q: random_distribution(outcomes, rng),
            omega: (0..outcomes).map(|_| random_density(dim, dim, rng)).collect(),
            tau: (0..outcomes).map(|_| random_density(dim, dim, rng)).collect(),
        }
    }

    pub fn joint(&self) -> (Matrix, Matrix) {
        (
            block_diagonal(&self.p, &self.omega),
            block_diagonal(&self.q, &self.tau),
        )
    }
}

/// Direct-sum equality and Rényi direct-sum inequality on `trials`
/// classical-quantum pairs, then data processing on `trials` triples.
pub fn entropy_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("entropy");
    let mut rng = Rng64::new(seed);
    for t in 0..trials {
        let cq = CqPair::random(2 + t % 3, 2 + t % 2, &mut rng);
        let (w, s) = cq.joint();
        let classical = classical_rel_entropy(&cq.p, &cq.q).expect("valid distributions");
        let joint = quantum_rel_entropy(&w, &s).expect("valid pair");
        let parts: f64 = (0..cq.p.len())
            .map(|x| cq.p[x] * quantum_rel_entropy(&cq.omega[x], &cq.tau[x]).expect("valid pair"))
            .sum();
        rep.record((joint - classical - parts).abs() <= DIRECT_SUM_TOL, || {
            format!("direct sum trial {t}: {joint} vs {}", classical + parts)
        });
        for alpha in [1.5, 2.0] {
            let joint = sandwiched_renyi(&w, &s, alpha).expect("valid pair");
            let parts: f64 = (0..cq.p.len())
                .map(|x| {
                    cq.p[x] * sandwiched_renyi(&cq.omega[x], &cq.tau[x], alpha).expect("valid pair")
                })
                .sum();
            rep.record(joint >= classical + parts - RENYI_SLACK, || {
                format!("Renyi direct sum trial {t}, alpha {alpha}: {joint} < {}", classical + parts)
            });
        }
    }
    let shape = PartyShape::qubits(2);
    for t in 0..trials {
        let rho = random_density(4, 4, &mut rng);
        let sigma = random_density(4, 4, &mut rng);
        let (name, ch) = match t % 3 {
            0 => ("partial trace", partial_trace_channel(&shape, &[1]).expect("valid party")),
            1 => ("dephasing", dephasing_channel(&shape, t % 2)),
            _ => ("random channel", random_channel(4, 3, 2, &mut rng)),
        };
        let (nr, ns) = (ch.apply(&rho), ch.apply(&sigma));
        let before = quantum_rel_entropy(&rho, &sigma).expect("valid pair");
        let after = quantum_rel_entropy(&nr, &ns).expect("valid pair");
        rep.record(before >= after - DATA_PROCESSING_SLACK, || {
            format!("data processing trial {t} ({name}): {before} < {after}")
        });
        for alpha in [0.7, 1.5, 2.0] {
            let before = sandwiched_renyi(&rho, &sigma, alpha).expect("valid pair");
            let after = sandwiched_renyi(&nr, &ns, alpha).expect("valid pair");
            rep.record(before >= after - DATA_PROCESSING_SLACK, || {
                format!("Renyi data processing trial {t} ({name}), alpha {alpha}: {before} < {after}")
            });
        }
    }
    rep
}

/// A random three-qubit state with GHZ weight in `[0.2, 0.9]`.
pub fn monotonicity_state(seed: u64) -> DensityMatrix {
    let shape = PartyShape::qubits(3);
    let mut rng = Rng64::new(seed ^ 0x5eed_0000);
    let w = 0.2 + 0.7 * rng.uniform();
    let ghz = ghz_state(2, 3).expect("valid GHZ parameters");
    ghz.mix(&random_density_matrix(&shape, seed), w)
        .expect("shapes agree")
}

/// Outcome of one selective-operation trial.
#[derive(Clone, Debug)]
pub struct MonotonicityTrial {
    pub seed: u64,
    pub party: usize,
    pub before: f64,
    pub after: f64,
}

impl MonotonicityTrial {
    pub fn holds(&self) -> bool {
        self.after <= self.before + MONOTONICITY_SLACK
    }
}

pub fn monotonicity_trial(seed: u64, cfg: &SolveConfig) -> gmre_core::Result<MonotonicityTrial> {
    let rho = monotonicity_state(seed);
    let party = (seed % 3) as usize;
    let op = random_local_instrument(rho.shape(), party, seed)?;
    let before = gmre(&rho, cfg)?.value;
    let mut after = 0.0;
    for out in apply_selective(&op, &rho)? {
        after += out.probability * gmre(&out.state, cfg)?.value;
    }
    Ok(MonotonicityTrial {
        seed,
        party,
        before,
        after,
    })
}

pub fn monotonicity_suite(seed: u64, trials: usize) -> SuiteReport {
    let cfg = SolveConfig::default();
    let results: Vec<_> = (0..trials as u64)
        .into_par_iter()
        .map(|t| monotonicity_trial(seed.wrapping_mul(1000).wrapping_add(t), &cfg))
        .collect();
    let mut rep = SuiteReport::new("monotonicity");
    for r in results {
        match r {
            Ok(t) => rep.record(t.holds(), || {
                format!(
                    "seed {}: average after measurement {} exceeds {} before",
                    t.seed, t.after, t.before
                )
            }),
            Err(e) => rep.record(false, || format!("solver error: {e}")),
        }
    }
    rep
}

/// `P, N ⪰ 0` with `T(τ̃) = P - N` for a positive `τ̃`, padded by a common
/// positive part so the split is not the minimal one.
fn padded_split(bset: &BipartitionSet, rng: &mut Rng64) -> (Vec<Matrix>, Vec<Matrix>, Vec<Matrix>) {
    let n = bset.dim();
    let mut tau = Vec::new();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for m in 0..bset.len() {
        let t = random_psd(n, rng).scale(rng.uniform());
        let (p, q) = jordan_hahn(&bset.transpose(m, &t));
        let pad = random_psd(n, rng).scale(0.1 * rng.uniform());
        tau.push(t);
        plus.push(&p + &pad);
        minus.push(&q + &pad);
    }
    let total: f64 = plus
        .iter()
        .chain(&minus)
        .map(|x| x.trace_re())
        .sum();
    for x in tau.iter_mut().chain(plus.iter_mut()).chain(minus.iter_mut()) {
        x.scale_mut(1.0 / total);
    }
    (tau, plus, minus)
}

/// GHZ overlap and trace of assembled points, and both directions of the
/// split characterisation of the feasible set.
pub fn feasible_suite(seed: u64, trials: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("feasible");
    let mut rng = Rng64::new(seed);
    for t in 0..trials {
        let (d, k) = [(2, 2), (2, 3), (3, 2)][t % 3];
        let shape = PartyShape::uniform(d, k).expect("valid shape");
        let bset = BipartitionSet::new(&shape);
        let pt = random_feasible_point(&bset, &mut rng);
        let sigma = assemble(&pt).expect("well-formed point");
        let ghz = ghz_state(d, k).expect("valid GHZ parameters");
        let overlap = ghz.matrix().inner_re(&sigma);
        rep.record(overlap <= 1.0 / d as f64 + GHZ_OVERLAP_SLACK, || {
            format!("trial {t}: GHZ overlap {overlap} above 1/{d}")
        });
        let tr = sigma.trace_re();
        rep.record(tr <= 1.0 + ASSEMBLED_TRACE_SLACK, || {
            format!("trial {t}: assembled trace {tr}")
        });

        // Positive blocks within budget have feasible Jordan-Hahn splits.
        let from_blocks =
            TSetPoint::from_blocks(&bset, pt.tau.clone()).expect("blocks match the shape");
        let forward = t_membership(&from_blocks, gmre_core::feasible::FEAS_TOL)
            .map(|r| r.feasible)
            .unwrap_or(false);
        rep.record(forward, || format!("trial {t}: Jordan-Hahn split infeasible"));

        // Any feasible split bounds the trace norms of the blocks.
        let (tau, plus, minus) = padded_split(&bset, &mut rng);
        let split = TSetPoint {
            shape: shape.clone(),
            cuts: bset.cuts().to_vec(),
            tau: tau.clone(),
            plus,
            minus,
        };
        let split_ok = t_membership(&split, gmre_core::feasible::FEAS_TOL)
            .map(|r| r.feasible)
            .unwrap_or(false);
        let norms: f64 = tau.iter().enumerate().map(|(m, x)| bset.pt_norm(m, x)).sum();
        rep.record(split_ok && norms <= 1.0 + gmre_core::feasible::FEAS_TOL, || {
            format!("trial {t}: split point gives norm sum {norms}")
        });
    }
    rep
}
