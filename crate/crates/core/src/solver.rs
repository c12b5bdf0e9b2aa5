//! Convex solvers for the Rains-type quantities.
//!
//! The relative-entropy problems are solved by an augmented Lagrangian over
//! the positive blocks `τ̃_m`. The coupling `Σ_m ‖T_m(τ̃_m)‖₁ ≤ 1` is moved into
//! a Moreau-envelope penalty `(c/2)·dist²(T(τ̃) + Λ/c, B)` where `B` is the
//! joint trace-norm ball, whose projection is closed form. Each inner problem
//! is a smooth minimisation over the positive cone handled by spectral
//! projected gradient (Barzilai-Borwein steps, monotone Armijo). After every
//! outer step the iterate is repaired (eigenvalue clipping, then rescaling
//! into the budget) so reported values are genuine upper estimates of the
//! infimum.
//!
//! The log-negativity analogue is computed by bisection on the budget with a
//! Dykstra feasibility search whose output is repaired by a congruence that
//! restores `Σ τ̃_m = ρ` exactly.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::entropy::{self, check_renyi_order, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::feasible::{project_trace_norm_ball, t_membership, BipartitionSet, TSetPoint};
use crate::linalg::{
    eigh, log_gradient_from_eig, power_divided_difference, psd_project, EigenDecomposition,
    Matrix, EIGEN_FLOOR,
};
use crate::multistate::DensityMatrix;

/// Solver settings shared by every measure.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveConfig {
    /// Objective-change tolerance, in bits.
    pub value_tol: f64,
    /// Feasibility tolerance for the returned witness.
    pub feas_tol: f64,
    pub max_iter: usize,
    /// Backtracking factor.
    pub armijo_shrink: f64,
    /// Sufficient-decrease constant.
    pub armijo_slope: f64,
    /// Threshold on the gradient-mapping norm.
    pub grad_tol: f64,
    /// Carried into reports; the solvers themselves are deterministic.
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            value_tol: 1e-4,
            feas_tol: 1e-8,
            max_iter: 2000,
            armijo_shrink: 0.5,
            armijo_slope: 1e-4,
            grad_tol: 1e-5,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.value_tol > 0.0
            && self.feas_tol > 0.0
            && self.max_iter > 0
            && self.armijo_shrink > 0.0
            && self.armijo_shrink < 1.0
            && self.armijo_slope > 0.0
            && self.armijo_slope < 1.0
            && self.grad_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Argument("solver settings must be positive (Armijo factors below 1)".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    IterLimit,
    InfeasibleDetect,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::IterLimit => "iter_limit",
            SolveStatus::InfeasibleDetect => "infeasible_detect",
        }
    }
}

impl core::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Objective value in bits.
    pub value: f64,
    pub iterations: usize,
    /// Largest constraint violation of the witness.
    pub final_feasibility: f64,
    pub grad_norm: f64,
    /// An eigenvalue floor was active at the final iterate.
    pub floored: bool,
    pub status: SolveStatus,
    /// Best objective value found so far, recorded after every accepted step
    /// or outer round and starting with the initial point. Nonincreasing.
    pub history: Vec<f64>,
    /// Feasible decomposition attaining `value`.
    pub witness: TSetPoint,
}

impl SolveReport {
    /// `Σ_m τ̃_m` of the witness.
    pub fn tau(&self) -> Matrix {
        crate::feasible::assemble(&self.witness).expect("witness is well formed")
    }
}

/// Smooth objective over a list of Hermitian blocks.
trait Objective {
    fn value(&self, x: &[Matrix]) -> f64;
    /// Value, gradient per block, and whether an eigenvalue floor was hit.
    fn value_grad(&self, x: &[Matrix]) -> (f64, Vec<Matrix>, bool);
}

/// Exact projection onto a closed convex set, up to inner tolerance.
trait Projector {
    fn project(&self, x: &[Matrix]) -> Vec<Matrix>;
}

fn inner(a: &[Matrix], b: &[Matrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner_re(y)).sum()
}

fn diff(a: &[Matrix], b: &[Matrix]) -> Vec<Matrix> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn norm(a: &[Matrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm_sqr()).sum::<f64>().sqrt()
}

struct SpgOutcome {
    x: Vec<Matrix>,
    value: f64,
    iterations: usize,
    grad_norm: f64,
    floored: bool,
    status: SolveStatus,
    history: Vec<f64>,
}

const STALL_WINDOW: usize = 5;
const STEP_MIN: f64 = 1e-10;
const STEP_MAX: f64 = 1e10;

/// Spectral projected gradient with monotone Armijo backtracking.
fn spg(obj: &dyn Objective, proj: &dyn Projector, x0: Vec<Matrix>, cfg: &SolveConfig) -> SpgOutcome {
    let mut x = proj.project(&x0);
    let (mut f, mut g, mut floored) = obj.value_grad(&x);
    let mut history = vec![f];
    let mut step = (1.0 / norm(&g).max(1e-12)).clamp(STEP_MIN, STEP_MAX);
    let mut small_changes = 0usize;
    let mut grad_norm = f64::INFINITY;
    let mut status = SolveStatus::IterLimit;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let trial: Vec<Matrix> = x
            .iter()
            .zip(&g)
            .map(|(xi, gi)| {
                let mut t = xi.clone();
                t.axpy(-step, gi);
                t
            })
            .collect();
        let d = diff(&proj.project(&trial), &x);
        grad_norm = norm(&d) / step;
        let slope = inner(&g, &d);

        if slope >= 0.0 || grad_norm < cfg.grad_tol * 1e-3 {
            // The projected direction no longer descends: stationary to
            // working precision.
            status = SolveStatus::Converged;
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-12 {
            let cand: Vec<Matrix> = x
                .iter()
                .zip(&d)
                .map(|(xi, di)| {
                    let mut c = xi.clone();
                    c.axpy(t, di);
                    c
                })
                .collect();
            let fc = obj.value(&cand);
            if fc.is_finite() && fc <= f + cfg.armijo_slope * t * slope {
                accepted = Some((cand, fc));
                break;
            }
            t *= cfg.armijo_shrink;
        }

        let Some((x_new, f_new)) = accepted else {
            status = if small_changes > 0 {
                SolveStatus::Converged
            } else {
                SolveStatus::IterLimit
            };
            break;
        };

        let (_, g_new, fl) = obj.value_grad(&x_new);
        let s = diff(&x_new, &x);
        let y = diff(&g_new, &g);
        let sy = inner(&s, &y);
        step = if sy > 0.0 {
            (inner(&s, &s) / sy).clamp(STEP_MIN, STEP_MAX)
        } else {
            STEP_MAX.min(step * 10.0)
        };

        let change = f - f_new;
        x = x_new;
        g = g_new;
        f = f_new;
        floored = fl;
        history.push(f);

        if change <= cfg.value_tol * f.abs().max(1.0) * 1e-2 {
            small_changes += 1;
        } else {
            small_changes = 0;
        }
        if small_changes >= STALL_WINDOW && grad_norm < cfg.grad_tol {
            status = SolveStatus::Converged;
            break;
        }
    }

    SpgOutcome {
        x,
        value: f,
        iterations,
        grad_norm,
        floored,
        status,
        history,
    }
}

// ---------------------------------------------------------------------------
// Objectives

/// `D(ρ‖Σ_m x_m)` in bits.
struct RelEntropyObjective<'a> {
    rho: &'a Matrix,
    neg_entropy: f64,
}

impl<'a> RelEntropyObjective<'a> {
    fn new(rho: &'a Matrix) -> Self {
        Self {
            rho,
            neg_entropy: -entropy::quantum_entropy(rho),
        }
    }

    fn eval(&self, eig: &EigenDecomposition) -> f64 {
        if entropy::support_violated(self.rho, eig) {
            return f64::INFINITY;
        }
        self.neg_entropy - entropy::cross_term(self.rho, eig, SUPPORT_TOL)
    }
}

fn block_sum(x: &[Matrix]) -> Matrix {
    let mut s = x[0].clone();
    for b in &x[1..] {
        s += b;
    }
    s
}

impl Objective for RelEntropyObjective<'_> {
    fn value(&self, x: &[Matrix]) -> f64 {
        self.eval(&eigh(&block_sum(x)))
    }

    fn value_grad(&self, x: &[Matrix]) -> (f64, Vec<Matrix>, bool) {
        let eig = eigh(&block_sum(x));
        let v = self.eval(&eig);
        let lg = log_gradient_from_eig(&eig, self.rho, EIGEN_FLOOR);
        let g = lg.matrix.scale(-1.0);
        (v, vec![g; x.len()], lg.floored)
    }
}

/// `D̃_α(ρ‖Σ_m x_m)` in bits, for `α > 1`.
struct RenyiObjective<'a> {
    rho: &'a Matrix,
    rho_sqrt: Matrix,
    alpha: f64,
}

impl<'a> RenyiObjective<'a> {
    fn new(rho: &'a Matrix, alpha: f64) -> Self {
        let rho_sqrt = eigh(rho).map(|l| l.max(0.0).sqrt());
        Self {
            rho,
            rho_sqrt,
            alpha,
        }
    }

    fn gamma(&self) -> f64 {
        (1.0 - self.alpha) / self.alpha
    }

    /// Returns `Q = Tr[W^α]` with `W = ρ^{1/2} τ^γ ρ^{1/2}`, plus the
    /// eigendecomposition of `W` when requested.
    fn q_value(&self, eig: &EigenDecomposition, floor: f64) -> (f64, EigenDecomposition, bool) {
        let gamma = self.gamma();
        let mut floored = false;
        let tg = eig.map(|l| {
            if l < floor {
                floored = true;
            }
            l.max(floor).powf(gamma)
        });
        let mut w = self.rho_sqrt.matmul(&tg.matmul(&self.rho_sqrt));
        w.hermitize();
        let we = eigh(&w);
        let q = we
            .values
            .iter()
            .map(|&l| if l > 0.0 { l.powf(self.alpha) } else { 0.0 })
            .sum();
        (q, we, floored)
    }
}

impl Objective for RenyiObjective<'_> {
    fn value(&self, x: &[Matrix]) -> f64 {
        let eig = eigh(&block_sum(x));
        if entropy::support_violated(self.rho, &eig) {
            return f64::INFINITY;
        }
        let (q, _, _) = self.q_value(&eig, SUPPORT_TOL);
        if q > 0.0 {
            q.log2() / (self.alpha - 1.0)
        } else {
            f64::INFINITY
        }
    }

    fn value_grad(&self, x: &[Matrix]) -> (f64, Vec<Matrix>, bool) {
        let eig = eigh(&block_sum(x));
        let v = self.value(x);
        let (q, we, floored) = self.q_value(&eig, EIGEN_FLOOR);
        let a = self.alpha;
        // X = ρ^{1/2} W^{α-1} ρ^{1/2}; ∇Q is the adjoint Fréchet derivative
        // of τ ↦ τ^γ applied to αX.
        let w_pow = we.map(|l| if l > 0.0 { l.powf(a - 1.0) } else { 0.0 });
        let xm = self.rho_sqrt.matmul(&w_pow.matmul(&self.rho_sqrt));
        let mut xt = eig.to_eigenbasis(&xm);
        let lam: Vec<f64> = eig.values.iter().map(|&l| l.max(EIGEN_FLOOR)).collect();
        let n = lam.len();
        let gamma = self.gamma();
        let scale = a / (q * (a - 1.0) * core::f64::consts::LN_2);
        for i in 0..n {
            for j in 0..n {
                xt[(i, j)] *= power_divided_difference(lam[i], lam[j], gamma) * scale;
            }
        }
        let mut g = eig.from_eigenbasis(&xt);
        g.hermitize();
        (v, vec![g; x.len()], floored)
    }
}

// ---------------------------------------------------------------------------
// Projections

const PROJ_MAX_ITER: usize = 400;
const PROJ_TOL: f64 = 1e-10;

/// Projection onto `T' = {σ ⪰ 0 : ‖T_X σ‖₁ ≤ 1 ∀X}` (a single block).
struct TPrimeProjector<'a> {
    bset: &'a BipartitionSet,
}

impl TPrimeProjector<'_> {
    fn repair(&self, s: Matrix) -> Matrix {
        let s = psd_project(&s);
        let worst = (0..self.bset.len())
            .map(|m| self.bset.pt_norm(m, &s))
            .fold(0.0, f64::max);
        if worst > 1.0 {
            s.scale(1.0 / worst)
        } else {
            s
        }
    }
}

impl Projector for TPrimeProjector<'_> {
    fn project(&self, y0: &[Matrix]) -> Vec<Matrix> {
        let k = self.bset.len();
        let n = self.bset.dim();
        let sets = k + 1;
        let mut x = y0[0].clone();
        let mut corr = vec![Matrix::zeros(n, n); sets];
        for _ in 0..PROJ_MAX_ITER {
            let start = x.clone();
            let mut worst_gap: f64 = 0.0;
            for (i, c) in corr.iter_mut().enumerate() {
                let y = &x + c;
                let p = if i == 0 {
                    psd_project(&y)
                } else {
                    let m = i - 1;
                    let mut t = [self.bset.transpose(m, &y)];
                    project_trace_norm_ball(&mut t, 1.0);
                    self.bset.transpose(m, &t[0])
                };
                *c = &y - &p;
                worst_gap = worst_gap.max((&p - &x).frobenius_norm());
                x = p;
            }
            if (&x - &start).frobenius_norm() <= PROJ_TOL && worst_gap <= PROJ_TOL {
                break;
            }
        }
        vec![self.repair(x)]
    }
}

// ---------------------------------------------------------------------------
// Augmented Lagrangian

/// Makes blocks exactly feasible: clip to the positive cone, then rescale
/// so the trace-norm budget is at most one.
fn repair_blocks(bset: &BipartitionSet, x: &[Matrix]) -> Vec<Matrix> {
    let mut x: Vec<Matrix> = x.iter().map(psd_project).collect();
    let s: f64 = x.iter().enumerate().map(|(m, b)| bset.pt_norm(m, b)).sum();
    if s > 1.0 {
        for b in &mut x {
            b.scale_mut(1.0 / s);
        }
    }
    x
}

/// `f(Σ τ̃_m) + (c/2) dist²(T(τ̃) + Λ/c, B) - ‖Λ‖²/(2c)`, where `B` is the
/// joint trace-norm ball. This is the augmented Lagrangian of the constraint
/// `T(τ̃) ∈ B` with the split parts minimised out.
struct EnvelopeObjective<'a> {
    base: &'a dyn Objective,
    bset: &'a BipartitionSet,
    multipliers: Vec<Matrix>,
    penalty: f64,
}

impl EnvelopeObjective<'_> {
    /// Returns `W - P_B(W)` with `W = T(τ̃) + Λ/c`, blockwise.
    fn excess(&self, x: &[Matrix]) -> Vec<Matrix> {
        let w: Vec<Matrix> = x
            .iter()
            .enumerate()
            .map(|(m, b)| {
                let mut t = self.bset.transpose(m, b);
                t.axpy(1.0 / self.penalty, &self.multipliers[m]);
                t
            })
            .collect();
        let mut p = w.clone();
        project_trace_norm_ball(&mut p, 1.0);
        diff(&w, &p)
    }

    fn envelope(&self, e: &[Matrix]) -> f64 {
        let lam: f64 = self.multipliers.iter().map(|l| l.frobenius_norm_sqr()).sum();
        0.5 * self.penalty * e.iter().map(|x| x.frobenius_norm_sqr()).sum::<f64>()
            - 0.5 * lam / self.penalty
    }
}

impl Objective for EnvelopeObjective<'_> {
    fn value(&self, x: &[Matrix]) -> f64 {
        let f = self.base.value(x);
        if !f.is_finite() {
            return f;
        }
        f + self.envelope(&self.excess(x))
    }

    fn value_grad(&self, x: &[Matrix]) -> (f64, Vec<Matrix>, bool) {
        let (f, g, floored) = self.base.value_grad(x);
        let e = self.excess(x);
        let v = if f.is_finite() { f + self.envelope(&e) } else { f };
        let grad = g
            .iter()
            .enumerate()
            .map(|(m, gm)| {
                let mut t = gm.clone();
                t.axpy(self.penalty, &self.bset.transpose(m, &e[m]));
                t
            })
            .collect();
        (v, grad, floored)
    }
}

struct PsdProjector;

impl Projector for PsdProjector {
    fn project(&self, x: &[Matrix]) -> Vec<Matrix> {
        x.iter().map(psd_project).collect()
    }
}

fn alm_solve(base: &dyn Objective, bset: &BipartitionSet, cfg: &SolveConfig) -> SpgOutcome {
    let k = bset.len();
    let n = bset.dim();
    let mut x = initial_blocks(bset);
    let mut aug = EnvelopeObjective {
        base,
        bset,
        multipliers: vec![Matrix::zeros(n, n); k],
        penalty: ALM_PENALTY0,
    };
    let proj = PsdProjector;
    let mut history = vec![base.value(&x)];
    let mut used = 0;
    let mut prev_residual = f64::INFINITY;
    let mut status = SolveStatus::IterLimit;
    let mut floored = false;
    let mut grad_norm = f64::INFINITY;
    let mut best: Option<(f64, Vec<Matrix>)> = None;
    let mut prev_value = f64::INFINITY;
    let mut steady = 0;

    for _outer in 0..ALM_MAX_OUTER {
        let mut inner_cfg = cfg.clone();
        inner_cfg.max_iter = (cfg.max_iter - used).min(ALM_INNER_MAX);
        if inner_cfg.max_iter == 0 {
            break;
        }
        let out = spg(&aug, &proj, x, &inner_cfg);
        used += out.iterations;
        x = out.x;
        floored = out.floored;
        grad_norm = out.grad_norm;

        let repaired = repair_blocks(bset, &x);
        let value = base.value(&repaired);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, repaired));
        }
        history.push(best.as_ref().map_or(value, |(b, _)| *b));

        let e = aug.excess(&x);
        let c = aug.penalty;
        let mut shift = 0.0;
        for (lm, em) in aug.multipliers.iter_mut().zip(&e) {
            let next = em.scale(c);
            shift += (&next - &*lm).frobenius_norm_sqr();
            *lm = next;
        }
        let residual = shift.sqrt() / c;
        if (value - prev_value).abs() <= ALM_STEADY_FRACTION * cfg.value_tol {
            steady += 1;
        } else {
            steady = 0;
        }
        prev_value = value;
        let settled = residual <= ALM_STEADY_RESIDUAL && steady >= 2;
        if settled || (residual <= ALM_RESIDUAL_TOL && out.status == SolveStatus::Converged) {
            status = SolveStatus::Converged;
            break;
        }
        if residual > 0.25 * prev_residual {
            aug.penalty = (aug.penalty * 4.0).min(ALM_PENALTY_MAX);
        }
        prev_residual = residual;
    }
    let (value, blocks) = best.expect("at least one outer iteration");
    SpgOutcome {
        x: blocks,
        value,
        iterations: used,
        grad_norm,
        floored,
        status,
        history,
    }
}

const ALM_PENALTY0: f64 = 10.0;
const ALM_PENALTY_MAX: f64 = 1e6;
const ALM_MAX_OUTER: usize = 40;
const ALM_INNER_MAX: usize = 150;
const ALM_RESIDUAL_TOL: f64 = 1e-7;
const ALM_STEADY_RESIDUAL: f64 = 1e-5;
const ALM_STEADY_FRACTION: f64 = 0.1;

// ---------------------------------------------------------------------------
// Drivers

fn check_state(rho: &DensityMatrix) -> Result<BipartitionSet> {
    if rho.shape().parties() < 2 {
        return Err(Error::Parties("need at least two parties".into()));
    }
    Ok(BipartitionSet::new(rho.shape()))
}

fn initial_blocks(bset: &BipartitionSet) -> Vec<Matrix> {
    let n = bset.dim();
    let mut x = vec![Matrix::zeros(n, n); bset.len()];
    x[0] = Matrix::identity(n).scale(1.0 / n as f64);
    x
}

fn report_from(out: SpgOutcome, bset: &BipartitionSet, cfg: &SolveConfig) -> Result<SolveReport> {
    let witness = TSetPoint::from_blocks(bset, out.x)?;
    let rep = t_membership(&witness, cfg.feas_tol)?;
    let psd = rep.psd_residuals.iter().copied().fold(0.0, f64::max);
    let final_feasibility = psd.max(rep.budget - 1.0).max(rep.equality_residual).max(0.0);
    Ok(SolveReport {
        value: out.value,
        iterations: out.iterations,
        final_feasibility,
        grad_norm: out.grad_norm,
        floored: out.floored,
        status: out.status,
        history: out.history,
        witness,
    })
}

/// Genuine multipartite Rains entanglement `inf_{τ ∈ T} D(ρ‖τ)`.
pub fn gmre(rho: &DensityMatrix, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let bset = check_state(rho)?;
    let obj = RelEntropyObjective::new(rho.matrix());
    let out = alm_solve(&obj, &bset, cfg);
    report_from(out, &bset, cfg)
}

/// Largest supported Rényi order.
pub const RENYI_MAX_ALPHA: f64 = 2.0;

/// Sandwiched Rényi-Rains quantity `inf_{τ ∈ T} D̃_α(ρ‖τ)` for `α ∈ (1, 2]`.
pub fn renyi_rains(rho: &DensityMatrix, alpha: f64, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    check_renyi_order(alpha)?;
    if !(alpha > 1.0 && alpha <= RENYI_MAX_ALPHA) {
        return Err(Error::Argument(alloc::format!(
            "Renyi order {alpha} outside the supported range (1, 2]"
        )));
    }
    let bset = check_state(rho)?;
    let obj = RenyiObjective::new(rho.matrix(), alpha);
    let out = alm_solve(&obj, &bset, cfg);
    report_from(out, &bset, cfg)
}

/// `min_{σ ∈ T'} D(ρ‖σ)`, an upper bound on [`gmre`]. The witness stores
/// `σ` on the first cut.
pub fn alt_rains(rho: &DensityMatrix, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let bset = check_state(rho)?;
    let obj = RelEntropyObjective::new(rho.matrix());
    let proj = TPrimeProjector { bset: &bset };
    let n = bset.dim();
    let out = spg(&obj, &proj, vec![Matrix::identity(n).scale(1.0 / n as f64)], cfg);
    let sigma = out.x[0].clone();
    let witness = TSetPoint::single(&bset, 0, sigma.clone())?;
    let rep = crate::feasible::tprime_membership(&sigma, bset.shape(), cfg.feas_tol)?;
    let final_feasibility = rep.psd_residuals[0].max(rep.budget - 1.0).max(0.0);
    Ok(SolveReport {
        value: out.value,
        iterations: out.iterations,
        final_feasibility,
        grad_norm: out.grad_norm,
        floored: out.floored,
        status: out.status,
        history: out.history,
        witness,
    })
}

/// `N = (2^{E_N} - 1) / 2`.
pub fn gmn_from_log(e_n: f64) -> Result<f64> {
    if !(e_n >= 0.0) {
        return Err(Error::Argument(alloc::format!(
            "log-negativity must be nonnegative, got {e_n}"
        )));
    }
    Ok((e_n.exp2() - 1.0) / 2.0)
}

/// Bisection resolution in the budget.
pub const GMN_BISECTION_TOL: f64 = 1e-4;
const GMN_INNER_ITER: usize = 600;

/// Exact decomposition of `ρ` together with its certified budget.
struct Decomposition {
    blocks: Vec<Matrix>,
    budget: f64,
}

struct GmnSearch<'a> {
    bset: &'a BipartitionSet,
    rho: &'a Matrix,
    rho_sqrt: Matrix,
}

impl<'a> GmnSearch<'a> {
    fn new(bset: &'a BipartitionSet, rho: &'a Matrix) -> Self {
        Self {
            bset,
            rho,
            rho_sqrt: eigh(rho).map(|l| l.max(0.0).sqrt()),
        }
    }

    fn budget(&self, blocks: &[Matrix]) -> f64 {
        blocks
            .iter()
            .enumerate()
            .map(|(m, b)| self.bset.pt_norm(m, b))
            .sum()
    }

    /// Everything on the cut with the smallest partial-transpose norm.
    fn trivial(&self) -> Decomposition {
        let k = self.bset.len();
        let norms: Vec<f64> = (0..k).map(|m| self.bset.pt_norm(m, self.rho)).collect();
        let best = (0..k)
            .min_by(|&a, &b| norms[a].partial_cmp(&norms[b]).expect("finite norms"))
            .expect("at least one cut");
        let n = self.bset.dim();
        let mut blocks = vec![Matrix::zeros(n, n); k];
        blocks[best] = self.rho.clone();
        Decomposition {
            blocks,
            budget: norms[best],
        }
    }

    /// Maps positive blocks with sum `S ≈ ρ` to positive blocks summing to
    /// `ρ` exactly via `τ̃_m ↦ C τ̃_m C^†`, `C = ρ^{1/2} S^{-1/2}`.
    fn congruence_repair(&self, blocks: Vec<Matrix>) -> Option<Decomposition> {
        let blocks: Vec<Matrix> = blocks.iter().map(psd_project).collect();
        let s = block_sum(&blocks);
        let se = eigh(&s);
        let cutoff = 1e-13 * se.max_value().max(1e-300);
        let s_inv_sqrt = se.map(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
        let c = self.rho_sqrt.matmul(&s_inv_sqrt);
        let cd = c.adjoint();
        let mut out: Vec<Matrix> = blocks
            .iter()
            .map(|b| {
                let mut t = c.matmul(&b.matmul(&cd));
                t.hermitize();
                t
            })
            .collect();
        let residual = (&block_sum(&out) - self.rho).max_abs();
        if residual > 1e-9 {
            return None;
        }
        // Remove the rounding-level mismatch so the sum is exact.
        let fix = (self.rho - &block_sum(&out)).scale(1.0 / out.len() as f64);
        for b in &mut out {
            *b += &fix;
        }
        let budget = self.budget(&out);
        Some(Decomposition {
            blocks: out,
            budget,
        })
    }

    /// Dykstra search for blocks with `Σ τ̃_m = ρ`, `τ̃_m ⪰ 0` and
    /// `Σ ‖T_m τ̃_m‖₁ ≤ b`, started from `start`.
    fn search(&self, b: f64, start: &[Matrix]) -> Option<Decomposition> {
        let k = self.bset.len();
        let n = self.bset.dim();
        let mut x = start.to_vec();
        let mut corr = [
            vec![Matrix::zeros(n, n); k],
            vec![Matrix::zeros(n, n); k],
            vec![Matrix::zeros(n, n); k],
        ];
        for _ in 0..GMN_INNER_ITER {
            let prev = x.clone();
            for (set, c) in corr.iter_mut().enumerate() {
                let y: Vec<Matrix> = x.iter().zip(c.iter()).map(|(a, b)| a + b).collect();
                let p: Vec<Matrix> = match set {
                    0 => {
                        let r = (self.rho - &block_sum(&y)).scale(1.0 / k as f64);
                        y.iter().map(|t| t + &r).collect()
                    }
                    1 => y.iter().map(psd_project).collect(),
                    _ => {
                        let mut t: Vec<Matrix> = y
                            .iter()
                            .enumerate()
                            .map(|(m, v)| self.bset.transpose(m, v))
                            .collect();
                        project_trace_norm_ball(&mut t, b);
                        t.iter()
                            .enumerate()
                            .map(|(m, v)| self.bset.transpose(m, v))
                            .collect()
                    }
                };
                *c = diff(&y, &p);
                x = p;
            }
            if norm(&diff(&x, &prev)) <= 1e-11 {
                break;
            }
        }
        self.congruence_repair(x)
    }
}

/// Genuine multipartite log-negativity: `log₂` of the least budget
/// `Σ_m ‖T_m(τ̃_m)‖₁` over decompositions `ρ = Σ_m τ̃_m`, `τ̃_m ⪰ 0`.
///
/// The witness is the best certified decomposition found; its budget is an
/// upper estimate within [`GMN_BISECTION_TOL`] of the bisection bracket.
pub fn log_gmn(rho: &DensityMatrix, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let bset = check_state(rho)?;
    let search = GmnSearch::new(&bset, rho.matrix());

    let mut best = search.trivial();
    let mut history = vec![best.budget.log2()];
    let mut lo = 1.0;
    let mut iterations = 0;
    let mut status = SolveStatus::Converged;

    if best.budget > 1.0 + GMN_BISECTION_TOL {
        // Budget one, slightly relaxed, decides whether the value vanishes.
        iterations += 1;
        if let Some(d) = search.search(1.0 + 0.5 * GMN_BISECTION_TOL, &best.blocks) {
            if d.budget < best.budget {
                best = d;
                history.push(best.budget.log2());
            }
        }
        while best.budget - lo > GMN_BISECTION_TOL {
            if iterations >= cfg.max_iter {
                status = SolveStatus::IterLimit;
                break;
            }
            iterations += 1;
            let mid = 0.5 * (lo + best.budget);
            match search.search(mid, &best.blocks) {
                Some(d) if d.budget <= mid + 0.25 * GMN_BISECTION_TOL => {
                    best = d;
                    history.push(best.budget.log2());
                }
                Some(d) => {
                    if d.budget < best.budget {
                        best = d;
                        history.push(best.budget.log2());
                    }
                    lo = mid;
                }
                None => lo = mid,
            }
        }
    }

    // The budget of any exact decomposition is at least Tr ρ = 1.
    let value = best.budget.max(1.0).log2();
    let witness = TSetPoint::from_blocks(&bset, best.blocks)?;
    let rep = t_membership(&witness, cfg.feas_tol)?;
    let psd = rep.psd_residuals.iter().copied().fold(0.0, f64::max);
    let sum_residual = (&crate::feasible::assemble(&witness)? - rho.matrix()).max_abs();
    if !(value.is_finite()) {
        status = SolveStatus::InfeasibleDetect;
    }
    Ok(SolveReport {
        value,
        iterations,
        final_feasibility: psd.max(rep.equality_residual).max(sum_residual),
        grad_norm: best.budget - lo,
        floored: false,
        status,
        history,
        witness,
    })
}
