//! The feasible set of the Rains-type minimisation and its relaxation.
//!
//! A point of `T` is a sum `τ = Σ_m τ̃_m` of positive blocks, one per
//! bipartition, with `Σ_m ‖T_m(τ̃_m)‖₁ ≤ 1`. It is stored in lifted form: each
//! block carries positive parts `τ̃_m^±` with `τ̃_m = T_m(τ̃_m^+ - τ̃_m^-)`, and
//! the budget `Σ_m Tr[τ̃_m^+ + τ̃_m^-]` upper-bounds the trace-norm sum.
//!
//! The smaller set `T'` consists of single positive operators whose partial
//! transpose has trace norm at most one across every bipartition.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, psd_project, Matrix};
use crate::multistate::{enumerate_bipartitions, Bipartition, PartyShape, Transposer};
use crate::random::{random_psd, Rng64};

/// Default feasibility tolerance.
pub const FEAS_TOL: f64 = 1e-8;

/// Default iteration cap for the lifted projection.
pub const DYKSTRA_MAX_ITER: usize = 5000;

/// Partial transposes for every bipartition of a shape, precomputed once.
#[derive(Clone, Debug)]
pub struct BipartitionSet {
    shape: PartyShape,
    cuts: Vec<Bipartition>,
    transposers: Vec<Transposer>,
}

impl BipartitionSet {
    pub fn new(shape: &PartyShape) -> Self {
        let cuts = enumerate_bipartitions(shape.parties()).expect("shape has at least two parties");
        let transposers = cuts
            .iter()
            .map(|&m| Transposer::new(shape, m).expect("cut matches shape"))
            .collect();
        Self {
            shape: shape.clone(),
            cuts,
            transposers,
        }
    }

    pub fn shape(&self) -> &PartyShape {
        &self.shape
    }

    pub fn cuts(&self) -> &[Bipartition] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.shape.total()
    }

    /// `T_m(x)` for the `m`-th cut.
    pub fn transpose(&self, m: usize, x: &Matrix) -> Matrix {
        self.transposers[m].apply(x)
    }

    /// `‖T_m(x)‖₁` for Hermitian `x`.
    pub fn pt_norm(&self, m: usize, x: &Matrix) -> f64 {
        eigh(&self.transpose(m, x)).values.iter().map(|l| l.abs()).sum()
    }
}

/// Splits a Hermitian matrix into orthogonally supported positive and
/// negative parts, `M = plus - minus`.
pub fn jordan_hahn(m: &Matrix) -> (Matrix, Matrix) {
    let e = eigh(m);
    (e.map(|l| l.max(0.0)), e.map(|l| (-l).max(0.0)))
}

/// Lifted representation of a candidate element of `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TSetPoint {
    pub shape: PartyShape,
    pub cuts: Vec<Bipartition>,
    pub tau: Vec<Matrix>,
    pub plus: Vec<Matrix>,
    pub minus: Vec<Matrix>,
}

impl TSetPoint {
    pub fn zeros(shape: &PartyShape) -> Self {
        let cuts = enumerate_bipartitions(shape.parties()).expect("shape has at least two parties");
        let n = shape.total();
        let z = vec![Matrix::zeros(n, n); cuts.len()];
        Self {
            shape: shape.clone(),
            cuts,
            tau: z.clone(),
            plus: z.clone(),
            minus: z,
        }
    }

    /// Builds a point from blocks `τ̃_m`, splitting each `T_m(τ̃_m)` by
    /// Jordan-Hahn so the budget equals the trace-norm sum.
    pub fn from_blocks(bset: &BipartitionSet, tau: Vec<Matrix>) -> Result<Self> {
        if tau.len() != bset.len() {
            return Err(Error::Dimension {
                expected: bset.len(),
                found: tau.len(),
            });
        }
        let mut plus = Vec::with_capacity(tau.len());
        let mut minus = Vec::with_capacity(tau.len());
        for (m, t) in tau.iter().enumerate() {
            if t.rows() != bset.dim() || !t.is_square() {
                return Err(Error::Dimension {
                    expected: bset.dim(),
                    found: t.rows(),
                });
            }
            let (p, n) = jordan_hahn(&bset.transpose(m, t));
            plus.push(p);
            minus.push(n);
        }
        Ok(Self {
            shape: bset.shape.clone(),
            cuts: bset.cuts.clone(),
            tau,
            plus,
            minus,
        })
    }

    /// Puts `block` on the `m`-th cut and zero elsewhere.
    pub fn single(bset: &BipartitionSet, m: usize, block: Matrix) -> Result<Self> {
        let n = bset.dim();
        let mut tau = vec![Matrix::zeros(n, n); bset.len()];
        if m >= tau.len() {
            return Err(Error::Argument("bipartition index out of range".into()));
        }
        tau[m] = block;
        Self::from_blocks(bset, tau)
    }

    /// `Σ_m Tr[τ̃_m^+ + τ̃_m^-]`.
    pub fn budget(&self) -> f64 {
        self.plus
            .iter()
            .chain(&self.minus)
            .map(|x| x.trace_re())
            .sum()
    }

    /// Replaces `τ̃_m` by `T_m(τ̃_m^+ - τ̃_m^-)`.
    pub fn sync_tau(&mut self, bset: &BipartitionSet) {
        for m in 0..self.tau.len() {
            self.tau[m] = bset.transpose(m, &(&self.plus[m] - &self.minus[m]));
        }
    }

    fn check(&self) -> Result<()> {
        let n = self.shape.total();
        let k = self.cuts.len();
        if self.tau.len() != k || self.plus.len() != k || self.minus.len() != k {
            return Err(Error::Dimension {
                expected: k,
                found: self.tau.len().min(self.plus.len()).min(self.minus.len()),
            });
        }
        for x in self.tau.iter().chain(&self.plus).chain(&self.minus) {
            if x.rows() != n || x.cols() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: x.rows(),
                });
            }
        }
        Ok(())
    }
}

/// `Σ_m τ̃_m`.
pub fn assemble(pt: &TSetPoint) -> Result<Matrix> {
    pt.check()?;
    let n = pt.shape.total();
    let mut out = Matrix::zeros(n, n);
    for t in &pt.tau {
        out += t;
    }
    Ok(out)
}

/// Outcome of a membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub feasible: bool,
    /// Per cut, the largest negative eigenvalue magnitude among `τ̃_m`,
    /// `τ̃_m^+` and `τ̃_m^-` (for `T'`, per cut of `σ` itself).
    pub psd_residuals: Vec<f64>,
    /// `Σ_m Tr[τ̃_m^+ + τ̃_m^-]`, or for `T'` the largest `‖T_X σ‖₁`.
    pub budget: f64,
    /// Largest `‖τ̃_m - T_m(τ̃_m^+ - τ̃_m^-)‖_F`.
    pub equality_residual: f64,
    /// `Σ_m ‖T_m(τ̃_m)‖₁`, never larger than `budget` for valid splits.
    pub norm_sum: f64,
}

fn neg_part(x: &Matrix) -> f64 {
    (-eigh(x).min_value()).max(0.0)
}

pub fn t_membership(pt: &TSetPoint, tol: f64) -> Result<MembershipReport> {
    pt.check()?;
    let bset = BipartitionSet::new(&pt.shape);
    let mut psd_residuals = Vec::with_capacity(pt.cuts.len());
    let mut equality_residual: f64 = 0.0;
    let mut norm_sum = 0.0;
    for m in 0..pt.cuts.len() {
        let r = neg_part(&pt.tau[m])
            .max(neg_part(&pt.plus[m]))
            .max(neg_part(&pt.minus[m]));
        psd_residuals.push(r);
        let implied = bset.transpose(m, &(&pt.plus[m] - &pt.minus[m]));
        equality_residual = equality_residual.max((&pt.tau[m] - &implied).frobenius_norm());
        norm_sum += bset.pt_norm(m, &pt.tau[m]);
    }
    let budget = pt.budget();
    let feasible = psd_residuals.iter().all(|&r| r <= tol)
        && equality_residual <= tol
        && budget - 1.0 <= tol;
    Ok(MembershipReport {
        feasible,
        psd_residuals,
        budget,
        equality_residual,
        norm_sum,
    })
}

/// Membership in `T' = {σ ⪰ 0 : ‖T_X σ‖₁ ≤ 1 for every cut X}`.
pub fn tprime_membership(sigma: &Matrix, shape: &PartyShape, tol: f64) -> Result<MembershipReport> {
    if sigma.rows() != shape.total() || !sigma.is_square() {
        return Err(Error::Dimension {
            expected: shape.total(),
            found: sigma.rows(),
        });
    }
    let bset = BipartitionSet::new(shape);
    let neg = neg_part(sigma);
    let norms: Vec<f64> = (0..bset.len()).map(|m| bset.pt_norm(m, sigma)).collect();
    let budget = norms.iter().copied().fold(0.0, f64::max);
    Ok(MembershipReport {
        feasible: neg <= tol && budget <= 1.0 + tol,
        psd_residuals: vec![neg; bset.len()],
        budget,
        equality_residual: 0.0,
        norm_sum: budget,
    })
}

/// Maximally mixed state on the first cut with its exact Jordan-Hahn split.
pub fn feasible_init(shape: &PartyShape) -> TSetPoint {
    let bset = BipartitionSet::new(shape);
    let n = shape.total();
    TSetPoint::single(&bset, 0, Matrix::identity(n).scale(1.0 / n as f64))
        .expect("first cut exists")
}

/// Euclidean projection of `v` onto `{x : Σ|x_i| ≤ radius}`.
pub fn project_l1_ball(v: &mut [f64], radius: f64) {
    let total: f64 = v.iter().map(|x| x.abs()).sum();
    if total <= radius {
        return;
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &u) in mags.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - radius) / (i + 1) as f64;
        if u > t {
            theta = t;
        } else {
            break;
        }
    }
    for x in v.iter_mut() {
        let m = (x.abs() - theta).max(0.0);
        *x = m.copysign(*x);
    }
}

/// Projects a family of Hermitian matrices jointly onto
/// `{(X_m) : Σ_m ‖X_m‖₁ ≤ radius}`. Returns the trace-norm sum before
/// projection.
pub fn project_trace_norm_ball(blocks: &mut [Matrix], radius: f64) -> f64 {
    let eigs: Vec<_> = blocks.iter().map(eigh).collect();
    let mut values: Vec<f64> = eigs.iter().flat_map(|e| e.values.iter().copied()).collect();
    let before: f64 = values.iter().map(|x| x.abs()).sum();
    if before <= radius {
        return before;
    }
    project_l1_ball(&mut values, radius);
    let mut offset = 0;
    for (b, e) in blocks.iter_mut().zip(&eigs) {
        let n = e.dim();
        *b = e.reconstruct_with(&values[offset..offset + n]);
        offset += n;
    }
    before
}

/// Result of the lifted projection, including the per-cycle residual trace.
#[derive(Clone, Debug)]
pub struct DykstraOutcome {
    pub point: TSetPoint,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Largest violation among the three constraint families for the lifted
/// variables (`τ̃_m` is treated as derived from the split).
fn lifted_violation(bset: &BipartitionSet, plus: &[Matrix], minus: &[Matrix]) -> f64 {
    let mut worst: f64 = 0.0;
    let mut budget = 0.0;
    for m in 0..plus.len() {
        worst = worst.max(neg_part(&plus[m])).max(neg_part(&minus[m]));
        worst = worst.max(neg_part(&bset.transpose(m, &(&plus[m] - &minus[m]))));
        budget += plus[m].trace_re() + minus[m].trace_re();
    }
    worst.max(budget - 1.0)
}

/// Frobenius projection of the split variables `(τ̃_m^+, τ̃_m^-)` onto
/// `{τ̃^± ⪰ 0} ∩ {Σ Tr[τ̃^+ + τ̃^-] ≤ 1} ∩ {T_m(τ̃_m^+ - τ̃_m^-) ⪰ 0}`, by
/// Dykstra's alternating projections. The returned blocks are
/// `τ̃_m = T_m(τ̃_m^+ - τ̃_m^-)`.
pub fn dykstra_project_traced(pt: &TSetPoint, tol: f64, max_iter: usize) -> Result<DykstraOutcome> {
    pt.check()?;
    let bset = BipartitionSet::new(&pt.shape);
    let k = bset.len();
    let n = bset.dim();
    let ident = Matrix::identity(n);

    // Unknowns laid out as [plus_0..plus_{k-1}, minus_0..minus_{k-1}].
    let mut x: Vec<Matrix> = pt.plus.iter().chain(&pt.minus).cloned().collect();
    let zero = vec![Matrix::zeros(n, n); 2 * k];
    let mut corr = [zero.clone(), zero.clone(), zero];
    let mut residuals = Vec::new();

    let initial = lifted_violation(&bset, &x[..k], &x[k..]);
    residuals.push(initial);
    if initial <= tol {
        let mut point = pt.clone();
        point.sync_tau(&bset);
        return Ok(DykstraOutcome {
            point,
            iterations: 0,
            residuals,
            converged: true,
        });
    }

    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let prev = x.clone();
        for (set, c) in corr.iter_mut().enumerate() {
            let y: Vec<Matrix> = x.iter().zip(c.iter()).map(|(a, b)| a + b).collect();
            let p = match set {
                0 => y.iter().map(psd_project).collect::<Vec<_>>(),
                1 => {
                    let total: f64 = y.iter().map(|b| b.trace_re()).sum();
                    let excess = total - 1.0;
                    if excess > 0.0 {
                        let shift = excess / (2 * k * n) as f64;
                        y.iter().map(|b| b - &ident.scale(shift)).collect()
                    } else {
                        y.clone()
                    }
                }
                _ => {
                    let mut out = y.clone();
                    for m in 0..k {
                        let d = &y[m] - &y[k + m];
                        let d_new = bset.transpose(m, &psd_project(&bset.transpose(m, &d)));
                        let half = (&d_new - &d).scale(0.5);
                        out[m] = &y[m] + &half;
                        out[k + m] = &y[k + m] - &half;
                    }
                    out
                }
            };
            for i in 0..2 * k {
                c[i] = &y[i] - &p[i];
            }
            x = p;
        }
        let moved: f64 = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).frobenius_norm_sqr())
            .sum::<f64>()
            .sqrt();
        let viol = lifted_violation(&bset, &x[..k], &x[k..]);
        residuals.push(viol);
        if viol <= tol && moved <= tol {
            converged = true;
            break;
        }
    }

    let mut point = pt.clone();
    point.plus = x[..k].to_vec();
    point.minus = x[k..].to_vec();
    point.sync_tau(&bset);
    Ok(DykstraOutcome {
        point,
        iterations,
        residuals,
        converged,
    })
}

/// [`dykstra_project_traced`] that turns non-convergence into an error.
pub fn dykstra_project(pt: &TSetPoint, tol: f64, max_iter: usize) -> Result<TSetPoint> {
    let out = dykstra_project_traced(pt, tol, max_iter)?;
    if out.converged {
        Ok(out.point)
    } else {
        Err(Error::ProjectionDiverged {
            iterations: out.iterations,
            residual: out.residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// Random element of `T`: random positive blocks (some cuts left empty at
/// random), rescaled to a uniformly drawn budget in `(0, 1]`.
pub fn random_feasible_point(bset: &BipartitionSet, rng: &mut Rng64) -> TSetPoint {
    let n = bset.dim();
    let mut tau: Vec<Matrix> = (0..bset.len())
        .map(|_| {
            if rng.uniform() < 0.25 {
                Matrix::zeros(n, n)
            } else {
                let rank = 1 + rng.below(n);
                let g = crate::random::ginibre(n, rank, rng);
                let mut p = g.matmul(&g.adjoint());
                p.hermitize();
                p
            }
        })
        .collect();
    if tau.iter().all(|t| t.max_abs() == 0.0) {
        tau[0] = random_psd(n, rng);
    }
    let norm: f64 = tau.iter().enumerate().map(|(m, t)| bset.pt_norm(m, t)).sum();
    let scale = (1.0 - rng.uniform()) / norm;
    for t in &mut tau {
        t.scale_mut(scale);
    }
    TSetPoint::from_blocks(bset, tau).expect("blocks match the cut set")
}

/// Random element of `T'`: a random positive operator scaled so its largest
/// partial-transpose trace norm is at most one.
pub fn random_tprime_point(bset: &BipartitionSet, rng: &mut Rng64) -> Matrix {
    let p = random_psd(bset.dim(), rng);
    let worst = (0..bset.len()).map(|m| bset.pt_norm(m, &p)).fold(0.0, f64::max);
    p.scale((1.0 - 0.5 * rng.uniform()) / worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_norm;
    use crate::multistate::{dephased_ghz, ghz_state};
    use crate::random::random_hermitian;

    #[test]
    fn jordan_hahn_cases() {
        let mut rng = Rng64::new(1);
        let p = random_psd(4, &mut rng);
        let (a, b) = jordan_hahn(&p);
        assert!((&a - &p).max_abs() < 1e-12 && b.max_abs() < 1e-12);

        let (a, b) = jordan_hahn(&Matrix::diag(&[1.0, -2.0]));
        assert!((&a - &Matrix::diag(&[1.0, 0.0])).max_abs() < 1e-15);
        assert!((&b - &Matrix::diag(&[0.0, 2.0])).max_abs() < 1e-15);

        let h = random_hermitian(6, &mut rng);
        let (a, b) = jordan_hahn(&h);
        assert!((a.trace_re() + b.trace_re() - trace_norm(&h).unwrap()).abs() < 1e-10);
        assert!(a.matmul(&b).max_abs() < 1e-10);
        assert!((&(&a - &b) - &h).max_abs() < 1e-10);
    }

    #[test]
    fn assemble_and_membership_basics() {
        let shape = PartyShape::qubits(3);
        let init = feasible_init(&shape);
        let sum = assemble(&init).unwrap();
        assert!((&sum - &Matrix::identity(8).scale(0.125)).max_abs() < 1e-15);
        let rep = t_membership(&init, 1e-12).unwrap();
        assert!(rep.feasible);
        assert!((rep.budget - 1.0).abs() < 1e-12);
        assert!(eigh(&sum).min_value() > 0.0);

        assert_eq!(assemble(&TSetPoint::zeros(&shape)).unwrap().max_abs(), 0.0);

        let bset = BipartitionSet::new(&shape);
        let doubled = TSetPoint::single(&bset, 0, Matrix::identity(8).scale(0.25)).unwrap();
        let rep = t_membership(&doubled, FEAS_TOL).unwrap();
        assert!(!rep.feasible);
        assert!((rep.budget - 2.0).abs() < 1e-12);

        let dg = dephased_ghz(2, 3).unwrap();
        let pt = TSetPoint::single(&bset, 1, dg.matrix().clone()).unwrap();
        assert!(t_membership(&pt, FEAS_TOL).unwrap().feasible);
    }

    #[test]
    fn tprime_basics() {
        let shape = PartyShape::qubits(2);
        let mixed = Matrix::identity(4).scale(0.25);
        assert!(tprime_membership(&mixed, &shape, FEAS_TOL).unwrap().feasible);
        let bell = ghz_state(2, 2).unwrap();
        let rep = tprime_membership(bell.matrix(), &shape, FEAS_TOL).unwrap();
        assert!(!rep.feasible);
        assert!((rep.budget - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l1_ball_projection() {
        let mut v = [3.0, -1.0, 0.5];
        project_l1_ball(&mut v, 2.0);
        assert!((v.iter().map(|x: &f64| x.abs()).sum::<f64>() - 2.0).abs() < 1e-12);
        assert!((v[0] - 2.0).abs() < 1e-12 && v[1] == 0.0 && v[2] == 0.0);
        let mut w = [0.3, -0.2];
        project_l1_ball(&mut w, 1.0);
        assert_eq!(w, [0.3, -0.2]);
    }

    #[test]
    fn dykstra_fixed_point_and_budget() {
        let shape = PartyShape::qubits(3);
        let bset = BipartitionSet::new(&shape);
        let mut rng = Rng64::new(12);
        let feasible = random_feasible_point(&bset, &mut rng);
        let out = dykstra_project(&feasible, FEAS_TOL, DYKSTRA_MAX_ITER).unwrap();
        for (a, b) in out.plus.iter().zip(&feasible.plus) {
            assert!((a - b).max_abs() < 1e-8);
        }

        let over = TSetPoint::single(&bset, 0, Matrix::identity(8).scale(0.25)).unwrap();
        let proj = dykstra_project(&over, FEAS_TOL, DYKSTRA_MAX_ITER).unwrap();
        assert!(proj.budget() <= 1.0 + 1e-8);
        assert!(t_membership(&proj, 1e-7).unwrap().feasible);
        let again = dykstra_project(&proj, FEAS_TOL, DYKSTRA_MAX_ITER).unwrap();
        let moved: f64 = again
            .plus
            .iter()
            .zip(&proj.plus)
            .chain(again.minus.iter().zip(&proj.minus))
            .map(|(a, b)| (a - b).frobenius_norm())
            .sum();
        assert!(moved < 1e-8);
    }
}
