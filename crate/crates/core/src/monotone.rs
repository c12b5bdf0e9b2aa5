//! Selective multipartite PPT operations: a family of maps `(P_x)_x` with
//! every `P_x` completely positive, every `T_m ∘ P_x ∘ T_m` completely
//! positive for each bipartition `m`, and `Σ_x P_x` trace preserving.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, Matrix, C64};
use crate::multistate::{
    embed_local, enumerate_bipartitions, Bipartition, DensityMatrix, KrausChannel, PartyShape,
    Transposer,
};
use crate::random::{haar_unitary, Rng64};

/// Tolerance for the three conditions.
pub const SELECTIVE_TOL: f64 = 1e-10;

/// Outcomes with probability at or below this are dropped.
pub const BRANCH_DROP: f64 = 1e-12;

/// One branch `P_x`, stored as its Choi matrix
/// `J = Σ_ij |i⟩⟨j| ⊗ P_x(|i⟩⟨j|)`. Any linear Hermiticity-preserving map
/// can be stored this way, including maps that fail the CP check.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    choi: Matrix,
    in_dim: usize,
    out_dim: usize,
}

impl Branch {
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        Self {
            choi: ch.choi(),
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
        }
    }

    pub fn from_choi(choi: Matrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        if choi.rows() != in_dim * out_dim || !choi.is_square() {
            return Err(Error::Dimension {
                expected: in_dim * out_dim,
                found: choi.rows(),
            });
        }
        Ok(Self {
            choi,
            in_dim,
            out_dim,
        })
    }

    /// Builds the Choi matrix by evaluating `map` on every `|i⟩⟨j|`.
    pub fn from_map(in_dim: usize, out_dim: usize, map: impl Fn(&Matrix) -> Matrix) -> Result<Self> {
        let mut choi = Matrix::zeros(in_dim * out_dim, in_dim * out_dim);
        for i in 0..in_dim {
            for j in 0..in_dim {
                let mut e = Matrix::zeros(in_dim, in_dim);
                e[(i, j)] = C64::new(1.0, 0.0);
                let y = map(&e);
                if y.rows() != out_dim || y.cols() != out_dim {
                    return Err(Error::Dimension {
                        expected: out_dim,
                        found: y.rows(),
                    });
                }
                for a in 0..out_dim {
                    for b in 0..out_dim {
                        choi[(i * out_dim + a, j * out_dim + b)] = y[(a, b)];
                    }
                }
            }
        }
        Ok(Self {
            choi,
            in_dim,
            out_dim,
        })
    }

    pub fn choi(&self) -> &Matrix {
        &self.choi
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `P(|i⟩⟨j|)` read off the Choi matrix.
    fn block(&self, i: usize, j: usize) -> Matrix {
        let d = self.out_dim;
        Matrix::from_fn(d, d, |a, b| self.choi[(i * d + a, j * d + b)])
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        assert_eq!(x.rows(), din, "branch input dimension mismatch");
        let mut out = Matrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let xij = x[(i, j)];
                if xij == C64::new(0.0, 0.0) {
                    continue;
                }
                for a in 0..dout {
                    for b in 0..dout {
                        out[(a, b)] += xij * self.choi[(i * dout + a, j * dout + b)];
                    }
                }
            }
        }
        out
    }

    /// Choi matrix of `T_out ∘ P ∘ T_in`.
    fn conjugated_choi(&self, t_in: &Transposer, t_out: &Transposer) -> Matrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        // T_in(|i⟩⟨j|) is again a matrix unit; locate it by transposing one.
        let mut choi = Matrix::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let mut e = Matrix::zeros(din, din);
                e[(i, j)] = C64::new(1.0, 0.0);
                let t = t_in.apply(&e);
                let (ti, tj) = unit_position(&t);
                let y = t_out.apply(&self.block(ti, tj));
                for a in 0..dout {
                    for b in 0..dout {
                        choi[(i * dout + a, j * dout + b)] = y[(a, b)];
                    }
                }
            }
        }
        choi
    }

    /// `Tr_out J`, which equals `P^†(I)^T`.
    fn output_trace(&self) -> Matrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        Matrix::from_fn(din, din, |i, j| {
            (0..dout).map(|a| self.choi[(i * dout + a, j * dout + a)]).sum()
        })
    }
}

fn unit_position(e: &Matrix) -> (usize, usize) {
    let n = e.rows();
    for r in 0..n {
        for c in 0..n {
            if e[(r, c)] != C64::new(0.0, 0.0) {
                return (r, c);
            }
        }
    }
    unreachable!("matrix unit has a nonzero entry")
}

/// A family of branches between two multipartite systems with the same
/// number of parties.
#[derive(Clone, Debug)]
pub struct SelectiveOperation {
    in_shape: PartyShape,
    out_shape: PartyShape,
    branches: Vec<Branch>,
}

impl SelectiveOperation {
    pub fn new(in_shape: PartyShape, out_shape: PartyShape, branches: Vec<Branch>) -> Result<Self> {
        if in_shape.parties() != out_shape.parties() {
            return Err(Error::Parties(format!(
                "input has {} parties, output has {}",
                in_shape.parties(),
                out_shape.parties()
            )));
        }
        if branches.is_empty() {
            return Err(Error::Argument("operation needs at least one branch".into()));
        }
        for b in &branches {
            if b.in_dim != in_shape.total() || b.out_dim != out_shape.total() {
                return Err(Error::Dimension {
                    expected: in_shape.total() * out_shape.total(),
                    found: b.in_dim * b.out_dim,
                });
            }
        }
        Ok(Self {
            in_shape,
            out_shape,
            branches,
        })
    }

    /// One branch per Kraus channel.
    pub fn from_kraus(
        in_shape: PartyShape,
        out_shape: PartyShape,
        channels: &[KrausChannel],
    ) -> Result<Self> {
        Self::new(in_shape, out_shape, channels.iter().map(Branch::from_kraus).collect())
    }

    pub fn in_shape(&self) -> &PartyShape {
        &self.in_shape
    }

    pub fn out_shape(&self) -> &PartyShape {
        &self.out_shape
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Frobenius distance of `Σ_x Tr_out J_x` from the identity.
    pub fn trace_preservation_residual(&self) -> f64 {
        let n = self.in_shape.total();
        let mut sum = Matrix::zeros(n, n);
        for b in &self.branches {
            sum += &b.output_trace();
        }
        (&sum - &Matrix::identity(n)).frobenius_norm()
    }
}

/// Per-condition outcome of [`is_selective_ppt`]. Eigenvalue entries are
/// the smallest Choi eigenvalue, so negative numbers measure violation.
#[derive(Clone, Debug)]
pub struct SelectivePptReport {
    pub tol: f64,
    /// Per branch.
    pub cp_min_eigenvalues: Vec<f64>,
    /// Per branch, then per bipartition in canonical order.
    pub ppt_min_eigenvalues: Vec<Vec<f64>>,
    pub trace_preservation_residual: f64,
}

impl SelectivePptReport {
    pub fn completely_positive(&self) -> bool {
        self.cp_min_eigenvalues.iter().all(|&l| l >= -self.tol)
    }

    pub fn ppt_preserving(&self) -> bool {
        self.ppt_min_eigenvalues
            .iter()
            .flatten()
            .all(|&l| l >= -self.tol)
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_preservation_residual <= self.tol
    }

    pub fn passes(&self) -> bool {
        self.completely_positive() && self.ppt_preserving() && self.trace_preserving()
    }
}

fn min_eigenvalue(m: &Matrix) -> f64 {
    let mut h = m.clone();
    h.hermitize();
    eigh(&h).min_value()
}

pub fn is_selective_ppt(op: &SelectiveOperation, tol: f64) -> Result<SelectivePptReport> {
    let cuts = enumerate_bipartitions(op.in_shape.parties())?;
    let transposers: Vec<(Transposer, Transposer)> = cuts
        .iter()
        .map(|&m| {
            Ok((
                Transposer::new(&op.in_shape, m)?,
                Transposer::new(&op.out_shape, m)?,
            ))
        })
        .collect::<Result<_>>()?;
    let cp_min_eigenvalues = op.branches.iter().map(|b| min_eigenvalue(&b.choi)).collect();
    let ppt_min_eigenvalues = op
        .branches
        .iter()
        .map(|b| {
            transposers
                .iter()
                .map(|(ti, to)| min_eigenvalue(&b.conjugated_choi(ti, to)))
                .collect()
        })
        .collect();
    Ok(SelectivePptReport {
        tol,
        cp_min_eigenvalues,
        ppt_min_eigenvalues,
        trace_preservation_residual: op.trace_preservation_residual(),
    })
}

/// Outcome `x` of a selective operation.
#[derive(Clone, Debug)]
pub struct BranchOutcome {
    pub index: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// `ρ_x = P_x(ρ) / p_x` with `p_x = Tr[P_x(ρ)]`, dropping outcomes with
/// `p_x ≤` [`BRANCH_DROP`].
pub fn apply_selective(op: &SelectiveOperation, rho: &DensityMatrix) -> Result<Vec<BranchOutcome>> {
    if rho.shape() != &op.in_shape {
        return Err(Error::Parties("state shape does not match the operation".into()));
    }
    let residual = op.trace_preservation_residual();
    if residual > SELECTIVE_TOL.sqrt() {
        return Err(Error::Argument(format!(
            "branches do not sum to a trace-preserving map (residual {residual:.3e})"
        )));
    }
    let mut out = Vec::new();
    for (index, b) in op.branches.iter().enumerate() {
        let mut y = b.apply(rho.matrix());
        y.hermitize();
        let p = y.trace_re();
        if p <= BRANCH_DROP {
            continue;
        }
        out.push(BranchOutcome {
            index,
            probability: p,
            state: DensityMatrix::new_unchecked(op.out_shape.clone(), y.scale(1.0 / p)),
        });
    }
    Ok(out)
}

/// Random two-outcome instrument on one party: a Haar-random unitary
/// followed by an unsharp computational-basis measurement.
///
/// The Kraus operators are `diag(√a_i) U` and `diag(√(1-a_i)) U` with each
/// `a_i` drawn uniformly from `[0.05, 0.95]`, so both outcomes keep full
/// rank and the post-measurement states stay entangled.
pub fn random_local_instrument(shape: &PartyShape, party: usize, seed: u64) -> Result<SelectiveOperation> {
    let dims = shape.dims();
    if party >= dims.len() {
        return Err(Error::Parties(format!("party index {party} out of range")));
    }
    let d = dims[party];
    let mut rng = Rng64::new(seed);
    let u = haar_unitary(d, &mut rng);
    let weights: Vec<f64> = (0..d).map(|_| 0.05 + 0.9 * rng.uniform()).collect();
    let k0 = Matrix::diag(&weights.iter().map(|a| a.sqrt()).collect::<Vec<_>>()).matmul(&u);
    let k1 = Matrix::diag(&weights.iter().map(|a| (1.0 - a).sqrt()).collect::<Vec<_>>()).matmul(&u);
    let channels = [
        KrausChannel::new(vec![embed_local(shape, party, &k0)?])?,
        KrausChannel::new(vec![embed_local(shape, party, &k1)?])?,
    ];
    SelectiveOperation::from_kraus(shape.clone(), shape.clone(), &channels)
}

/// Sharp measurement `{|i⟩⟨i|}` of one party in the computational basis.
pub fn local_projective_measurement(shape: &PartyShape, party: usize) -> Result<SelectiveOperation> {
    let dims = shape.dims();
    if party >= dims.len() {
        return Err(Error::Parties(format!("party index {party} out of range")));
    }
    let d = dims[party];
    let channels: Vec<KrausChannel> = (0..d)
        .map(|i| {
            let mut p = Matrix::zeros(d, d);
            p[(i, i)] = C64::new(1.0, 0.0);
            KrausChannel::new(vec![embed_local(shape, party, &p)?])
        })
        .collect::<Result<_>>()?;
    SelectiveOperation::from_kraus(shape.clone(), shape.clone(), &channels)
}

/// The bipartition list used to index [`SelectivePptReport`].
pub fn report_cuts(op: &SelectiveOperation) -> Result<Vec<Bipartition>> {
    enumerate_bipartitions(op.in_shape.parties())
}
