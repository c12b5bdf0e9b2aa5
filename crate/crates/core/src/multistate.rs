//! Multipartite structure: party shapes, bipartitions, partial transposes and
//! traces, named states, fidelity and quantum channels.
//!
//! Computational-basis indices are row-major over the parties in declared
//! order, so party 0 is the most significant digit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, Matrix, C64};
use crate::random::{random_density, Rng64};

/// Tolerance used when validating density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Per-party local dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartyShape {
    dims: Vec<usize>,
}

impl PartyShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Parties(format!(
                "need at least 2 parties, got {}",
                dims.len()
            )));
        }
        if let Some((i, &d)) = dims.iter().enumerate().find(|(_, &d)| d < 2) {
            return Err(Error::Parties(format!("party {i} has dimension {d} < 2")));
        }
        if dims.len() > 16 {
            return Err(Error::Parties(format!("{} parties is too many", dims.len())));
        }
        let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match total {
            Some(t) if t <= 1 << 16 => Ok(Self { dims }),
            _ => Err(Error::Parties("total dimension too large".into())),
        }
    }

    /// `n` parties of local dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn qubits(n: usize) -> Self {
        Self::uniform(2, n).expect("qubit shape with n >= 2")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Index stride of each party in the flat computational basis.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len() - 1).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Common local dimension, if all parties agree.
    pub fn uniform_dim(&self) -> Option<usize> {
        let d = self.dims[0];
        self.dims.iter().all(|&x| x == d).then_some(d)
    }

    /// Splits a flat index into per-party digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (p, &d) in self.dims.iter().enumerate().rev() {
            out[p] = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Sub-shape made of the listed parties (which need not satisfy the
    /// two-party minimum, hence the raw vector).
    pub fn sub_dims(&self, parties: &[usize]) -> Vec<usize> {
        parties.iter().map(|&p| self.dims[p]).collect()
    }
}

/// A bipartition, stored as the bitmask of the block containing party 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    mask: u32,
    parties: u8,
}

impl Bipartition {
    /// Canonicalises an arbitrary block by complementing it if it does not
    /// contain party 0.
    pub fn new(block: &[usize], parties: usize) -> Result<Self> {
        if !(2..=16).contains(&parties) {
            return Err(Error::Parties(format!("{parties} parties")));
        }
        let full = (1u32 << parties) - 1;
        let mut mask = 0u32;
        for &p in block {
            if p >= parties {
                return Err(Error::Parties(format!("party index {p} out of range")));
            }
            mask |= 1 << p;
        }
        if mask == 0 || mask == full {
            return Err(Error::Parties("bipartition block must be a proper nonempty subset".into()));
        }
        if mask & 1 == 0 {
            mask = full & !mask;
        }
        Ok(Self {
            mask,
            parties: parties as u8,
        })
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn parties(&self) -> usize {
        self.parties as usize
    }

    pub fn contains(&self, party: usize) -> bool {
        self.mask >> party & 1 == 1
    }

    /// Parties in the block containing party 0, ascending.
    pub fn block(&self) -> Vec<usize> {
        (0..self.parties()).filter(|&p| self.contains(p)).collect()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.parties()).filter(|&p| !self.contains(p)).collect()
    }
}

impl core::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let fmt_set = |v: Vec<usize>, f: &mut core::fmt::Formatter<'_>| {
            write!(f, "{{")?;
            for (i, p) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, "}}")
        };
        fmt_set(self.block(), f)?;
        write!(f, "|")?;
        fmt_set(self.complement(), f)
    }
}

/// All `2^(k-1) - 1` canonical bipartitions of `k` parties, ascending by mask.
pub fn enumerate_bipartitions(k: usize) -> Result<Vec<Bipartition>> {
    if !(2..=16).contains(&k) {
        return Err(Error::Parties(format!("need 2..=16 parties, got {k}")));
    }
    let full = (1u32 << k) - 1;
    Ok((1..full)
        .filter(|m| m & 1 == 1)
        .map(|mask| Bipartition {
            mask,
            parties: k as u8,
        })
        .collect())
}

/// Precomputed index split used to apply a partial transpose quickly.
///
/// Every flat index `r` decomposes as `a[r] + (r - a[r])` where `a[r]` collects
/// the digits of the transposed parties. Transposing those parties maps entry
/// `(r, c)` to `(a[c] + r - a[r], a[r] + c - a[c])`.
#[derive(Clone, Debug)]
pub struct Transposer {
    block_part: Vec<usize>,
}

impl Transposer {
    pub fn new(shape: &PartyShape, m: Bipartition) -> Result<Self> {
        if m.parties() != shape.parties() {
            return Err(Error::Dimension {
                expected: shape.parties(),
                found: m.parties(),
            });
        }
        let strides = shape.strides();
        let dims = shape.dims();
        let block_part = (0..shape.total())
            .map(|r| {
                (0..dims.len())
                    .filter(|&p| m.contains(p))
                    .map(|p| (r / strides[p]) % dims[p] * strides[p])
                    .sum()
            })
            .collect();
        Ok(Self { block_part })
    }

    pub fn dim(&self) -> usize {
        self.block_part.len()
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let n = self.dim();
        assert_eq!(x.rows(), n, "partial transpose dimension mismatch");
        let a = &self.block_part;
        let src = x.as_slice();
        let mut out = Matrix::zeros(n, n);
        let dst = out.as_mut_slice();
        for r in 0..n {
            let (ar, br) = (a[r], r - a[r]);
            for c in 0..n {
                let (ac, bc) = (a[c], c - a[c]);
                dst[r * n + c] = src[(ac + br) * n + ar + bc];
            }
        }
        out
    }
}

/// Transposes the parties in `m`'s block.
pub fn partial_transpose(x: &Matrix, shape: &PartyShape, m: Bipartition) -> Result<Matrix> {
    check_dim(x, shape)?;
    Ok(Transposer::new(shape, m)?.apply(x))
}

fn check_dim(x: &Matrix, shape: &PartyShape) -> Result<()> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    if x.rows() != shape.total() {
        return Err(Error::Dimension {
            expected: shape.total(),
            found: x.rows(),
        });
    }
    Ok(())
}

/// Traces out the parties listed in `traced`; the result acts on the
/// remaining parties in their original order.
pub fn partial_trace(x: &Matrix, shape: &PartyShape, traced: &[usize]) -> Result<Matrix> {
    check_dim(x, shape)?;
    let k = shape.parties();
    if let Some(&p) = traced.iter().find(|&&p| p >= k) {
        return Err(Error::Parties(format!("party index {p} out of range")));
    }
    let kept: Vec<usize> = (0..k).filter(|p| !traced.contains(p)).collect();
    let dims = shape.dims();
    let kept_dim: usize = kept.iter().map(|&p| dims[p]).product();
    let n = shape.total();
    let strides = shape.strides();

    // Split each flat index into (kept index, traced remainder offset).
    let mut kept_index = vec![0usize; n];
    let mut traced_offset = vec![0usize; n];
    for (r, (ki, to)) in kept_index.iter_mut().zip(&mut traced_offset).enumerate() {
        let mut acc = 0;
        for &p in &kept {
            acc = acc * dims[p] + (r / strides[p]) % dims[p];
        }
        *ki = acc;
        *to = r - kept
            .iter()
            .map(|&p| (r / strides[p]) % dims[p] * strides[p])
            .sum::<usize>();
    }

    let mut out = Matrix::zeros(kept_dim, kept_dim);
    for r in 0..n {
        for c in 0..n {
            if traced_offset[r] == traced_offset[c] {
                out[(kept_index[r], kept_index[c])] += x[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Embeds a single-party operator as `I ⊗ … ⊗ op ⊗ … ⊗ I`.
///
/// `op` may be rectangular (`out × d_party`); the result then maps between
/// the corresponding full spaces.
pub fn embed_local(shape: &PartyShape, party: usize, op: &Matrix) -> Result<Matrix> {
    let dims = shape.dims();
    if party >= dims.len() {
        return Err(Error::Parties(format!("party index {party} out of range")));
    }
    if op.cols() != dims[party] {
        return Err(Error::Dimension {
            expected: dims[party],
            found: op.cols(),
        });
    }
    let left: usize = dims[..party].iter().product();
    let right: usize = dims[party + 1..].iter().product();
    Ok(Matrix::identity(left)
        .kron(op)
        .kron(&Matrix::identity(right)))
}

/// A quantum state on a multipartite system.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    shape: PartyShape,
    matrix: Matrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(shape: PartyShape, matrix: Matrix) -> Result<Self> {
        Self::with_tolerance(shape, matrix, STATE_TOL)
    }

    pub fn with_tolerance(shape: PartyShape, mut matrix: Matrix, tol: f64) -> Result<Self> {
        check_dim(&matrix, &shape)?;
        let eig = matrix.eigh_checked(tol)?;
        let trace = matrix.trace_re();
        if (trace - 1.0).abs() > tol {
            return Err(Error::Trace { trace });
        }
        if eig.min_value() < -tol {
            return Err(Error::NotPositive {
                min_eigenvalue: eig.min_value(),
            });
        }
        matrix.hermitize();
        Ok(Self { shape, matrix })
    }

    /// Wraps a matrix already known to be a state; only dimensions are checked.
    pub fn new_unchecked(shape: PartyShape, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.rows(), shape.total());
        Self { shape, matrix }
    }

    /// Normalises a positive semidefinite operator to unit trace.
    pub fn normalized(shape: PartyShape, mut matrix: Matrix) -> Result<Self> {
        let t = matrix.trace_re();
        if !(t > 0.0) {
            return Err(Error::Trace { trace: t });
        }
        matrix.scale_mut(1.0 / t);
        matrix.hermitize();
        Self::new(shape, matrix)
    }

    pub fn pure(shape: PartyShape, psi: &[C64]) -> Result<Self> {
        if psi.len() != shape.total() {
            return Err(Error::Dimension {
                expected: shape.total(),
                found: psi.len(),
            });
        }
        Self::normalized(shape, Matrix::outer(psi, psi))
    }

    /// Computational-basis product state `|digits⟩`.
    pub fn basis(shape: PartyShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.parties() || digits.iter().zip(shape.dims()).any(|(&x, &d)| x >= d)
        {
            return Err(Error::Parties("basis digits do not match the shape".into()));
        }
        let mut psi = vec![C64::new(0.0, 0.0); shape.total()];
        psi[shape.index(digits)] = C64::new(1.0, 0.0);
        Self::pure(shape, &psi)
    }

    pub fn maximally_mixed(shape: PartyShape) -> Self {
        let n = shape.total();
        Self {
            shape,
            matrix: Matrix::identity(n).scale(1.0 / n as f64),
        }
    }

    pub fn shape(&self) -> &PartyShape {
        &self.shape
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.frobenius_norm_sqr()
    }

    pub fn partial_transpose(&self, m: Bipartition) -> Result<Matrix> {
        partial_transpose(&self.matrix, &self.shape, m)
    }

    /// Reduced state on the parties not listed in `traced`.
    pub fn reduce(&self, traced: &[usize]) -> Result<DensityMatrix> {
        let kept: Vec<usize> = (0..self.shape.parties())
            .filter(|p| !traced.contains(p))
            .collect();
        let shape = PartyShape::new(self.shape.sub_dims(&kept))?;
        let m = partial_trace(&self.matrix, &self.shape, traced)?;
        Ok(DensityMatrix::new_unchecked(shape, m))
    }

    /// `p ρ + (1-p) σ`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        if self.shape != other.shape {
            return Err(Error::Parties("mixing states of different shapes".into()));
        }
        let mut m = self.matrix.scale(p);
        m.axpy(1.0 - p, &other.matrix);
        Ok(Self::new_unchecked(self.shape.clone(), m))
    }
}

/// `Φ^d = (1/d) Σ_ij |i…i⟩⟨j…j|` on `n` parties of dimension `d`.
pub fn ghz_state(d: usize, n: usize) -> Result<DensityMatrix> {
    let shape = PartyShape::uniform(d, n)?;
    let mut psi = vec![C64::new(0.0, 0.0); shape.total()];
    for i in 0..d {
        psi[shape.index(&vec![i; n])] = C64::new(1.0, 0.0);
    }
    DensityMatrix::pure(shape, &psi)
}

/// `(1/d) Σ_i |i…i⟩⟨i…i|`.
pub fn dephased_ghz(d: usize, n: usize) -> Result<DensityMatrix> {
    let shape = PartyShape::uniform(d, n)?;
    let mut m = Matrix::zeros(shape.total(), shape.total());
    for i in 0..d {
        let k = shape.index(&vec![i; n]);
        m[(k, k)] = C64::new(1.0 / d as f64, 0.0);
    }
    Ok(DensityMatrix::new_unchecked(shape, m))
}

/// `F_m = Σ_{k,j} |x(k,j)⟩⟨x(j,k)|`, where `x(a,b)` puts digit `b` on every
/// party of `m`'s block and `a` on the rest. Equals `d · T_m(Φ^d)`.
pub fn swap_operator(shape: &PartyShape, m: Bipartition) -> Result<Matrix> {
    let d = shape.uniform_dim().ok_or_else(|| {
        Error::Parties("swap operator needs equal local dimensions".into())
    })?;
    let k = shape.parties();
    let x = |a: usize, b: usize| {
        let digits: Vec<usize> = (0..k).map(|p| if m.contains(p) { b } else { a }).collect();
        shape.index(&digits)
    };
    let mut f = Matrix::zeros(shape.total(), shape.total());
    for a in 0..d {
        for b in 0..d {
            f[(x(a, b), x(b, a))] = C64::new(1.0, 0.0);
        }
    }
    Ok(f)
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁²`.
pub fn fidelity(rho: &Matrix, sigma: &Matrix) -> Result<f64> {
    if rho.rows() != sigma.rows() {
        return Err(Error::Dimension {
            expected: rho.rows(),
            found: sigma.rows(),
        });
    }
    let sr = eigh(rho).map(|l| l.max(0.0).sqrt());
    let ss = eigh(sigma).map(|l| l.max(0.0).sqrt());
    let t = linalg::trace_norm_general(&sr.matmul(&ss));
    Ok((t * t).min(1.0))
}

/// Fidelity with a pure state `|ψ⟩`, i.e. `⟨ψ|ρ|ψ⟩`.
pub fn pure_fidelity(psi: &[C64], rho: &Matrix) -> f64 {
    rho.expectation(psi)
}

/// A completely positive map in Kraus form, `X ↦ Σ K X K^†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<Matrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausChannel {
    pub fn new(ops: Vec<Matrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::Argument("channel needs at least one Kraus operator".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        for k in &ops {
            if k.rows() != out_dim || k.cols() != in_dim {
                return Err(Error::Dimension {
                    expected: out_dim * in_dim,
                    found: k.rows() * k.cols(),
                });
            }
        }
        Ok(Self {
            ops,
            in_dim,
            out_dim,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            ops: vec![Matrix::identity(dim)],
            in_dim: dim,
            out_dim: dim,
        }
    }

    pub fn ops(&self) -> &[Matrix] {
        &self.ops
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `Σ K^† K`.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.in_dim, self.in_dim);
        for k in &self.ops {
            g += &k.adjoint_mul(k);
        }
        g
    }

    /// Frobenius distance of `Σ K^† K` from the identity.
    pub fn trace_preservation_residual(&self) -> f64 {
        (&self.gram() - &Matrix::identity(self.in_dim)).frobenius_norm()
    }

    pub fn apply(&self, x: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.out_dim, self.out_dim);
        for k in &self.ops {
            out += &k.matmul(&x.matmul(&k.adjoint()));
        }
        out.hermitize();
        out
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
    pub fn choi(&self) -> Matrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        let mut c = Matrix::zeros(din * dout, din * dout);
        for k in &self.ops {
            // Column i of K is K|i⟩.
            for i in 0..din {
                for j in 0..din {
                    for a in 0..dout {
                        let kai = k[(a, i)];
                        for b in 0..dout {
                            c[(i * dout + a, j * dout + b)] += kai * k[(b, j)].conj();
                        }
                    }
                }
            }
        }
        c
    }

    /// Sequential composition: `other` after `self`.
    pub fn then(&self, other: &KrausChannel) -> Result<KrausChannel> {
        if other.in_dim != self.out_dim {
            return Err(Error::Dimension {
                expected: self.out_dim,
                found: other.in_dim,
            });
        }
        let mut ops = Vec::with_capacity(self.ops.len() * other.ops.len());
        for b in &other.ops {
            for a in &self.ops {
                ops.push(b.matmul(a));
            }
        }
        KrausChannel::new(ops)
    }
}

/// Applies a channel and relabels the output with `out_shape`.
pub fn apply_channel(
    ch: &KrausChannel,
    rho: &DensityMatrix,
    out_shape: PartyShape,
) -> Result<DensityMatrix> {
    if ch.in_dim != rho.dim() {
        return Err(Error::Dimension {
            expected: ch.in_dim,
            found: rho.dim(),
        });
    }
    if ch.out_dim != out_shape.total() {
        return Err(Error::Dimension {
            expected: ch.out_dim,
            found: out_shape.total(),
        });
    }
    Ok(DensityMatrix::new_unchecked(out_shape, ch.apply(rho.matrix())))
}

/// Kraus form of tracing out `traced` parties.
pub fn partial_trace_channel(shape: &PartyShape, traced: &[usize]) -> Result<KrausChannel> {
    let k = shape.parties();
    let kept: Vec<usize> = (0..k).filter(|p| !traced.contains(p)).collect();
    let traced_dims: Vec<usize> = shape.sub_dims(traced);
    let kept_dim: usize = shape.sub_dims(&kept).iter().product();
    let n_env: usize = traced_dims.iter().product();
    let mut ops = Vec::with_capacity(n_env);
    for e in 0..n_env {
        // Digits of the environment basis vector.
        let mut env = vec![0; traced.len()];
        let mut rem = e;
        for (i, &d) in traced_dims.iter().enumerate().rev() {
            env[i] = rem % d;
            rem /= d;
        }
        let mut op = Matrix::zeros(kept_dim, shape.total());
        for kidx in 0..kept_dim {
            let mut rem = kidx;
            let mut digits = vec![0; k];
            for &p in kept.iter().rev() {
                digits[p] = rem % shape.dims()[p];
                rem /= shape.dims()[p];
            }
            for (i, &p) in traced.iter().enumerate() {
                digits[p] = env[i];
            }
            op[(kidx, shape.index(&digits))] = C64::new(1.0, 0.0);
        }
        ops.push(op);
    }
    KrausChannel::new(ops)
}

/// Full-rank random state `G G^† / Tr[G G^†]`, `G` complex Gaussian.
pub fn random_density_matrix(shape: &PartyShape, seed: u64) -> DensityMatrix {
    let mut rng = Rng64::new(seed);
    DensityMatrix::new_unchecked(shape.clone(), random_density(shape.total(), shape.total(), &mut rng))
}

/// Random state of the given rank drawn with an external generator.
pub fn random_state_with_rank(shape: &PartyShape, rank: usize, rng: &mut Rng64) -> DensityMatrix {
    DensityMatrix::new_unchecked(shape.clone(), random_density(shape.total(), rank, rng))
}
