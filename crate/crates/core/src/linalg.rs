//! Dense complex linear algebra for small Hermitian problems.
//!
//! Matrices are stored row-major in a flat buffer. Everything here is sized
//! for desk-scale quantum states (total dimension up to a few hundred), so
//! the kernels favour clarity and cache-friendly loops over blocking.
//!
//! The Hermitian eigensolver reduces to a real symmetric tridiagonal matrix
//! with complex Householder reflections, removes the residual phases of the
//! off-diagonal with a diagonal unitary, and finishes with implicit QL
//! iterations whose rotations are accumulated directly into the complex
//! eigenvector matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Default absolute tolerance for Hermiticity checks on user input.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default eigenvalue floor applied before evaluating logarithms.
pub const EIGEN_FLOOR: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from a row-major buffer.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Outer product `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    /// Real part of the trace; the natural quantity for Hermitian input.
    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &Matrix) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Real Hilbert-Schmidt inner product `Re Tr[self^† other]`.
    pub fn inner_re(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|` together with its position.
    pub fn max_asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_asymmetry().0 <= tol
    }

    /// Replaces the matrix with `(A + A^†) / 2`.
    pub fn hermitize(&mut self) {
        let n = self.rows;
        for i in 0..n {
            self.data[i * n + i].im = 0.0;
            for j in i + 1..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Matrix::zeros(n, m);
        for i in 0..n {
            let orow = &mut out.data[i * m..(i + 1) * m];
            for l in 0..k {
                let a = self.data[i * k + l];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[l * m..(l + 1) * m];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^† other` without materialising the adjoint.
    pub fn adjoint_mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "adjoint_mul dimension mismatch");
        let (k, n, m) = (self.rows, self.cols, other.cols);
        let mut out = Matrix::zeros(n, m);
        for l in 0..k {
            let brow = &other.data[l * m..(l + 1) * m];
            for i in 0..n {
                let a = self.data[l * n + i].conj();
                if a == ZERO {
                    continue;
                }
                let orow = &mut out.data[i * m..(i + 1) * m];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        Matrix::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// `Re <v|A|v>`.
    pub fn expectation(&self, v: &[C64]) -> f64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Hermitian eigendecomposition after validating Hermiticity.
    pub fn eigh_checked(&self, tol: f64) -> Result<EigenDecomposition> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let (asym, row, col) = self.max_asymmetry();
        if asym > tol {
            return Err(Error::NotHermitian {
                asymmetry: asym,
                row,
                col,
            });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(eigh(self))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Matrix> for Matrix {
    fn sub_assign(&mut self, rhs: &Matrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(λ)) U^†`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Matrix {
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        self.reconstruct_with(&mapped)
    }

    /// `U diag(values) U^†` for an arbitrary real spectrum.
    pub fn reconstruct_with(&self, values: &[f64]) -> Matrix {
        let n = self.dim();
        let u = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in values.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = u[(i, k)] * lam;
                if a == ZERO {
                    continue;
                }
                let row = &mut out.data[i * n..(i + 1) * n];
                for (j, o) in row.iter_mut().enumerate() {
                    *o += a * u[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(&self.values)
    }

    /// Expresses `m` in the eigenbasis: `U^† m U`.
    pub fn to_eigenbasis(&self, m: &Matrix) -> Matrix {
        self.vectors.adjoint_mul(&m.matmul(&self.vectors))
    }

    /// Maps a matrix given in the eigenbasis back: `U m U^†`.
    pub fn from_eigenbasis(&self, m: &Matrix) -> Matrix {
        self.vectors.matmul(&m.matmul(&self.vectors.adjoint()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition.
///
/// Only the lower triangle of `a` is read; the strict upper triangle is
/// assumed to hold its conjugate. Use [`eig_hermitian`] for checked input.
pub fn eigh(a: &Matrix) -> EigenDecomposition {
    assert!(a.is_square(), "eigh requires a square matrix");
    let n = a.rows;
    if n == 0 {
        return EigenDecomposition {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        };
    }

    let mut h = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..i {
            let v = a.data[i * n + j];
            h[i * n + j] = v;
            h[j * n + i] = v.conj();
        }
        h[i * n + i] = C64::new(a.data[i * n + i].re, 0.0);
    }
    let mut q = Matrix::identity(n);

    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    let mut qv = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let alpha2: f64 = (k + 1..n).map(|i| h[i * n + k].norm_sqr()).sum();
        let tail2: f64 = (k + 2..n).map(|i| h[i * n + k].norm_sqr()).sum();
        if tail2 == 0.0 {
            continue;
        }
        let alpha = alpha2.sqrt();
        let x0 = h[(k + 1) * n + k];
        let x0n = x0.norm();
        let phase = if x0n > 0.0 { x0 / x0n } else { ONE };

        v.iter_mut().for_each(|z| *z = ZERO);
        for i in k + 1..n {
            v[i] = h[i * n + k];
        }
        v[k + 1] += phase * alpha;
        let vnorm2 = 2.0 * alpha * (alpha + x0n);
        let tau = 2.0 / vnorm2;

        for i in k..n {
            let row = &h[i * n..(i + 1) * n];
            let mut s = ZERO;
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            p[i] = s * tau;
        }
        let mut vp = ZERO;
        for i in k + 1..n {
            vp += v[i].conj() * p[i];
        }
        let kk = 0.5 * tau * vp.re;
        for i in k..n {
            p[i] -= v[i] * kk;
        }
        // H <- H - v p^† - p v^†, restricted to the active block.
        for i in k..n {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut h[i * n..(i + 1) * n];
            for j in k..n {
                row[j] -= vi * p[j].conj() + pi * v[j].conj();
            }
        }

        // Q <- Q (I - tau v v^†)
        for i in 0..n {
            let row = &q.data[i * n..(i + 1) * n];
            let mut s = ZERO;
            for j in k + 1..n {
                s += row[j] * v[j];
            }
            qv[i] = s * tau;
        }
        for i in 0..n {
            let qi = qv[i];
            if qi == ZERO {
                continue;
            }
            let row = &mut q.data[i * n..(i + 1) * n];
            for j in k + 1..n {
                row[j] -= qi * v[j].conj();
            }
        }
    }

    // Real tridiagonal form via a diagonal phase similarity.
    let mut d: Vec<f64> = (0..n).map(|i| h[i * n + i].re).collect();
    let mut e = vec![0.0f64; n];
    let mut delta = ONE;
    for j in 0..n {
        if j > 0 {
            let sub = h[j * n + j - 1];
            let sn = sub.norm();
            e[j - 1] = sn;
            if sn > 0.0 {
                delta *= sub / sn;
            }
        }
        if delta != ONE {
            for i in 0..n {
                q.data[i * n + j] *= delta;
            }
        }
    }

    tql2(&mut d, &mut e, &mut q);
    EigenDecomposition {
        values: d,
        vectors: q,
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e[i]` between rows `i` and `i+1`), rotating the columns of
/// `z`. Eigenvalues are returned ascending.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut Matrix) {
    let n = d.len();
    if n == 1 {
        return;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut hh = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= hh;
                }
                f += hh;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    hh = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = hh + s * (c * g + s * d[i]);
                    let cols = z.cols;
                    for k in 0..z.rows {
                        let row = &mut z.data[k * cols..(k + 1) * cols];
                        let zh = row[i + 1];
                        row[i + 1] = row[i] * s + zh * c;
                        row[i] = row[i] * c - zh * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || iter >= 64 || !p.is_finite() {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    for i in 0..n - 1 {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            let cols = z.cols;
            for row in z.data.chunks_mut(cols) {
                row.swap(i, k);
            }
        }
    }
}

/// Checked Hermitian eigendecomposition.
///
/// Rejects input whose largest asymmetry `|H_ij - conj(H_ji)|` exceeds
/// [`HERMITIAN_TOL`], reporting the offending entry.
pub fn eig_hermitian(h: &Matrix) -> Result<EigenDecomposition> {
    h.eigh_checked(HERMITIAN_TOL)
}

/// `U diag(f(max(λ, floor))) U^†`.
///
/// Fails with [`Error::Domain`] if `f` is not finite at some floored
/// eigenvalue.
pub fn matrix_function(h: &Matrix, f: impl Fn(f64) -> f64, floor: f64) -> Result<Matrix> {
    let eig = eig_hermitian(h)?;
    let mut mapped = Vec::with_capacity(eig.dim());
    for &lam in &eig.values {
        let x = lam.max(floor);
        let y = f(x);
        if !y.is_finite() {
            return Err(Error::Domain { eigenvalue: x });
        }
        mapped.push(y);
    }
    Ok(eig.reconstruct_with(&mapped))
}

/// Trace norm `Σ |λ_i|` of a Hermitian matrix.
pub fn trace_norm(m: &Matrix) -> Result<f64> {
    Ok(eig_hermitian(m)?.values.iter().map(|l| l.abs()).sum())
}

/// Trace norm of an arbitrary square matrix (sum of singular values).
pub fn trace_norm_general(m: &Matrix) -> f64 {
    let gram = m.adjoint_mul(m);
    eigh(&gram).values.iter().map(|&s| s.max(0.0).sqrt()).sum()
}

/// Frobenius projection onto the positive semidefinite cone.
pub fn psd_project(h: &Matrix) -> Matrix {
    let eig = eigh(h);
    if eig.min_value() >= 0.0 {
        let mut out = h.clone();
        out.hermitize();
        return out;
    }
    eig.map(|l| l.max(0.0))
}

/// First divided difference of the natural logarithm, `g(a, a) = 1/a`.
#[inline]
pub fn log_divided_difference(a: f64, b: f64) -> f64 {
    if a == b {
        1.0 / a
    } else {
        ((a - b) / b).ln_1p() / (a - b)
    }
}

/// First divided difference of `x ↦ x^p` for positive arguments.
#[inline]
pub fn power_divided_difference(a: f64, b: f64, p: f64) -> f64 {
    if a == b {
        p * a.powf(p - 1.0)
    } else {
        b.powf(p) * (p * ((a - b) / b).ln_1p()).exp_m1() / (a - b)
    }
}

/// Directional-derivative kernel of `τ ↦ Tr[ρ log₂ τ]`.
#[derive(Clone, Debug)]
pub struct LogGradient {
    /// `U (ρ̃ ∘ Γ) U^† / ln 2` where `ρ̃ = U^† ρ U` and `Γ` holds the divided
    /// differences of `ln` at the (floored) eigenvalues of `τ`. This is the
    /// gradient of `+Tr[ρ log₂ τ]`; the relative-entropy gradient is its
    /// negative.
    pub matrix: Matrix,
    /// Set when some eigenvalue of `τ` fell below the floor.
    pub floored: bool,
}

/// Gradient of `τ ↦ Tr[ρ log₂ τ]` with eigenvalues floored at
/// [`EIGEN_FLOOR`].
pub fn log_gradient(tau: &Matrix, rho: &Matrix) -> LogGradient {
    log_gradient_from_eig(&eigh(tau), rho, EIGEN_FLOOR)
}

pub fn log_gradient_from_eig(eig: &EigenDecomposition, rho: &Matrix, floor: f64) -> LogGradient {
    let n = eig.dim();
    let mut floored = false;
    let lam: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| {
            if l < floor {
                floored = true;
                floor
            } else {
                l
            }
        })
        .collect();
    let mut rt = eig.to_eigenbasis(rho);
    let inv_ln2 = core::f64::consts::LOG2_E;
    for i in 0..n {
        for j in 0..n {
            rt[(i, j)] *= log_divided_difference(lam[i], lam[j]) * inv_ln2;
        }
    }
    let mut g = eig.from_eigenbasis(&rt);
    g.hermitize();
    LogGradient { matrix: g, floored }
}
