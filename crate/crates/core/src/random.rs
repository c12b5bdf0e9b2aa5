//! Seeded random matrices for tests, property checks and initialisation.

use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{Matrix, C64};

/// Deterministic generator used everywhere a seed is accepted.
pub struct Rng64(ChaCha8Rng);

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        loop {
            let u: f64 = self.0.random();
            if u > 0.0 {
                let v: f64 = self.0.random();
                return (-2.0 * u.ln()).sqrt() * (core::f64::consts::TAU * v).cos();
            }
        }
    }

    /// Complex normal with unit variance per real component.
    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }
}

/// Ginibre matrix with i.i.d. complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut Rng64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

pub fn random_hermitian(n: usize, rng: &mut Rng64) -> Matrix {
    let g = ginibre(n, n, rng);
    let mut h = &g + &g.adjoint();
    h.scale_mut(0.5);
    h
}

/// `G G^†` for a square Ginibre `G` (full rank almost surely, not normalised).
pub fn random_psd(n: usize, rng: &mut Rng64) -> Matrix {
    let g = ginibre(n, n, rng);
    let mut p = g.matmul(&g.adjoint());
    p.hermitize();
    p
}

/// Random density matrix of the given rank drawn from the induced measure.
pub fn random_density(n: usize, rank: usize, rng: &mut Rng64) -> Matrix {
    let g = ginibre(n, rank.max(1), rng);
    let mut p = g.matmul(&g.adjoint());
    p.hermitize();
    let t = p.trace_re();
    p.scale_mut(1.0 / t);
    p
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary(n: usize, rng: &mut Rng64) -> Matrix {
    let g = ginibre(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        // Two passes keep the basis orthonormal to machine precision.
        for _ in 0..2 {
            for u in &cols {
                let ip: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= ip * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random normalised pure state vector.
pub fn random_state_vector(n: usize, rng: &mut Rng64) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| rng.complex_normal()).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}
