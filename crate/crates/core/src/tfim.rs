//! Transverse-field Ising chain `H = -Σ_i (X_i X_{i+1} + h Z_i)`: ground
//! states by Lanczos, three-site reduced states, and entanglement sweeps.
//!
//! Basis states are bit strings with site 0 as the most significant bit and
//! bit value 1 meaning `Z = -1`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, Matrix, C64};
use crate::multistate::{DensityMatrix, PartyShape};
use crate::solver::{gmre, log_gmn, SolveConfig, SolveStatus};

pub const MIN_SITES: usize = 4;
pub const MAX_SITES: usize = 14;
pub const DEFAULT_SITES: usize = 12;

/// Residual `‖Hv - Ev‖` accepted for a ground state.
pub const GROUND_STATE_TOL: f64 = 1e-9;
const LANCZOS_MAX_STEPS: usize = 300;
const LANCZOS_CHECK_EVERY: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    n_sites: usize,
    h: f64,
    boundary: Boundary,
}

impl ChainConfig {
    pub fn new(n_sites: usize, h: f64, boundary: Boundary) -> Result<Self> {
        if !(MIN_SITES..=MAX_SITES).contains(&n_sites) {
            return Err(Error::Argument(format!(
                "chain length {n_sites} outside [{MIN_SITES}, {MAX_SITES}]"
            )));
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::Argument(format!("field {h} must be finite and nonnegative")));
        }
        Ok(Self {
            n_sites,
            h,
            boundary,
        })
    }

    /// Periodic chain of [`DEFAULT_SITES`] sites.
    pub fn periodic(h: f64) -> Result<Self> {
        Self::new(DEFAULT_SITES, h, Boundary::Periodic)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn with_field(&self, h: f64) -> Result<Self> {
        Self::new(self.n_sites, h, self.boundary)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    fn bit(&self, site: usize) -> usize {
        1 << (self.n_sites - 1 - site)
    }

    /// Flip masks of the `X_i X_{i+1}` terms.
    fn bonds(&self) -> Vec<usize> {
        let n = self.n_sites;
        let count = match self.boundary {
            Boundary::Periodic => n,
            Boundary::Open => n - 1,
        };
        (0..count).map(|i| self.bit(i) | self.bit((i + 1) % n)).collect()
    }

    /// Default triple `(n/2 - 1, n/2, n/2 + 1)`.
    pub fn default_sites(&self) -> [usize; 3] {
        let c = self.n_sites / 2;
        [c - 1, c, c + 1]
    }

    fn diagonal(&self) -> Vec<f64> {
        let n = self.n_sites as i64;
        (0..self.dim())
            .map(|s| {
                let ones = (s as u32).count_ones() as i64;
                -self.h * (n - 2 * ones) as f64
            })
            .collect()
    }

    fn apply(&self, diag: &[f64], bonds: &[usize], x: &[f64], y: &mut [f64]) {
        for (s, ys) in y.iter_mut().enumerate() {
            let mut acc = diag[s] * x[s];
            for &b in bonds {
                acc -= x[s ^ b];
            }
            *ys = acc;
        }
    }
}

/// The Hamiltonian as a dense matrix, for cross-checks on short chains.
pub fn dense_hamiltonian(chain: &ChainConfig) -> Matrix {
    let n = chain.dim();
    let diag = chain.diagonal();
    let bonds = chain.bonds();
    let mut m = Matrix::zeros(n, n);
    for s in 0..n {
        m[(s, s)] = C64::new(diag[s], 0.0);
        for &b in &bonds {
            m[(s, s ^ b)] -= C64::new(1.0, 0.0);
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub amplitudes: Vec<C64>,
    pub residual: f64,
    pub lanczos_steps: usize,
}

fn even(s: usize) -> bool {
    (s as u32).count_ones() % 2 == 0
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenpair in the even spin-flip sector (`Π Z_i = +1`).
///
/// The Hamiltonian is real with nonpositive off-diagonal entries, so the
/// sector ground state has positive amplitudes and overlaps the uniform
/// start vector.
pub fn ground_state(chain: &ChainConfig) -> Result<GroundState> {
    let dim = chain.dim();
    let diag = chain.diagonal();
    let bonds = chain.bonds();
    let sector = dim / 2;

    let mut q: Vec<f64> = (0..dim).map(|s| if even(s) { 1.0 } else { 0.0 }).collect();
    let q_norm = norm(&q);
    q.iter_mut().for_each(|x| *x /= q_norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let max_steps = LANCZOS_MAX_STEPS.min(sector);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for step in 0..max_steps {
        chain.apply(&diag, &bonds, &q, &mut w);
        let a = dot(&q, &w);
        basis.push(q.clone());
        alpha.push(a);
        // Full reorthogonalisation, twice for stability.
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        let done = b < 1e-12 || m == max_steps;
        if done || (step + 1) % LANCZOS_CHECK_EVERY == 0 {
            let t = Matrix::from_fn(m, m, |i, j| {
                let v = if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                };
                C64::new(v, 0.0)
            });
            let e = eigh(&t);
            let y: Vec<f64> = (0..m).map(|i| e.vectors[(i, 0)].re).collect();
            let estimate = b * y[m - 1].abs();
            if estimate < GROUND_STATE_TOL * 0.1 || done {
                best = Some((e.values[0], y));
                break;
            }
        }
        beta.push(b);
        q = w.iter().map(|x| x / b).collect();
    }

    let (energy, y) = best.ok_or(Error::EigenNotConverged {
        iterations: max_steps,
        residual: f64::INFINITY,
    })?;
    let mut v = vec![0.0; dim];
    for (c, qv) in y.iter().zip(&basis) {
        v.iter_mut().zip(qv).for_each(|(x, q)| *x += c * q);
    }
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    chain.apply(&diag, &bonds, &v, &mut w);
    let energy_rq = dot(&v, &w);
    let residual = w
        .iter()
        .zip(&v)
        .map(|(hv, x)| (hv - energy_rq * x).powi(2))
        .sum::<f64>()
        .sqrt();
    if residual > GROUND_STATE_TOL {
        return Err(Error::EigenNotConverged {
            iterations: basis.len(),
            residual,
        });
    }
    debug_assert!((energy - energy_rq).abs() < 1e-8);
    Ok(GroundState {
        energy: energy_rq,
        amplitudes: v.into_iter().map(|x| C64::new(x, 0.0)).collect(),
        residual,
        lanczos_steps: basis.len(),
    })
}

/// Checks that `sites` are three consecutive sites, wrapping around only
/// for periodic chains.
fn check_adjacent(sites: [usize; 3], n: usize, boundary: Boundary) -> Result<()> {
    let bad = || Err(Error::Argument(format!("sites {sites:?} are not three adjacent sites")));
    if sites.iter().any(|&s| s >= n) {
        return bad();
    }
    let next = |s: usize| match boundary {
        Boundary::Periodic => Some((s + 1) % n),
        Boundary::Open => (s + 1 < n).then_some(s + 1),
    };
    if next(sites[0]) != Some(sites[1]) || next(sites[1]) != Some(sites[2]) {
        return bad();
    }
    Ok(())
}

/// Reduced state of `sites` (in the given order) from a pure chain state.
pub fn three_site_rdm(
    amplitudes: &[C64],
    n_sites: usize,
    sites: [usize; 3],
    boundary: Boundary,
) -> Result<DensityMatrix> {
    if amplitudes.len() != 1 << n_sites {
        return Err(Error::Dimension {
            expected: 1 << n_sites,
            found: amplitudes.len(),
        });
    }
    check_adjacent(sites, n_sites, boundary)?;
    let bits: Vec<usize> = sites.iter().map(|&s| 1 << (n_sites - 1 - s)).collect();
    let kept_mask: usize = bits.iter().sum();
    let local = |s: usize| -> usize {
        bits.iter()
            .fold(0, |acc, &b| (acc << 1) | usize::from(s & b != 0))
    };
    let mut m = Matrix::zeros(8, 8);
    // Group basis states by the bits outside the triple.
    let mut groups: Vec<[usize; 8]> = vec![[0; 8]; 1 << (n_sites - 3)];
    let mut rest_index = vec![0usize; 1 << n_sites];
    {
        let mut next = 0;
        let mut seen = vec![usize::MAX; 1 << n_sites];
        for s in 0..amplitudes.len() {
            let rest = s & !kept_mask;
            if seen[rest] == usize::MAX {
                seen[rest] = next;
                next += 1;
            }
            rest_index[s] = seen[rest];
        }
    }
    for (s, ri) in rest_index.iter().enumerate() {
        groups[*ri][local(s)] = s;
    }
    for g in &groups {
        for a in 0..8 {
            let pa = amplitudes[g[a]];
            if pa == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..8 {
                m[(a, b)] += pa * amplitudes[g[b]].conj();
            }
        }
    }
    m.hermitize();
    DensityMatrix::new(PartyShape::qubits(3), m)
}

/// Which measures a sweep evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measures {
    pub gmre: bool,
    pub log_gmn: bool,
}

impl Default for Measures {
    fn default() -> Self {
        Self {
            gmre: true,
            log_gmn: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub h_values: Vec<f64>,
    /// Defaults to [`ChainConfig::default_sites`].
    pub sites: Option<[usize; 3]>,
    pub measures: Measures,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.h_values.is_empty() {
            return Err(Error::Argument("field grid is empty".into()));
        }
        if let Some(h) = self.h_values.iter().find(|h| !(**h >= 0.0 && h.is_finite())) {
            return Err(Error::Argument(format!("field {h} must be finite and nonnegative")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub h: f64,
    /// Ground-state energy, or the failure that prevented the row.
    pub energy: Result<f64>,
    pub gmre: Option<Result<MeasureValue>>,
    pub log_gmn: Option<Result<MeasureValue>>,
}

/// Evaluates one field value. Failures are stored in the row.
pub fn sweep_row(h: f64, template: &ChainConfig, spec: &SweepSpec, cfg: &SolveConfig) -> SweepRow {
    let state = template.with_field(h).and_then(|chain| {
        let gs = ground_state(&chain)?;
        let sites = spec.sites.unwrap_or_else(|| chain.default_sites());
        let rdm = three_site_rdm(&gs.amplitudes, chain.n_sites(), sites, chain.boundary())?;
        Ok((gs.energy, rdm))
    });
    match state {
        Err(e) => SweepRow {
            h,
            energy: Err(e.clone()),
            gmre: spec.measures.gmre.then(|| Err(e.clone())),
            log_gmn: spec.measures.log_gmn.then_some(Err(e)),
        },
        Ok((energy, rdm)) => {
            let summarize = |r: Result<crate::solver::SolveReport>| {
                r.map(|r| MeasureValue {
                    value: r.value,
                    status: r.status,
                    iterations: r.iterations,
                })
            };
            SweepRow {
                h,
                energy: Ok(energy),
                gmre: spec.measures.gmre.then(|| summarize(gmre(&rdm, cfg))),
                log_gmn: spec.measures.log_gmn.then(|| summarize(log_gmn(&rdm, cfg))),
            }
        }
    }
}

/// One row per field value, in input order.
pub fn sweep(spec: &SweepSpec, template: &ChainConfig, cfg: &SolveConfig) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    cfg.validate()?;
    Ok(spec
        .h_values
        .iter()
        .map(|&h| sweep_row(h, template, spec, cfg))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_chain_energy() {
        let chain = ChainConfig::new(8, 0.0, Boundary::Periodic).unwrap();
        let gs = ground_state(&chain).unwrap();
        assert!((gs.energy + 8.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_gapped_triples() {
        let psi = vec![C64::new(1.0, 0.0); 1 << 6];
        assert!(three_site_rdm(&psi, 6, [0, 2, 3], Boundary::Periodic).is_err());
        assert!(check_adjacent([5, 0, 1], 6, Boundary::Periodic).is_ok());
        assert!(check_adjacent([5, 0, 1], 6, Boundary::Open).is_err());
    }
}
