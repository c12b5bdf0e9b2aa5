//! Classical and quantum entropies and divergences, in bits.
//!
//! Divergences return `f64::INFINITY` when the support condition fails; the
//! value is never replaced by a large finite number.

use alloc::format;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigh, EigenDecomposition, Matrix};

/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-10;

#[inline]
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `h₂(p) = -p log₂ p - (1-p) log₂(1-p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("probability {p} outside [0, 1]")));
    }
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

/// `D(p‖q) = Σ p(x) log₂(p(x)/q(x))`, infinite when `supp p ⊄ supp q`.
///
/// `q` need not be normalised.
pub fn classical_rel_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            found: q.len(),
        });
    }
    if let Some(x) = p.iter().chain(q).find(|x| !(**x >= 0.0)) {
        return Err(Error::Argument(format!("negative or NaN entry {x}")));
    }
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += pi * (pi / qi).log2();
    }
    Ok(d)
}

/// Minimiser and value of `f(p) = D((p, 1-p) ‖ (r0, r1))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryProfile {
    /// `r0 / (r0 + r1)`: `f` decreases below it and increases above it.
    pub p_star: f64,
    /// `f` evaluated at the requested `p`.
    pub value: f64,
}

pub fn binary_rel_entropy_profile(p: f64, r0: f64, r1: f64) -> Result<BinaryProfile> {
    if !(r0 > 0.0 && r1 > 0.0) {
        return Err(Error::Argument(format!(
            "reference weights must be positive, got ({r0}, {r1})"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("probability {p} outside [0, 1]")));
    }
    Ok(BinaryProfile {
        p_star: r0 / (r0 + r1),
        value: classical_rel_entropy(&[p, 1.0 - p], &[r0, r1])?,
    })
}

/// Minimiser `r = p s` of `r ↦ D((p, 1-p) ‖ (r, s-r))` over `r ∈ (0, s)`.
pub fn second_argument_minimizer(p: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(s > 0.0) {
        return Err(Error::Argument(format!("invalid profile parameters p={p}, s={s}")));
    }
    Ok(p * s)
}

/// `H(ρ) = -Tr[ρ log₂ ρ]`.
pub fn quantum_entropy(rho: &Matrix) -> f64 {
    entropy_from_values(&eigh(rho).values)
}

pub(crate) fn entropy_from_values(values: &[f64]) -> f64 {
    -values.iter().map(|&l| xlog2x(l)).sum::<f64>()
}

/// True when `ρ` has weight above [`SUPPORT_TOL`] on the numerical kernel of
/// `σ` (given by its eigendecomposition).
pub fn support_violated(rho: &Matrix, sigma_eig: &EigenDecomposition) -> bool {
    let n = sigma_eig.dim();
    (0..n).any(|k| {
        sigma_eig.values[k] <= SUPPORT_TOL && {
            let v = sigma_eig.vectors.column(k);
            rho.expectation(&v) > SUPPORT_TOL
        }
    })
}

/// `D(ρ‖σ) = Tr[ρ (log₂ ρ - log₂ σ)]`, infinite if `supp ρ ⊄ supp σ`.
pub fn quantum_rel_entropy(rho: &Matrix, sigma: &Matrix) -> Result<f64> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::Dimension {
            expected: rho.rows(),
            found: sigma.rows(),
        });
    }
    let se = eigh(sigma);
    if support_violated(rho, &se) {
        return Ok(f64::INFINITY);
    }
    let neg_entropy = -quantum_entropy(rho);
    Ok(neg_entropy - cross_term(rho, &se, SUPPORT_TOL))
}

/// `Tr[ρ log₂ σ]` restricted to eigenvalues of `σ` above `floor`.
pub(crate) fn cross_term(rho: &Matrix, sigma_eig: &EigenDecomposition, floor: f64) -> f64 {
    let n = sigma_eig.dim();
    let mut acc = 0.0;
    for k in 0..n {
        let l = sigma_eig.values[k];
        if l <= floor {
            continue;
        }
        let w = rho.expectation(&sigma_eig.vectors.column(k));
        acc += w * l.log2();
    }
    acc
}

/// Checks that `alpha` lies in `[1/2, 1) ∪ (1, ∞)`.
pub fn check_renyi_order(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.5 && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "Renyi order {alpha} outside [1/2, 1) or (1, inf)"
        )))
    }
}

/// Sandwiched Rényi divergence
/// `(1/(α-1)) log₂ Tr[(σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α]`.
pub fn sandwiched_renyi(rho: &Matrix, sigma: &Matrix, alpha: f64) -> Result<f64> {
    check_renyi_order(alpha)?;
    if rho.rows() != sigma.rows() {
        return Err(Error::Dimension {
            expected: rho.rows(),
            found: sigma.rows(),
        });
    }
    let se = eigh(sigma);
    if alpha > 1.0 && support_violated(rho, &se) {
        return Ok(f64::INFINITY);
    }
    let gamma = (1.0 - alpha) / (2.0 * alpha);
    let s_pow = se.map(|l| if l > SUPPORT_TOL { l.powf(gamma) } else { 0.0 });
    let mut inner = s_pow.matmul(&rho.matmul(&s_pow));
    inner.hermitize();
    let q: f64 = eigh(&inner)
        .values
        .iter()
        .map(|&l| if l > 0.0 { l.powf(alpha) } else { 0.0 })
        .sum();
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q.log2() / (alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multistate::{dephased_ghz, ghz_state, DensityMatrix, PartyShape};
    use crate::random::{random_density, Rng64};

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.1).unwrap() - 0.46899).abs() < 1e-5);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn classical_divergence_values() {
        let p = [0.2, 0.5, 0.3];
        assert_eq!(classical_rel_entropy(&p, &p).unwrap(), 0.0);
        assert!((classical_rel_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        let d = classical_rel_entropy(&[0.9, 0.1], &[0.5, 0.5]).unwrap();
        assert!((d - 0.53101).abs() < 1e-5);
        assert_eq!(classical_rel_entropy(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), f64::INFINITY);
        assert!(classical_rel_entropy(&[0.5, 0.5], &[1.0, -0.1]).is_err());
    }

    #[test]
    fn binary_profiles() {
        let sym = binary_rel_entropy_profile(0.5, 0.5, 0.5).unwrap();
        assert_eq!(sym.p_star, 0.5);
        assert!(sym.value.abs() < 1e-15);

        let (r0, r1) = (0.25, 0.75);
        let ps = binary_rel_entropy_profile(0.0, r0, r1).unwrap().p_star;
        let f = |p: f64| binary_rel_entropy_profile(p, r0, r1).unwrap().value;
        let below: alloc::vec::Vec<f64> = (1..25).map(|i| i as f64 * ps / 25.0).collect();
        assert!(below.windows(2).all(|w| f(w[0]) > f(w[1])));
        let above: alloc::vec::Vec<f64> = (1..25).map(|i| ps + i as f64 * (1.0 - ps) / 25.0).collect();
        assert!(above.windows(2).all(|w| f(w[0]) < f(w[1])));

        let r_star = second_argument_minimizer(0.3, 1.0).unwrap();
        assert!((r_star - 0.3).abs() < 1e-15);
        let g = |r: f64| classical_rel_entropy(&[0.3, 0.7], &[r, 1.0 - r]).unwrap();
        for r in [0.1, 0.2, 0.29, 0.31, 0.5, 0.9] {
            assert!(g(r) > g(r_star));
        }
        assert!(binary_rel_entropy_profile(0.3, 0.0, 1.0).is_err());
    }

    #[test]
    fn quantum_divergence_values() {
        let mut rng = Rng64::new(3);
        let rho = random_density(4, 4, &mut rng);
        assert!(quantum_rel_entropy(&rho, &rho).unwrap().abs() < 1e-10);

        let bell = ghz_state(2, 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(PartyShape::qubits(2));
        let d = quantum_rel_entropy(bell.matrix(), mixed.matrix()).unwrap();
        assert!((d - 2.0).abs() < 1e-10);

        for (dd, n) in [(2, 3), (3, 2), (3, 3)] {
            let g = ghz_state(dd, n).unwrap();
            let dg = dephased_ghz(dd, n).unwrap();
            let v = quantum_rel_entropy(g.matrix(), dg.matrix()).unwrap();
            assert!((v - (dd as f64).log2()).abs() < 1e-9);
        }

        let z0 = Matrix::diag(&[1.0, 0.0]);
        let z1 = Matrix::diag(&[0.0, 1.0]);
        assert_eq!(quantum_rel_entropy(&z0, &z1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn renyi_diagonal_reduction() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.3, 0.2, 0.1];
        for alpha in [0.5, 0.7, 1.5, 2.0, 3.0] {
            let oracle: f64 = p
                .iter()
                .zip(&q)
                .map(|(&a, &b): (&f64, &f64)| a.powf(alpha) * b.powf(1.0 - alpha))
                .sum::<f64>()
                .log2()
                / (alpha - 1.0);
            let v = sandwiched_renyi(&Matrix::diag(&p), &Matrix::diag(&q), alpha).unwrap();
            assert!((v - oracle).abs() < 1e-12, "alpha={alpha}");
        }
        let r = Matrix::diag(&p);
        assert!(sandwiched_renyi(&r, &r, 2.0).unwrap().abs() < 1e-12);
        assert!(sandwiched_renyi(&r, &r, 1.0).is_err());
        assert!(sandwiched_renyi(&r, &r, 0.4).is_err());
    }

    #[test]
    fn renyi_limit_and_monotonicity() {
        let mut rng = Rng64::new(17);
        for _ in 0..20 {
            let rho = random_density(4, 4, &mut rng);
            let sigma = random_density(4, 4, &mut rng);
            let d = quantum_rel_entropy(&rho, &sigma).unwrap();
            let d1 = sandwiched_renyi(&rho, &sigma, 1.001).unwrap();
            assert!((d - d1).abs() <= 1e-2);
            let a = sandwiched_renyi(&rho, &sigma, 1.2).unwrap();
            let b = sandwiched_renyi(&rho, &sigma, 1.5).unwrap();
            let c = sandwiched_renyi(&rho, &sigma, 2.0).unwrap();
            assert!(a <= b + 1e-9 && b <= c + 1e-9);
        }
    }

    #[test]
    fn entropy_values() {
        let g = ghz_state(2, 3).unwrap();
        assert!(quantum_entropy(g.matrix()).abs() < 1e-10);
        assert!((quantum_entropy(&Matrix::identity(4).scale(0.25)) - 2.0).abs() < 1e-12);
        assert!((quantum_entropy(&Matrix::diag(&[0.5, 0.5, 0.0, 0.0])) - 1.0).abs() < 1e-12);
    }
}
