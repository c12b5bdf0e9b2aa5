//! Closed-form lower bounds on the Rains quantity from GHZ fidelity, and
//! upper bounds on one-shot GHZ distillation.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;

use crate::entropy::{binary_entropy, classical_rel_entropy};
use crate::error::{Error, Result};
use crate::multistate::{ghz_state, DensityMatrix};
use crate::solver::{renyi_rains, SolveConfig, SolveReport};

/// Rényi orders tried by [`renyi_one_shot_bound`] when none are given.
pub const DEFAULT_ALPHA_GRID: [f64; 6] = [1.001, 1.01, 1.1, 1.25, 1.5, 2.0];

/// Slack used by [`renyi_lower_bound_check`].
pub const LOWER_BOUND_SLACK: f64 = 1e-3;

/// Lower bounds on the Rains quantity of a state with GHZ fidelity `F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityBound {
    /// `D((F, 1-F) ‖ (1/d, 1-1/d))`.
    pub exact: f64,
    /// `F log₂ d - h₂(F)`, never larger than `exact`.
    pub relaxed: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Argument(format!("error tolerance {epsilon} outside [0, 1)")));
    }
    Ok(())
}

/// Requires `1/d ≤ F ≤ 1`.
pub fn ghz_fidelity_lower_bound(f: f64, d: usize) -> Result<FidelityBound> {
    if d < 2 {
        return Err(Error::Argument(format!("local dimension {d} below 2")));
    }
    let inv = 1.0 / d as f64;
    if !(f <= 1.0) {
        return Err(Error::Argument(format!("fidelity {f} above 1")));
    }
    if f < inv {
        return Err(Error::Argument(format!(
            "fidelity {f} below 1/d = {inv}; the bound only holds for F ≥ 1/d"
        )));
    }
    let exact = classical_rel_entropy(&[f, 1.0 - f], &[inv, 1.0 - inv])?;
    let relaxed = f * (d as f64).log2() - binary_entropy(f)?;
    Ok(FidelityBound { exact, relaxed })
}

/// `(R + h₂(ε)) / (1 - ε)`, an upper bound on the one-shot distillable GHZ
/// rate at error `ε`.
pub fn one_shot_bound(r_value: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok((r_value + binary_entropy(epsilon)?) / (1.0 - epsilon))
}

/// `(α / (α - 1)) log₂(1 / (1 - ε))`.
pub fn renyi_penalty(alpha: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(alpha > 1.0) {
        return Err(Error::Argument(format!("Renyi order {alpha} must exceed 1")));
    }
    Ok(alpha / (alpha - 1.0) * (1.0 / (1.0 - epsilon)).log2())
}

/// One grid point of [`renyi_one_shot_bound`].
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub alpha: f64,
    /// `R̃_α(ρ)` as estimated by the solver, or the error it raised.
    pub renyi: Result<f64>,
    /// `R̃_α(ρ) + penalty`, when the solve succeeded.
    pub candidate: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RenyiOneShot {
    /// Minimum candidate over the grid.
    pub value: f64,
    /// Order attaining `value`.
    pub alpha: f64,
    pub points: Vec<GridPoint>,
}

/// Combines precomputed Rényi-Rains values into the one-shot bound.
/// Failed points are skipped; if every point failed the first error is
/// returned.
pub fn combine_renyi_values(
    values: Vec<(f64, Result<f64>)>,
    epsilon: f64,
) -> Result<RenyiOneShot> {
    check_epsilon(epsilon)?;
    if values.is_empty() {
        return Err(Error::Argument("empty Renyi order grid".into()));
    }
    let mut points = Vec::with_capacity(values.len());
    let mut best: Option<(f64, f64)> = None;
    for (alpha, renyi) in values {
        let candidate = match &renyi {
            Ok(v) => Some(v + renyi_penalty(alpha, epsilon)?),
            Err(_) => None,
        };
        if let Some(c) = candidate {
            if best.map_or(true, |(b, _)| c < b) {
                best = Some((c, alpha));
            }
        }
        points.push(GridPoint {
            alpha,
            renyi,
            candidate,
        });
    }
    match best {
        Some((value, alpha)) => Ok(RenyiOneShot {
            value,
            alpha,
            points,
        }),
        None => Err(points
            .into_iter()
            .find_map(|p| p.renyi.err())
            .expect("every point failed")),
    }
}

/// `min_α R̃_α(ρ) + (α / (α - 1)) log₂(1 / (1 - ε))` over `alpha_grid`.
pub fn renyi_one_shot_bound(
    rho: &DensityMatrix,
    epsilon: f64,
    alpha_grid: &[f64],
    cfg: &SolveConfig,
) -> Result<RenyiOneShot> {
    check_epsilon(epsilon)?;
    for &a in alpha_grid {
        renyi_penalty(a, epsilon)?;
    }
    let values = alpha_grid
        .iter()
        .map(|&a| (a, renyi_rains(rho, a, cfg).map(|r| r.value)))
        .collect();
    combine_renyi_values(values, epsilon)
}

/// Both sides of `R̃_α(ρ) - (α / (α - 1)) log₂ F ≥ log₂ d`.
#[derive(Clone, Debug)]
pub struct LowerBoundCheck {
    pub fidelity: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub report: SolveReport,
}

/// GHZ fidelity `⟨Φ^d|ρ|Φ^d⟩`; `ρ` must have equal local dimensions.
pub fn ghz_fidelity(rho: &DensityMatrix) -> Result<f64> {
    let shape = rho.shape();
    let d = shape
        .uniform_dim()
        .ok_or_else(|| Error::Parties("GHZ fidelity needs equal local dimensions".into()))?;
    let ghz = ghz_state(d, shape.parties())?;
    Ok(ghz.matrix().inner_re(rho.matrix()))
}

/// Evaluates the Rényi lower bound at order `alpha`, computing `F` when not
/// supplied. Holds within [`LOWER_BOUND_SLACK`].
pub fn renyi_lower_bound_check(
    rho: &DensityMatrix,
    alpha: f64,
    fidelity: Option<f64>,
    d: usize,
    cfg: &SolveConfig,
) -> Result<LowerBoundCheck> {
    let f = match fidelity {
        Some(f) => f,
        None => ghz_fidelity(rho)?,
    };
    if !(f > 0.0 && f <= 1.0 + 1e-12) {
        return Err(Error::Argument(format!("fidelity {f} outside (0, 1]")));
    }
    let report = renyi_rains(rho, alpha, cfg)?;
    let lhs = report.value - alpha / (alpha - 1.0) * f.min(1.0).log2();
    let rhs = (d as f64).log2();
    Ok(LowerBoundCheck {
        fidelity: f,
        lhs,
        rhs,
        holds: lhs >= rhs - LOWER_BOUND_SLACK,
        report,
    })
}
