use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve, SdpError, SdpStatus, Tolerances};
use crate::npa::{build_moment_problem, to_sdp_instance, Objective, OperatorWord};
use crate::{Inequality, Trust};

/// One solved grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub epsilon: f64,
    /// Certified minimum fidelity; `None` when the solve did not meet the optimality contract.
    pub f_min: Option<f64>,
    pub status: SdpStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Minimum fidelity over all moment matrices violating `inequality` by at most `ε` below its
/// maximum, for each `ε` in `grid`. Grid points are solved concurrently; output follows `grid`.
pub fn min_fidelity_curve(
    trust: Trust,
    objective: Objective,
    inequality: Inequality,
    grid: &[f64],
    words: &[OperatorWord],
    tolerances: &Tolerances,
) -> Result<Vec<CurvePoint>, SdpError> {
    if grid.is_empty() {
        return Err(SdpError::Grid("empty".into()));
    }
    if let Some(e) = grid.iter().find(|e| !(**e > 0.0 && **e <= 0.5)) {
        return Err(SdpError::Grid(format!("epsilon {e} outside (0, 0.5]")));
    }
    let problems = grid
        .iter()
        .map(|&eps| build_moment_problem(trust, words, objective, inequality, inequality.max_value() - eps))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(grid
        .par_iter()
        .zip(problems.par_iter())
        .map(|(&epsilon, problem)| {
            let sol = solve(&to_sdp_instance(problem), tolerances);
            CurvePoint {
                epsilon,
                f_min: (sol.status == SdpStatus::Optimal).then(|| sol.lower_value()),
                status: sol.status,
                primal_objective: sol.primal_objective,
                dual_objective: sol.dual_objective,
                gap: sol.gap,
                iterations: sol.trace.len(),
            }
        })
        .collect())
}

/// Smallest `α` with `F ≥ 1 − αε` at every point: `max (1 − F)/ε`.
pub fn fit_alpha(curve: &[(f64, f64)]) -> Result<f64, SdpError> {
    if curve.is_empty() {
        return Err(SdpError::Degenerate("no points".into()));
    }
    let mut alpha = f64::NEG_INFINITY;
    for &(eps, f) in curve {
        if !(eps > 0.0 && eps.is_finite() && f.is_finite()) {
            return Err(SdpError::Degenerate(format!("point ({eps}, {f})")));
        }
        alpha = alpha.max((1.0 - f) / eps);
    }
    Ok(alpha)
}

/// Result of deriving a self-testing constant from a solved curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaDerivation {
    pub alpha: f64,
    /// Grid point attaining the maximum ratio.
    pub binding_epsilon: f64,
    pub curve: Vec<CurvePoint>,
}

/// Minimum number of grid points for a derived constant.
pub const MIN_GRID_POINTS: usize = 5;

/// Fits `α` to a curve in which every point must be certified.
pub fn derive_alpha(curve: Vec<CurvePoint>) -> Result<AlphaDerivation, SdpError> {
    if curve.len() < MIN_GRID_POINTS {
        return Err(SdpError::Degenerate(format!("{} grid points, need {MIN_GRID_POINTS}", curve.len())));
    }
    let mut pts = Vec::with_capacity(curve.len());
    for p in &curve {
        match p.f_min {
            Some(f) => pts.push((p.epsilon, f)),
            None => return Err(SdpError::Degenerate(format!("solve at epsilon {} ended with status {:?}", p.epsilon, p.status))),
        }
    }
    let alpha = fit_alpha(&pts)?;
    let binding_epsilon = pts
        .iter()
        .max_by(|a, b| ((1.0 - a.1) / a.0).total_cmp(&((1.0 - b.1) / b.0)))
        .map(|p| p.0)
        .expect("non-empty");
    Ok(AlphaDerivation { alpha, binding_epsilon, curve })
}

/// Whether certified values are non-increasing in `ε` up to `tol`.
pub fn is_monotone(curve: &[CurvePoint], tol: f64) -> bool {
    let mut pts: Vec<(f64, f64)> = curve.iter().filter_map(|p| p.f_min.map(|f| (p.epsilon, f))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| w[1].1 <= w[0].1 + tol)
}
