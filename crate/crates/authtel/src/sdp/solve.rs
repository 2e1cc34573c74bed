use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ipm::{self, Iterate, Outcome, Targets};
use super::presolve::presolve;
use super::SdpInstance;

/// Optimality contract: a solution is reported optimal only within these bounds.
pub const CONTRACT_GAP: f64 = 1e-6;
pub const CONTRACT_RESIDUAL: f64 = 1e-7;
pub const CONTRACT_MIN_EIGENVALUE: f64 = -1e-8;

pub const REPORT_SCHEMA: &str = "sdp/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative gap target `|p − d| ≤ gap·(1 + |p|)`.
    pub gap: f64,
    /// Absolute residual target for both feasibility residuals.
    pub residual: f64,
    pub max_iterations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { gap: 1e-8, residual: 1e-9, max_iterations: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Infeasibility {
    /// The equality constraints have no solution (or force a negative diagonal).
    Linear,
    /// The affine space misses the PSD cone: a dual ray was found.
    Primal,
    /// The objective is unbounded below: a primal ray was found.
    Dual,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub infeasibility: Option<Infeasibility>,
    pub message: String,
    pub primal_matrix: DMatrix<f64>,
    /// Dual slack `Y = C − Σ y_i A_i`; reported in place of the multiplier vector because
    /// presolve eliminates the redundant equalities.
    pub dual_slack: DMatrix<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    /// Equality residual of `primal_matrix`.
    pub primal_residual: f64,
    /// Residual of `C − Y` against the range of the constraint matrices.
    pub dual_residual: f64,
    /// Distance between the returned matrix and the interior slack iterate.
    pub cone_residual: f64,
    pub min_eigenvalue: f64,
    pub free_variables: usize,
    pub redundant_constraints: usize,
    pub trace: Vec<Iterate>,
}

impl SdpSolution {
    /// Conservative bound on the optimum: the smaller of the two objectives.
    pub fn lower_value(&self) -> f64 {
        self.primal_objective.min(self.dual_objective)
    }

    pub fn meets_contract(&self) -> bool {
        self.gap <= CONTRACT_GAP * (1.0 + self.primal_objective.abs())
            && self.primal_residual <= CONTRACT_RESIDUAL
            && self.dual_residual <= CONTRACT_RESIDUAL
            && self.cone_residual <= CONTRACT_RESIDUAL
            && self.min_eigenvalue >= CONTRACT_MIN_EIGENVALUE
    }

    pub fn report(&self, include_matrices: bool) -> SolutionReport {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
        SolutionReport {
            schema: REPORT_SCHEMA.to_string(),
            status: self.status,
            infeasibility: self.infeasibility,
            message: self.message.clone(),
            primal_objective: self.primal_objective,
            dual_objective: self.dual_objective,
            gap: self.gap,
            primal_residual: self.primal_residual,
            dual_residual: self.dual_residual,
            cone_residual: self.cone_residual,
            min_eigenvalue: self.min_eigenvalue,
            free_variables: self.free_variables,
            redundant_constraints: self.redundant_constraints,
            iterations: self.trace.len(),
            trace: self.trace.iter().map(TraceRow::from).collect(),
            primal_matrix: include_matrices.then(|| rows(&self.primal_matrix)),
            dual_slack: include_matrices.then(|| rows(&self.dual_slack)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

impl From<&Iterate> for TraceRow {
    fn from(it: &Iterate) -> Self {
        TraceRow {
            primal_objective: it.primal_objective,
            dual_objective: it.dual_objective,
            primal_residual: it.primal_residual,
            dual_residual: it.dual_residual,
            mu: it.mu,
            primal_step: it.primal_step,
            dual_step: it.dual_step,
        }
    }
}

/// JSON solution report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub schema: String,
    pub status: SdpStatus,
    pub infeasibility: Option<Infeasibility>,
    pub message: String,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub cone_residual: f64,
    pub min_eigenvalue: f64,
    pub free_variables: usize,
    pub redundant_constraints: usize,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub primal_matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dual_slack: Option<Vec<Vec<f64>>>,
}

impl SolutionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0`.
///
/// Targets tighter than the optimality contract are honored; looser ones are clamped to it.
pub fn solve(instance: &SdpInstance, tolerances: &Tolerances) -> SdpSolution {
    let n = instance.dim;
    let red = match presolve(instance) {
        Ok(r) => r,
        Err(e) => {
            return SdpSolution {
                status: SdpStatus::Infeasible,
                infeasibility: Some(Infeasibility::Linear),
                message: e.0,
                primal_matrix: DMatrix::zeros(n, n),
                dual_slack: DMatrix::zeros(n, n),
                primal_objective: f64::NAN,
                dual_objective: f64::NAN,
                gap: f64::NAN,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                cone_residual: f64::NAN,
                min_eigenvalue: f64::NAN,
                free_variables: 0,
                redundant_constraints: 0,
                trace: Vec::new(),
            }
        }
    };
    let targets = Targets {
        gap: tolerances.gap.min(CONTRACT_GAP * 0.5),
        residual: tolerances.residual.min(CONTRACT_RESIDUAL * 0.5),
    };
    let res = ipm::run(&red, &targets, tolerances.max_iterations);
    let x = red.assemble(&res.z);
    let y = res.y;
    let last = res.trace.get(res.returned).copied();
    let primal_objective = instance.objective_value(&x);
    let dual_objective = red.c0 - red.g0.dot(&y);
    let dual_residual = red
        .gs
        .iter()
        .zip(&red.c)
        .map(|(g, c)| (c - g.dot(&y)).abs())
        .fold(0.0, f64::max);
    let min_eigenvalue = if n == 0 { 0.0 } else { x.clone().symmetric_eigenvalues().min() };
    let mut sol = SdpSolution {
        status: SdpStatus::MaxIterations,
        infeasibility: None,
        message: String::new(),
        primal_residual: instance.max_residual(&x),
        cone_residual: last.map_or(f64::NAN, |it| it.primal_residual),
        primal_matrix: x,
        dual_slack: y,
        gap: (primal_objective - dual_objective).abs(),
        primal_objective,
        dual_objective,
        dual_residual,
        min_eigenvalue,
        free_variables: red.gs.len(),
        redundant_constraints: red.redundant,
        trace: res.trace,
    };
    match res.outcome {
        Outcome::PrimalInfeasible => {
            sol.status = SdpStatus::Infeasible;
            sol.infeasibility = Some(Infeasibility::Primal);
            sol.message = format!("dual ray found after trace(Y) exceeded {:e}", ipm::DIVERGENCE_THRESHOLD);
        }
        Outcome::Unbounded => {
            sol.status = SdpStatus::Infeasible;
            sol.infeasibility = Some(Infeasibility::Dual);
            sol.message = format!("primal ray found after |z| exceeded {:e}", ipm::DIVERGENCE_THRESHOLD);
        }
        Outcome::Converged | Outcome::MaxIterations | Outcome::Stalled => {
            if sol.meets_contract() {
                sol.status = SdpStatus::Optimal;
            } else {
                sol.message = match res.outcome {
                    Outcome::Stalled => "iterates stalled before meeting the optimality contract".into(),
                    Outcome::MaxIterations => "iteration cap reached".into(),
                    _ => "final iterate misses the optimality contract".into(),
                };
            }
        }
    }
    sol
}
