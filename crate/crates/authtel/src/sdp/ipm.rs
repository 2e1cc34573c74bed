//! Infeasible-start primal-dual path following on `min c0 + cᵀz  s.t.  S = G0 + Σ z_j G_j ⪰ 0`
//! with dual `max c0 − ⟨G0, Y⟩  s.t.  ⟨G_j, Y⟩ = c_j, Y ⪰ 0`.
//!
//! Search directions use the HKM linearization `S dY + dS Y = σμI − SY` with a Mehrotra
//! predictor-corrector. Everything is dense and single-threaded.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::presolve::Reduced;

/// Fraction of the distance to the cone boundary taken per step.
const STEP_FRACTION: f64 = 0.95;
/// `tr(Y)` or `‖z‖∞` beyond this value triggers the infeasibility tests.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;
/// Normalized certificate tolerance of the infeasibility tests.
const CERTIFICATE_TOL: f64 = 1e-6;
/// Consecutive negligible steps before giving up.
const STALL_LIMIT: usize = 3;
/// Iterations without improving the best iterate before giving up.
const PLATEAU_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iterate {
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `max |F(z) − S|`.
    pub primal_residual: f64,
    /// `max_j |c_j − ⟨G_j, Y⟩|`.
    pub dual_residual: f64,
    pub mu: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Converged,
    MaxIterations,
    Stalled,
    /// A normalized dual ray `Ŷ ⪰ 0` with `⟨G_j, Ŷ⟩ ≈ 0` and `⟨G0, Ŷ⟩ < 0`: no PSD point exists.
    PrimalInfeasible,
    /// A direction `ẑ` with `Σ ẑ_j G_j ⪰ 0` and `cᵀẑ < 0`: the objective is unbounded below.
    Unbounded,
}

pub struct IpmResult {
    pub z: Vec<f64>,
    pub y: DMatrix<f64>,
    pub outcome: Outcome,
    pub trace: Vec<Iterate>,
    /// Trace index of the returned iterate. Without convergence this is the iterate closest to
    /// the targets, which may precede the last one when rounding errors dominate the tail.
    pub returned: usize,
}

/// Iterate closest to the targets so far.
struct Best {
    merit: f64,
    index: usize,
    iterate: Iterate,
    z: Vec<f64>,
    y: DMatrix<f64>,
}

/// Largest ratio of a residual or the gap to its target.
fn merit(it: &Iterate, targets: &Targets) -> f64 {
    let gap = (it.primal_objective - it.dual_objective).abs() / (targets.gap * (1.0 + it.primal_objective.abs()));
    (it.primal_residual / targets.residual).max(it.dual_residual / targets.residual).max(gap)
}

struct Lmi {
    n: usize,
    g0: DMatrix<f64>,
    /// Both orientations of every off-diagonal entry.
    full: Vec<Vec<(usize, usize, f64)>>,
}

impl Lmi {
    fn new(red: &Reduced) -> Self {
        let full = red
            .gs
            .iter()
            .map(|g| {
                let mut v = Vec::with_capacity(2 * g.entries().len());
                for &(i, j, x) in g.entries() {
                    v.push((i, j, x));
                    if i != j {
                        v.push((j, i, x));
                    }
                }
                v
            })
            .collect();
        Lmi { n: red.dim, g0: red.g0.to_dense(red.dim), full }
    }

    fn m(&self) -> usize {
        self.full.len()
    }

    fn apply(&self, z: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (g, &zj) in self.full.iter().zip(z) {
            if zj != 0.0 {
                for &(a, b, v) in g {
                    out[(a, b)] += zj * v;
                }
            }
        }
        out
    }

    /// `tr(G_j W)` for every `j`; `W` need not be symmetric.
    fn adjoint(&self, w: &DMatrix<f64>) -> Vec<f64> {
        self.full.iter().map(|g| g.iter().map(|&(a, b, v)| v * w[(b, a)]).sum()).collect()
    }

    /// `M_ij = tr(G_i S⁻¹ G_j Y)`.
    fn schur(&self, sinv: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        let mut slot = vec![usize::MAX; self.n];
        for j in 0..m {
            let mut rows = Vec::new();
            for &(a, _, _) in &self.full[j] {
                if slot[a] == usize::MAX {
                    slot[a] = rows.len();
                    rows.push(a);
                }
            }
            let mut gy = DMatrix::zeros(rows.len(), self.n);
            for &(a, b, v) in &self.full[j] {
                let r = slot[a];
                for k in 0..self.n {
                    gy[(r, k)] += v * y[(b, k)];
                }
            }
            let t = sinv.select_columns(rows.iter()) * gy;
            for &a in &rows {
                slot[a] = usize::MAX;
            }
            for i in j..m {
                let s: f64 = self.full[i].iter().map(|&(a, b, v)| v * t[(b, a)]).sum();
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest `α` with `X + α dX ⪰ 0` (infinite when `dX ⪰ 0`), given the Cholesky factor of `X ≻ 0`.
fn max_step(chol: &Cholesky<f64, Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let a = l.solve_lower_triangular(dx).expect("triangular factor is nonsingular");
    let b = l.solve_lower_triangular(&a.transpose()).expect("triangular factor is nonsingular");
    let lam = sym(&b).symmetric_eigenvalues().min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

enum SchurFactor {
    Cholesky(Cholesky<f64, Dyn>),
    Lu(nalgebra::LU<f64, Dyn, Dyn>),
}

impl SchurFactor {
    fn new(m: &DMatrix<f64>) -> Self {
        match Cholesky::new(m.clone()) {
            Some(ch) => SchurFactor::Cholesky(ch),
            None => SchurFactor::Lu(m.clone().lu()),
        }
    }

    fn raw(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        match self {
            SchurFactor::Cholesky(ch) => Some(ch.solve(rhs)),
            SchurFactor::Lu(lu) => lu.solve(rhs),
        }
    }

    /// Solve followed by two rounds of iterative refinement.
    fn solve(&self, m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let mut x = self.raw(rhs)?;
        for _ in 0..2 {
            let r = rhs - m * &x;
            x += self.raw(&r)?;
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

pub struct Targets {
    pub gap: f64,
    pub residual: f64,
}

pub fn run(red: &Reduced, targets: &Targets, max_iterations: usize) -> IpmResult {
    let lmi = Lmi::new(red);
    let (n, m) = (lmi.n, lmi.m());
    let c = DVector::from_column_slice(&red.c);
    let nf = n as f64;

    let g0_scale = lmi.g0.amax();
    let c_scale = max_abs(red.c.iter().copied());
    let xi = 10.0 * (1.0 + g0_scale);
    let zeta = 10.0 * (1.0 + c_scale);
    let mut z = vec![0.0; m];
    let mut s = DMatrix::identity(n, n) * xi;
    let mut y = DMatrix::identity(n, n) * zeta;
    let mut trace: Vec<Iterate> = Vec::new();
    let mut stalls = 0;
    let mut best: Option<Best> = None;

    let outcome = loop {
        let fz = &lmi.g0 + lmi.apply(&z);
        let rp = &fz - &s;
        let ay = DVector::from_vec(lmi.adjoint(&y));
        let rd = &c - &ay;
        let pobj = red.c0 + c.dot(&DVector::from_column_slice(&z));
        let dobj = red.c0 - inner(&lmi.g0, &y);
        let mu = inner(&s, &y) / nf;
        let pres = rp.amax();
        let dres = if m == 0 { 0.0 } else { rd.amax() };
        let gap = (pobj - dobj).abs();

        if pres <= targets.residual && dres <= targets.residual && gap <= targets.gap * (1.0 + pobj.abs()) {
            trace.push(Iterate { primal_objective: pobj, dual_objective: dobj, primal_residual: pres, dual_residual: dres, mu, primal_step: 0.0, dual_step: 0.0 });
            break Outcome::Converged;
        }
        if let Some(o) = divergence(&lmi, red, &z, &y) {
            trace.push(Iterate { primal_objective: pobj, dual_objective: dobj, primal_residual: pres, dual_residual: dres, mu, primal_step: 0.0, dual_step: 0.0 });
            break o;
        }
        let current = Iterate { primal_objective: pobj, dual_objective: dobj, primal_residual: pres, dual_residual: dres, mu, primal_step: 0.0, dual_step: 0.0 };
        let score = merit(&current, targets);
        match &best {
            Some(b) if score >= b.merit => {
                if trace.len() - b.index >= PLATEAU_LIMIT {
                    break Outcome::Stalled;
                }
            }
            _ => best = Some(Best { merit: score, index: trace.len(), iterate: current, z: z.clone(), y: y.clone() }),
        }
        if trace.len() >= max_iterations {
            break Outcome::MaxIterations;
        }

        let Some(chol_s) = Cholesky::new(s.clone()) else { break Outcome::Stalled };
        let Some(chol_y) = Cholesky::new(y.clone()) else { break Outcome::Stalled };
        let sinv = chol_s.inverse();
        let schur = lmi.schur(&sinv, &y);
        let factor = SchurFactor::new(&schur);
        let rpy = &rp * &y;

        let direction = |sigma_mu: f64, corr: Option<&DMatrix<f64>>| -> Option<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
            let mut extra = rpy.clone();
            if let Some(cm) = corr {
                extra += cm;
            }
            let w = &sinv * sigma_mu - &y - &sinv * &extra;
            let rhs = DVector::from_vec(lmi.adjoint(&w)) - &rd;
            let dz = factor.solve(&schur, &rhs)?;
            let dz: Vec<f64> = dz.iter().copied().collect();
            let ds = &rp + lmi.apply(&dz);
            let mut tail = &ds * &y;
            if let Some(cm) = corr {
                tail += cm;
            }
            let dy = sym(&(&sinv * sigma_mu - &y - &sinv * tail));
            Some((dz, ds, dy))
        };

        let Some((_, ds_a, dy_a)) = direction(0.0, None) else { break Outcome::Stalled };
        let ap_a = max_step(&chol_s, &ds_a).min(1.0);
        let ad_a = max_step(&chol_y, &dy_a).min(1.0);
        let mu_a = inner(&(&s + &ds_a * ap_a), &(&y + &dy_a * ad_a)) / nf;
        let sigma = if mu > 0.0 { (mu_a / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };
        let corr = &ds_a * &dy_a;
        let Some((dz, ds, dy)) = direction(sigma * mu, Some(&corr)) else { break Outcome::Stalled };
        let ap = (STEP_FRACTION * max_step(&chol_s, &ds)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&chol_y, &dy)).min(1.0);

        for (zj, dzj) in z.iter_mut().zip(&dz) {
            *zj += ap * dzj;
        }
        s = sym(&(&s + &ds * ap));
        y = sym(&(&y + &dy * ad));
        trace.push(Iterate { primal_objective: pobj, dual_objective: dobj, primal_residual: pres, dual_residual: dres, mu, primal_step: ap, dual_step: ad });

        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                break Outcome::Stalled;
            }
        } else {
            stalls = 0;
        }
    };
    let mut returned = trace.len().saturating_sub(1);
    if !matches!(outcome, Outcome::Converged | Outcome::PrimalInfeasible | Outcome::Unbounded) {
        if let Some(b) = best {
            if b.index == trace.len() {
                trace.push(b.iterate);
            }
            z = b.z;
            y = b.y;
            returned = b.index;
        }
    }
    IpmResult { z, y, outcome, trace, returned }
}

fn divergence(lmi: &Lmi, red: &Reduced, z: &[f64], y: &DMatrix<f64>) -> Option<Outcome> {
    let tr = y.trace();
    if tr > DIVERGENCE_THRESHOLD {
        let yhat = y / tr;
        let a = max_abs(lmi.adjoint(&yhat));
        if a <= CERTIFICATE_TOL && inner(&lmi.g0, &yhat) < -CERTIFICATE_TOL {
            return Some(Outcome::PrimalInfeasible);
        }
    }
    let zn = max_abs(z.iter().copied());
    if zn > DIVERGENCE_THRESHOLD {
        let zhat: Vec<f64> = z.iter().map(|v| v / zn).collect();
        let descent: f64 = red.c.iter().zip(&zhat).map(|(a, b)| a * b).sum();
        if descent < -CERTIFICATE_TOL {
            let dir = lmi.apply(&zhat);
            if dir.symmetric_eigenvalues().min() >= -CERTIFICATE_TOL {
                return Some(Outcome::Unbounded);
            }
        }
    }
    None
}
