use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::{fidelity_bound, FidelityCertificate};
use super::{default_alpha, AlphaSource, CertError, CertificateParams};
use crate::{Inequality, Trust};

/// Search range of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Range {
    Fixed(f64),
    Between(f64, f64),
}

impl Range {
    fn bounds(self) -> (f64, f64) {
        match self {
            Range::Fixed(v) => (v, v),
            Range::Between(a, b) => (a.min(b), a.max(b)),
        }
    }

    /// Log-spaced grid (or the single fixed value).
    fn grid(self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.bounds();
        if lo == hi || points < 2 {
            return vec![lo];
        }
        let (a, b) = (lo.ln(), hi.ln());
        (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanBounds {
    pub epsilon: Range,
    pub q: Range,
    pub x: Range,
    pub max_copies: Option<u64>,
}

impl Default for PlanBounds {
    fn default() -> Self {
        PlanBounds { epsilon: Range::Between(1e-4, 0.999), q: Range::Between(1.0, 1e4), x: Range::Fixed(1.0), max_copies: None }
    }
}

/// The requirement that could not be met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binding {
    Fidelity,
    Probability,
    Copies,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binding::Fidelity => "fidelity",
            Binding::Probability => "probability",
            Binding::Copies => "copies",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub params: CertificateParams,
    pub certificate: FidelityCertificate,
    pub target_fidelity: f64,
    pub target_probability: f64,
    /// Candidate (ε, x) pairs evaluated.
    pub evaluated: usize,
}

const GRID_POINTS: usize = 48;
const REFINE_POINTS: usize = 24;
const REFINE_ROUNDS: usize = 3;
const BISECTION_STEPS: usize = 200;

#[derive(Clone, Copy)]
enum Candidate {
    Found { copies: u64, epsilon: f64, x: f64, q: f64 },
    Failed { binding: Binding, best_fidelity: f64, best_probability: f64, copies: Option<u64> },
}

struct Setting {
    trust: Trust,
    inequality: Inequality,
    iid: bool,
    alpha: f64,
    source: AlphaSource,
}

impl Setting {
    fn params(&self, epsilon: f64, q: f64, x: f64) -> CertificateParams {
        CertificateParams {
            trust: self.trust,
            inequality: self.inequality,
            iid: self.iid,
            epsilon,
            q,
            x,
            alpha: self.alpha,
            alpha_source: self.source,
        }
    }

    fn certificate(&self, epsilon: f64, q: f64, x: f64) -> FidelityCertificate {
        fidelity_bound(&self.params(epsilon, q, x)).expect("search stays inside the valid region")
    }
}

/// Smallest `q` meeting both targets at fixed `(ε, x)`; both bounds are non-decreasing in `q`.
fn solve_q(s: &Setting, epsilon: f64, x: f64, q_range: Range, tf: f64, tp: f64, max_copies: Option<u64>) -> Candidate {
    let (lo, hi) = q_range.bounds();
    let ok = |c: &FidelityCertificate| c.fidelity >= tf && c.probability >= tp;
    let at_hi = s.certificate(epsilon, hi, x);
    if !ok(&at_hi) {
        let binding = if at_hi.fidelity < tf { Binding::Fidelity } else { Binding::Probability };
        return Candidate::Failed { binding, best_fidelity: at_hi.fidelity, best_probability: at_hi.probability, copies: None };
    }
    let q = if ok(&s.certificate(epsilon, lo, x)) {
        lo
    } else {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if ok(&s.certificate(epsilon, m, x)) {
                b = m;
            } else {
                a = m;
            }
        }
        b
    };
    let cert = s.certificate(epsilon, q, x);
    match max_copies {
        Some(cap) if cert.copies > cap => Candidate::Failed {
            binding: Binding::Copies,
            best_fidelity: cert.fidelity,
            best_probability: cert.probability,
            copies: Some(cert.copies),
        },
        _ => Candidate::Found { copies: cert.copies, epsilon, x, q },
    }
}

fn key(c: &Candidate) -> Option<(u64, f64, f64, f64)> {
    match *c {
        Candidate::Found { copies, epsilon, x, q } => Some((copies, epsilon, x, q)),
        Candidate::Failed { .. } => None,
    }
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    match (key(&a), key(&b)) {
        (Some(ka), Some(kb)) => {
            let ord = ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2)).then(ka.3.total_cmp(&kb.3));
            if ord.is_le() {
                a
            } else {
                b
            }
        }
        (Some(_), None) => a,
        (None, Some(_)) => b,
        (None, None) => {
            // Prefer the failure closest to success: copies > probability > fidelity.
            let rank = |c: &Candidate| match c {
                Candidate::Failed { binding: Binding::Copies, copies, .. } => (2, -(copies.unwrap_or(u64::MAX) as f64)),
                Candidate::Failed { binding: Binding::Probability, best_probability, .. } => (1, *best_probability),
                Candidate::Failed { best_fidelity, .. } => (0, *best_fidelity),
                Candidate::Found { .. } => unreachable!(),
            };
            let (ra, rb) = (rank(&a), rank(&b));
            if ra.0 > rb.0 || (ra.0 == rb.0 && ra.1 >= rb.1) {
                a
            } else {
                b
            }
        }
    }
}

fn search(s: &Setting, eps: &[f64], xs: &[f64], bounds: &PlanBounds, tf: f64, tp: f64) -> Candidate {
    let pairs: Vec<(f64, f64)> = eps.iter().flat_map(|&e| xs.iter().map(move |&x| (e, x))).collect();
    pairs
        .par_iter()
        .map(|&(e, x)| solve_q(s, e, x, bounds.q, tf, tp, bounds.max_copies))
        .reduce_with(better)
        .expect("non-empty grid")
}

/// Neighborhood of `v` in `grid`, clamped to `range`.
fn around(v: f64, grid: &[f64], range: Range) -> Range {
    if let Range::Fixed(_) = range {
        return range;
    }
    let i = grid.iter().position(|&g| g == v).unwrap_or(0);
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    Range::Between(lo, hi)
}

fn validate_range(name: &'static str, r: Range, ok: impl Fn(f64) -> bool) -> Result<(), CertError> {
    let (a, b) = r.bounds();
    for v in [a, b] {
        if !ok(v) {
            return Err(CertError::Parameter { name, value: v, reason: "outside the valid parameter region" });
        }
    }
    Ok(())
}

/// Parameters minimizing the copy count such that the certificate reaches `target_fidelity`
/// with probability at least `target_probability`. Grid search over `(ε, x)` with local
/// refinement; the smallest admissible `q` is found by bisection.
#[allow(clippy::too_many_arguments)]
pub fn plan(
    target_fidelity: f64,
    target_probability: f64,
    trust: Trust,
    inequality: Inequality,
    iid: bool,
    alpha: Option<(f64, AlphaSource)>,
    bounds: &PlanBounds,
) -> Result<Plan, CertError> {
    if !(target_fidelity > 0.0 && target_fidelity < 1.0) {
        return Err(CertError::Parameter { name: "target_fidelity", value: target_fidelity, reason: "must lie in (0, 1)" });
    }
    if !(0.0..1.0).contains(&target_probability) {
        return Err(CertError::Parameter { name: "target_probability", value: target_probability, reason: "must lie in [0, 1)" });
    }
    let (alpha, source) = match alpha {
        Some(a) => a,
        None => (default_alpha(trust, inequality).ok_or(CertError::Unsupported)?, AlphaSource::PaperDefault),
    };
    let s = Setting { trust, inequality, iid, alpha, source };
    s.params(0.5, 1.0, 1.0).validate()?;
    validate_range("epsilon", bounds.epsilon, |v| v > 0.0 && v < 1.0)?;
    validate_range("q", bounds.q, |v| (1.0..f64::INFINITY).contains(&v))?;
    validate_range("x", bounds.x, |v| v > 0.0 && v.is_finite())?;

    let (mut er, mut xr) = (bounds.epsilon, bounds.x);
    let mut eg = er.grid(GRID_POINTS);
    let mut xg = xr.grid(GRID_POINTS / 3);
    let mut evaluated = eg.len() * xg.len();
    let mut best = search(&s, &eg, &xg, bounds, target_fidelity, target_probability);
    for _ in 0..REFINE_ROUNDS {
        let Candidate::Found { epsilon, x, .. } = best else { break };
        er = around(epsilon, &eg, er);
        xr = around(x, &xg, xr);
        eg = er.grid(REFINE_POINTS);
        xg = xr.grid(REFINE_POINTS / 2);
        evaluated += eg.len() * xg.len();
        best = better(best, search(&s, &eg, &xg, bounds, target_fidelity, target_probability));
    }
    match best {
        Candidate::Found { epsilon, x, q, .. } => {
            let params = s.params(epsilon, q, x);
            let certificate = fidelity_bound(&params)?;
            debug_assert!(certificate.fidelity >= target_fidelity && certificate.probability >= target_probability);
            Ok(Plan { params, certificate, target_fidelity, target_probability, evaluated })
        }
        Candidate::Failed { binding, best_fidelity, best_probability, copies } => {
            let detail = match binding {
                Binding::Fidelity => format!(
                    "best certifiable fidelity {best_fidelity:.6} in the search region is below the target {target_fidelity}"
                ),
                Binding::Probability => format!(
                    "best success probability {best_probability:.6} in the search region is below the target {target_probability}"
                ),
                Binding::Copies => format!(
                    "targets need at least {} copies, above the cap {}",
                    copies.unwrap_or(u64::MAX),
                    bounds.max_copies.unwrap_or(u64::MAX)
                ),
            };
            Err(CertError::Infeasible { binding, detail })
        }
    }
}

/// Largest `ε` admitting a plan, searched on a fine grid and refined by bisection.
pub fn max_epsilon(
    target_fidelity: f64,
    target_probability: f64,
    trust: Trust,
    inequality: Inequality,
    iid: bool,
    bounds: &PlanBounds,
) -> Result<f64, CertError> {
    let feasible = |e: f64| {
        let b = PlanBounds { epsilon: Range::Fixed(e), ..*bounds };
        plan(target_fidelity, target_probability, trust, inequality, iid, None, &b).is_ok()
    };
    let grid = bounds.epsilon.grid(400);
    let Some(i) = grid.iter().rposition(|&e| feasible(e)) else {
        return plan(target_fidelity, target_probability, trust, inequality, iid, None, bounds).map(|p| p.params.epsilon);
    };
    if i + 1 == grid.len() {
        return Ok(grid[i]);
    }
    let (mut a, mut b) = (grid[i], grid[i + 1]);
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if feasible(m) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(a)
}

/// Smallest Werner visibility `v` whose ideal violation `v · max` is certifiable at the
/// targets: `v = 1 − ε_max / max`.
pub fn min_werner_visibility(
    target_fidelity: f64,
    trust: Trust,
    inequality: Inequality,
    iid: bool,
    bounds: &PlanBounds,
) -> Result<f64, CertError> {
    let e = max_epsilon(target_fidelity, 0.0, trust, inequality, iid, bounds)?;
    Ok(1.0 - e / inequality.max_value())
}
