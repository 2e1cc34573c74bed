//! Real embedding `H = A + iB ↦ [[A, −B], [B, A]]` of the complex moment matrix.

use nalgebra::DMatrix;

use super::functional::Functional;
use super::moment::{MomentConstraint, MomentProblem};
use crate::qcore::CMatrix;
use crate::sdp::{LinearForm, SdpConstraint, SdpInstance, SparseSym};

/// Real symmetric embedding of a Hermitian matrix.
pub fn realify(h: &CMatrix) -> DMatrix<f64> {
    let m = h.nrows();
    let mut x = DMatrix::zeros(2 * m, 2 * m);
    for p in 0..m {
        for q in 0..m {
            let z = h[(p, q)];
            x[(p, q)] = z.re;
            x[(p + m, q + m)] = z.re;
            x[(p + m, q)] = z.im;
            x[(p, q + m)] = -z.im;
        }
    }
    x
}

struct Embedding {
    m: usize,
    b: usize,
}

impl Embedding {
    /// Real coordinate of `Re Γ[p, q]`.
    fn re(&self, p: usize, q: usize) -> (usize, usize) {
        (p, q)
    }

    /// Real coordinate of `Im Γ[p, q]`.
    fn im(&self, p: usize, q: usize) -> (usize, usize) {
        (p + self.m, q)
    }

    fn scalar(&self, pos: (usize, usize), a: usize, ap: usize) -> (usize, usize) {
        (pos.0 * self.b + a, pos.1 * self.b + ap)
    }
}

fn relation(terms: &[((usize, usize), f64)], rhs: f64) -> SdpConstraint {
    let mut f = LinearForm::new();
    for &((i, j), c) in terms {
        f.add(i, j, c);
    }
    SdpConstraint { matrix: f.build(), rhs }
}

fn functional_matrix(problem: &MomentProblem, e: &Embedding, functional: &Functional) -> SparseSym {
    let mut f = LinearForm::new();
    for t in &functional.terms {
        let pos = problem.position_of(&t.word).expect("checked at build time");
        let (p, q) = e.scalar(pos, t.row, t.col);
        let (i, j) = e.re(p, q);
        f.add(i, j, t.coeff);
    }
    f.build()
}

/// `min tr(PΓ)` subject to `Γ ⪰ 0`, the embedding structure, normalization, every moment
/// relation and `tr(QΓ) = w`, all on the real embedding of Γ.
pub fn to_sdp_instance(problem: &MomentProblem) -> SdpInstance {
    let b = problem.block();
    let m = problem.size() * b;
    let e = Embedding { m, b };
    let mut cons = Vec::new();

    for p in 0..m {
        for q in p..m {
            cons.push(relation(&[((p, q), 1.0), ((p + m, q + m), -1.0)], 0.0));
        }
    }
    for p in 0..m {
        for q in p + 1..m {
            cons.push(relation(&[((p + m, q), 1.0), ((q + m, p), 1.0)], 0.0));
        }
        cons.push(relation(&[((p + m, p), 1.0)], 0.0));
    }

    for c in &problem.constraints {
        match *c {
            MomentConstraint::Normalization => {
                let terms: Vec<_> = (0..b).map(|a| (e.re(a, a), 1.0)).collect();
                cons.push(relation(&terms, 1.0));
            }
            MomentConstraint::Equal { first, second } => {
                for a in 0..b {
                    for ap in 0..b {
                        let (p, q) = e.scalar(first, a, ap);
                        let (pp, qq) = e.scalar(second, a, ap);
                        cons.push(relation(&[(e.re(p, q), 1.0), (e.re(pp, qq), -1.0)], 0.0));
                        cons.push(relation(&[(e.im(p, q), 1.0), (e.im(pp, qq), -1.0)], 0.0));
                    }
                }
            }
            MomentConstraint::Adjoint { first, second } => {
                for a in 0..b {
                    for ap in 0..b {
                        let (p, q) = e.scalar(first, a, ap);
                        let (pp, qq) = e.scalar(second, ap, a);
                        cons.push(relation(&[(e.re(p, q), 1.0), (e.re(pp, qq), -1.0)], 0.0));
                        cons.push(relation(&[(e.im(p, q), 1.0), (e.im(pp, qq), 1.0)], 0.0));
                    }
                }
            }
            MomentConstraint::SelfAdjoint { at } => {
                for a in 0..b {
                    let (p, q) = e.scalar(at, a, a);
                    cons.push(relation(&[(e.im(p, q), 1.0)], 0.0));
                    for ap in a + 1..b {
                        let (p, q) = e.scalar(at, a, ap);
                        let (pp, qq) = e.scalar(at, ap, a);
                        cons.push(relation(&[(e.re(p, q), 1.0), (e.re(pp, qq), -1.0)], 0.0));
                        cons.push(relation(&[(e.im(p, q), 1.0), (e.im(pp, qq), 1.0)], 0.0));
                    }
                }
            }
        }
    }

    cons.push(SdpConstraint {
        matrix: functional_matrix(problem, &e, &problem.inequality_functional),
        rhs: problem.violation,
    });
    let objective = functional_matrix(problem, &e, &problem.objective_functional);
    SdpInstance { dim: 2 * m, objective, constraints: cons }
}
