use rayon::prelude::*;

use super::moment::{MomentConstraint, MomentProblem};
use super::word::{OperatorWord, Symbol};
use super::NpaError;
use crate::qcore::{c, identity, kron, trace, trace_out_second, CMatrix, JointState, MeasurementModel, SideModel};
use crate::Trust;

/// Numeric moment matrix; entry `(k, l)` is the block `rows k·b.., cols l·b..`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericGamma {
    pub block: usize,
    pub matrix: CMatrix,
}

impl NumericGamma {
    pub fn entry(&self, k: usize, l: usize) -> CMatrix {
        let b = self.block;
        self.matrix.view((k * b, l * b), (b, b)).into_owned()
    }

    /// Largest violation of any symbolic relation of `problem`.
    pub fn constraint_violation(&self, problem: &MomentProblem) -> f64 {
        let diff = |a: &CMatrix, b: &CMatrix| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        problem
            .constraints
            .iter()
            .map(|con| match *con {
                MomentConstraint::Equal { first, second } => diff(&self.entry(first.0, first.1), &self.entry(second.0, second.1)),
                MomentConstraint::Adjoint { first, second } => {
                    diff(&self.entry(first.0, first.1), &self.entry(second.0, second.1).adjoint())
                }
                MomentConstraint::SelfAdjoint { at } => {
                    let e = self.entry(at.0, at.1);
                    diff(&e, &e.adjoint())
                }
                MomentConstraint::Normalization => (trace(&self.entry(0, 0)) - c(1.0, 0.0)).norm(),
            })
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn side_operator(side: &SideModel, s: Symbol) -> CMatrix {
    if s.is_projector() {
        side.projector(s.setting(), 0)
    } else {
        side.observable(s.setting())
    }
}

/// Operator of `word` on the full space the model acts on (A ⊗ B).
fn word_operator(word: &OperatorWord, model: &MeasurementModel, trust: Trust) -> Result<CMatrix, NpaError> {
    let (da, db) = model.dims();
    let mut a = identity(da);
    let mut b = identity(db);
    for &s in word.symbols() {
        if s.alphabet() != trust {
            return Err(NpaError::MixedAlphabet);
        }
        match s {
            Symbol::ZA | Symbol::XA => {
                let alice = model.alice.as_ref().ok_or(NpaError::ModelMismatch("model has no Alice devices".into()))?;
                a *= side_operator(alice, s);
            }
            _ => b *= side_operator(&model.bob, s),
        }
    }
    Ok(kron(&a, &b))
}

fn check_dims(model: &MeasurementModel, state: &JointState, trust: Trust) -> Result<(), NpaError> {
    if trust == Trust::DeviceIndependent && model.alice.is_none() {
        return Err(NpaError::ModelMismatch("device-independent moments need Alice's devices".into()));
    }
    if state.dims() != model.dims() {
        return Err(NpaError::ModelMismatch(format!("state dims {:?} vs model dims {:?}", state.dims(), model.dims())));
    }
    Ok(())
}

/// Moment of a single word: `tr_B((𝟙 ⊗ W) ρ)` (2×2) for one-sided words, `tr(W ρ)` (1×1) otherwise.
pub fn moment_value(model: &MeasurementModel, state: &JointState, word: &OperatorWord, trust: Trust) -> Result<CMatrix, NpaError> {
    check_dims(model, state, trust)?;
    let w = word_operator(word, model, trust)?;
    Ok(reduce(&(w * state.matrix()), state, trust))
}

fn reduce(m: &CMatrix, state: &JointState, trust: Trust) -> CMatrix {
    match trust {
        Trust::OneSided => trace_out_second(m, 2, state.dims().1),
        Trust::DeviceIndependent => CMatrix::from_element(1, 1, trace(m)),
    }
}

/// `Γ_{kl} = tr_B(ℰ_l† ℰ_k ρ)` computed from explicit operator products.
pub fn instantiate_gamma(
    model: &MeasurementModel,
    state: &JointState,
    words: &[OperatorWord],
    trust: Trust,
) -> Result<NumericGamma, NpaError> {
    check_dims(model, state, trust)?;
    let ops: Vec<CMatrix> = words.iter().map(|w| word_operator(w, model, trust)).collect::<Result<_, _>>()?;
    let b = if trust == Trust::OneSided { 2 } else { 1 };
    let n = words.len();
    let blocks: Vec<CMatrix> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            reduce(&(ops[l].adjoint() * &ops[k] * state.matrix()), state, trust)
        })
        .collect();
    let mut matrix = CMatrix::zeros(n * b, n * b);
    for (idx, blk) in blocks.iter().enumerate() {
        let (k, l) = (idx / n, idx % n);
        matrix.view_mut((k * b, l * b), (b, b)).copy_from(blk);
    }
    Ok(NumericGamma { block: b, matrix })
}
