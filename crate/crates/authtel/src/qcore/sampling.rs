use rand::Rng;

use super::{identity, kron, trace, CMatrix, JointState, Observable, QcoreError, TwoQubitState};

/// Born-rule distribution of a joint ±1 measurement, indexed `[a][b]` with 0 ↔ +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTable {
    pub probs: [[f64; 2]; 2],
}

impl OutcomeTable {
    /// `alice_plus` and `bob_plus` are the projectors onto the +1 outcomes.
    pub fn new(state: &JointState, alice_plus: &CMatrix, bob_plus: &CMatrix) -> Result<Self, QcoreError> {
        let (da, db) = state.dims();
        if alice_plus.nrows() != da {
            return Err(QcoreError::DimensionMismatch { expected: da, found: alice_plus.nrows() });
        }
        if bob_plus.nrows() != db {
            return Err(QcoreError::DimensionMismatch { expected: db, found: bob_plus.nrows() });
        }
        let pa = [alice_plus.clone(), identity(da) - alice_plus];
        let pb = [bob_plus.clone(), identity(db) - bob_plus];
        let mut probs = [[0.0; 2]; 2];
        for (i, a) in pa.iter().enumerate() {
            for (j, b) in pb.iter().enumerate() {
                probs[i][j] = trace(&(kron(a, b) * state.matrix())).re.max(0.0);
            }
        }
        let total: f64 = probs.iter().flatten().sum();
        for row in probs.iter_mut() {
            for p in row.iter_mut() {
                *p /= total;
            }
        }
        Ok(OutcomeTable { probs })
    }

    /// `E[a·b]`.
    pub fn correlation(&self) -> f64 {
        self.probs[0][0] + self.probs[1][1] - self.probs[0][1] - self.probs[1][0]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (i8, i8) {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += self.probs[i][j];
                if u < acc {
                    return (sign(i), sign(j));
                }
            }
        }
        (-1, -1)
    }
}

fn sign(idx: usize) -> i8 {
    if idx == 0 {
        1
    } else {
        -1
    }
}

/// One measurement round of `a ⊗ b` on `rho`.
pub fn sample_round<R: Rng + ?Sized>(rho: &TwoQubitState, a: &Observable, b: &Observable, rng: &mut R) -> (i8, i8) {
    OutcomeTable::new(&rho.to_joint(), &a.plus_projector(), &b.plus_projector())
        .expect("two-qubit dimensions agree")
        .sample(rng)
}
