use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{c, identity, kron, pauli_x, pauli_z, bell_vector, CMatrix, CVector, TwoQubitState, C64};

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Haar-random qubit from normalized complex Gaussians.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> CVector {
    let mut g = || c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let v = CVector::from_vec(vec![g(), g()]);
    let n = v.norm();
    v / c(n, 0.0)
}

/// Corrections `σ_m ∈ {𝟙, X, Z, XZ}`; outcome `m` projects C ⊗ A onto `(σ_m ⊗ 𝟙)|Φ⁺⟩`.
fn corrections() -> [CMatrix; 4] {
    [identity(2), pauli_x(), pauli_z(), pauli_x() * pauli_z()]
}

/// Teleports `n_inputs` Haar-random qubits through `resource` (A with Alice, B with Bob) using a
/// four-outcome Bell measurement on the input and A followed by Bob's Pauli correction.
pub fn teleport_average_fidelity<R: Rng + ?Sized>(resource: &TwoQubitState, n_inputs: usize, rng: &mut R) -> TeleportEstimate {
    let n = n_inputs.max(1);
    let phi_plus = bell_vector();
    let sigmas = corrections();
    let bell_basis: Vec<CVector> = sigmas.iter().map(|s| kron(s, &identity(2)) * &phi_plus).collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let input = haar_qubit(rng);
        let total = kron(&(&input * input.adjoint()), resource.matrix());
        let mut branches: Vec<(f64, CMatrix)> = Vec::with_capacity(4);
        for basis in &bell_basis {
            let mut bob = CMatrix::zeros(2, 2);
            for b in 0..2 {
                for bp in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..4 {
                        for j in 0..4 {
                            s += basis[i].conj() * total[(2 * i + b, 2 * j + bp)] * basis[j];
                        }
                    }
                    bob[(b, bp)] = s;
                }
            }
            let p = (bob[(0, 0)] + bob[(1, 1)]).re.max(0.0);
            branches.push((p, bob));
        }
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = 3;
        for (m, (p, _)) in branches.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = m;
                break;
            }
        }
        let (p, bob) = &branches[chosen];
        let out = &sigmas[chosen] * bob * sigmas[chosen].adjoint();
        let f = ((input.adjoint() * out * &input)[(0, 0)].re / p).clamp(0.0, 1.0);
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / n as f64;
    let var = if n > 1 { ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0) } else { 0.0 };
    TeleportEstimate { mean, std_error: (var / n as f64).sqrt(), samples: n }
}
