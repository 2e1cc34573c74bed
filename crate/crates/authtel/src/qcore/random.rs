//! Random states and measurement models for property tests and adversarial sources.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, pauli_x, pauli_z, CMatrix, CVector, JointState, MeasurementModel, SideModel, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unit vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / c(n, 0.0)
}

pub fn random_pure_state<R: Rng + ?Sized>(dims: (usize, usize), rng: &mut R) -> JointState {
    let psi = random_vector(dims.0 * dims.1, rng);
    JointState::pure(&psi, dims).expect("Gaussian vector is non-zero")
}

/// Mixed state of the given rank from a partial trace of a random purification.
pub fn random_mixed_state<R: Rng + ?Sized>(dims: (usize, usize), rank: usize, rng: &mut R) -> JointState {
    let n = dims.0 * dims.1;
    let g = CMatrix::from_fn(n, rank.max(1), |_, _| gaussian(rng));
    let rho = &g * g.adjoint();
    let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
    JointState::new(rho / c(tr, 0.0), dims).expect("Wishart matrix is a valid state")
}

/// Haar unitary via QR of a Ginibre matrix with the phase fix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Projector of rank uniform in `1..dim` (rank 1 for qubits).
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let rank = if dim <= 2 { 1 } else { rng.random_range(1..dim) };
    let u = random_unitary(dim, rng);
    let cols = u.columns(0, rank).into_owned();
    &cols * cols.adjoint()
}

pub fn random_side_model<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SideModel {
    SideModel::new([random_projector(dim, rng), random_projector(dim, rng)]).expect("random projectors are valid")
}

pub fn random_one_sided_model<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> MeasurementModel {
    MeasurementModel::one_sided(random_side_model(dim, rng))
}

pub fn random_di_model<R: Rng + ?Sized>(dims: (usize, usize), rng: &mut R) -> MeasurementModel {
    MeasurementModel::device_independent(random_side_model(dims.0, rng), random_side_model(dims.1, rng))
}

/// `n·σ` for a uniformly random unit vector `n`.
pub fn random_qubit_observable<R: Rng + ?Sized>(rng: &mut R) -> CMatrix {
    let (x, y, z): (f64, f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
    let n = (x * x + y * y + z * z).sqrt();
    let sy = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    pauli_x() * c(x / n, 0.0) + sy * c(y / n, 0.0) + pauli_z() * c(z / n, 0.0)
}
