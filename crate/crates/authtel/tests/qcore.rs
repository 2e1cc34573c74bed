use authtel::qcore::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hermitian_psd_unit_trace(m: &CMatrix) -> bool {
    let herm = max_abs_diff(m, &m.adjoint()) < 1e-12;
    let tr = (trace(m).re - 1.0).abs() < 1e-12;
    let min = m.clone().symmetric_eigenvalues().min();
    herm && tr && min > -1e-12
}

#[test]
fn werner_family_values() {
    for v in [0.0, 0.3, 0.7, 0.9, 1.0] {
        let rho = werner_state(v).unwrap();
        assert!((fidelity_to_pure(&rho, &bell_vector()) - (1.0 + 3.0 * v) / 4.0).abs() < 1e-12);
        assert!((steering_value(&rho) - 2.0 * v).abs() < 1e-12);
        assert!((chsh_value(&rho, &ChshSettings::optimal()) - 2.0 * 2f64.sqrt() * v).abs() < 1e-12);
    }
    assert!(werner_state(1.2).is_err());
}

#[test]
fn ideal_extraction_returns_the_bell_pair() {
    let extracted = swap_isometry_extract(&bell_state().to_joint(), &MeasurementModel::ideal_one_sided(), Extraction::Bob).unwrap();
    assert!((fidelity_to_pure(&extracted, &bell_vector()) - 1.0).abs() < 1e-12);

    // An embedding of Bob's qubit into a larger space with matching projectors changes nothing.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let u = random::random_unitary(3, &mut rng);
    let embed = CMatrix::from_fn(3, 2, |i, j| u[(i, j)]);
    let psi = kron(&identity(2), &embed) * bell_vector();
    let state = JointState::pure(&psi, (2, 3)).unwrap();
    let ideal = SideModel::ideal_qubit();
    let lift = |p: &CMatrix| &embed * p * embed.adjoint();
    let bob = SideModel::new([lift(&ideal.projector(0, 0)), lift(&ideal.projector(1, 0))]).unwrap();
    let extracted = swap_isometry_extract(&state, &MeasurementModel::one_sided(bob), Extraction::Bob).unwrap();
    assert!((fidelity_to_pure(&extracted, &bell_vector()) - 1.0).abs() < 1e-12);
}

#[test]
fn teleportation_through_werner_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for v in [0.0, 0.5, 1.0] {
        // Bloch-vector shrinking by v: F = (1 + v)/2 for every input.
        let est = teleport_average_fidelity(&werner_state(v).unwrap(), 500, &mut rng);
        assert!((est.mean - (1.0 + v) / 2.0).abs() < 1e-10, "{v}: {}", est.mean);
    }
    // The maximally mixed resource outputs the maximally mixed qubit.
    let est = teleport_average_fidelity(&maximally_mixed(), 500, &mut rng);
    assert!((est.mean - 0.5).abs() < 1e-10);
}

#[test]
fn sampled_correlations_converge() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = werner_state(0.8).unwrap();
    let (a, b) = (Observable::x(), Observable::x());
    let n = 40_000;
    let sum: f64 = (0..n).map(|_| {
        let (x, y) = sample_round(&rho, &a, &b, &mut rng);
        f64::from(x * y)
    }).sum();
    let expected = correlation(&rho, &a, &b);
    let sigma = ((1.0 - expected * expected) / n as f64).sqrt();
    assert!((sum / n as f64 - expected).abs() < 4.0 * sigma);
}

#[test]
fn document_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let state = random::random_mixed_state((2, 3), 2, &mut rng);
    let back = QcoreDocument::from_json(&state.to_document().to_json()).unwrap().joint_state().unwrap();
    assert!(max_abs_diff(back.matrix(), state.matrix()) < 1e-15);
    assert!(QcoreDocument::from_json(r#"{"schema":"other/9"}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_states_are_density_matrices(seed: u64, da in 2usize..4, db in 2usize..4, rank in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::random_mixed_state((da, db), rank.min(da * db), &mut rng);
        prop_assert!(hermitian_psd_unit_trace(rho.matrix()));
        let pure = random::random_pure_state((da, db), &mut rng);
        prop_assert!(hermitian_psd_unit_trace(pure.matrix()));
        prop_assert!((trace(&(pure.matrix() * pure.matrix())).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extraction_yields_a_state(seed: u64, d in 2usize..4, di: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (state, model, side) = if di {
            let dims = (d, 5 - d);
            (random::random_mixed_state(dims, 2, &mut rng), random::random_di_model(dims, &mut rng), Extraction::Both)
        } else {
            (random::random_mixed_state((2, d), 2, &mut rng), random::random_one_sided_model(d, &mut rng), Extraction::Bob)
        };
        let out = swap_isometry_extract(&state, &model, side).unwrap();
        prop_assert!(hermitian_psd_unit_trace(out.matrix()));
    }

    #[test]
    fn assemblages_do_not_signal(seed: u64, d in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = random::random_mixed_state((2, d), 3, &mut rng);
        let model = random::random_one_sided_model(d, &mut rng);
        let a = Assemblage::new(&state, &model.bob).unwrap();
        prop_assert!(a.is_valid());
    }
}
