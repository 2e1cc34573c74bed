use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::qcore::{bell_state, random, rotated_bell_vector, werner_state, CMatrix, JointState, MeasurementModel};
use crate::{Inequality, Trust};

#[test]
fn ideal_models_give_unit_fidelity_and_maximal_violation() {
    let cases = [
        (Trust::OneSided, Inequality::Steering, 2.0),
        (Trust::OneSided, Inequality::Chsh, 2.0 * 2f64.sqrt()),
        (Trust::DeviceIndependent, Inequality::Chsh, 2.0 * 2f64.sqrt()),
    ];
    for (trust, ineq, max) in cases {
        let (state, model) = match trust {
            Trust::OneSided => (bell_state().to_joint(), MeasurementModel::ideal_one_sided()),
            Trust::DeviceIndependent => (
                JointState::pure(&rotated_bell_vector(), (2, 2)).unwrap(),
                MeasurementModel::ideal_device_independent(),
            ),
        };
        let words = default_words(trust);
        let gamma = instantiate_gamma(&model, &state, &words, trust).unwrap();
        for &obj in Objective::for_trust(trust) {
            let problem = build_moment_problem(trust, &words, obj, ineq, max).unwrap();
            let inst = to_sdp_instance(&problem);
            let x = realify(&gamma.matrix);
            assert!((inst.objective_value(&x) - 1.0).abs() < 1e-12, "{trust} {obj}");
            assert!(inst.max_residual(&x) < 1e-12, "{trust} {obj} residual {}", inst.max_residual(&x));
        }
    }
}

#[test]
fn werner_purification_state_fidelity() {
    let v = 0.71;
    let rho = werner_state(v).unwrap();
    // Purification on A ⊗ (B ⊗ R) with Bob's ideal Paulis acting on B.
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut psi = crate::qcore::CVector::zeros(16);
    for k in 0..4 {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        for idx in 0..4 {
            psi[(idx / 2) * 8 + (idx % 2) * 4 + k] += eig.eigenvectors[(idx, k)] * crate::qcore::c(lam, 0.0);
        }
    }
    let state = JointState::pure(&psi, (2, 8)).unwrap();
    let lift = |p: CMatrix| crate::qcore::kron(&p, &crate::qcore::identity(4));
    let ideal = crate::qcore::SideModel::ideal_qubit();
    let bob = crate::qcore::SideModel::new([lift(ideal.projector(0, 0)), lift(ideal.projector(1, 0))]).unwrap();
    let model = MeasurementModel::one_sided(bob);
    let words = default_words(Trust::OneSided);
    let problem = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 2.0 * v).unwrap();
    let gamma = instantiate_gamma(&model, &state, &words, Trust::OneSided).unwrap();
    let inst = to_sdp_instance(&problem);
    let x = realify(&gamma.matrix);
    assert!((inst.objective_value(&x) - (1.0 + 3.0 * v) / 4.0).abs() < 1e-12);
    assert!(inst.max_residual(&x) < 1e-12);
}

#[test]
fn functionals_match_isometry_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..40 {
        let d = [2, 3, 4][trial % 3];
        let state = random::random_pure_state((2, d), &mut rng);
        let model = random::random_one_sided_model(d, &mut rng);
        for &obj in Objective::for_trust(Trust::OneSided) {
            let f = objective_functional(Trust::OneSided, obj).unwrap();
            let value = f.evaluate(|w| moment_value(&model, &state, w, Trust::OneSided).unwrap());
            let direct = isometry_fidelity(Trust::OneSided, obj, &state, &model).unwrap();
            assert!((value - direct).abs() < 1e-9, "1sDI {obj}: {value} vs {direct}");
        }
        let dims = ([2, 3, 4][trial % 3], [2, 4, 3][trial % 3]);
        let state = random::random_pure_state(dims, &mut rng);
        let model = random::random_di_model(dims, &mut rng);
        for &obj in Objective::for_trust(Trust::DeviceIndependent) {
            let f = objective_functional(Trust::DeviceIndependent, obj).unwrap();
            let value = f.evaluate(|w| moment_value(&model, &state, w, Trust::DeviceIndependent).unwrap());
            let direct = isometry_fidelity(Trust::DeviceIndependent, obj, &state, &model).unwrap();
            assert!((value - direct).abs() < 1e-9, "DI {obj}: {value} vs {direct}");
        }
    }
}

#[test]
fn random_gamma_satisfies_constraints_and_is_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let words = default_words(Trust::OneSided);
    let problem = build_moment_problem(Trust::OneSided, &words, Objective::Xb, Inequality::Steering, 1.9).unwrap();
    for d in [2, 3, 4] {
        let state = random::random_mixed_state((2, d), 2, &mut rng);
        let model = random::random_one_sided_model(d, &mut rng);
        let gamma = instantiate_gamma(&model, &state, &words, Trust::OneSided).unwrap();
        assert!(gamma.constraint_violation(&problem) < 1e-10);
        assert!(gamma.min_eigenvalue() > -1e-9);
        let direct = isometry_fidelity(Trust::OneSided, Objective::Xb, &state, &model).unwrap();
        let inst = to_sdp_instance(&problem);
        let x = realify(&gamma.matrix);
        assert!((inst.objective_value(&x) - direct).abs() < 1e-9);
        // Every constraint except the test level holds.
        let n = inst.constraints.len();
        for c in &inst.constraints[..n - 1] {
            assert!((c.matrix.dot(&x) - c.rhs).abs() < 1e-10);
        }
    }
}

#[test]
fn one_sided_identity_row_block() {
    let words = default_words(Trust::OneSided);
    let gamma = instantiate_gamma(&MeasurementModel::ideal_one_sided(), &bell_state().to_joint(), &words, Trust::OneSided).unwrap();
    // Row word 1 is E_{0|0}: Γ_{1,0} = τ_{0|0} = diag(1/2, 0).
    let tau = gamma.entry(1, 0);
    assert!((tau[(0, 0)].re - 0.5).abs() < 1e-15 && tau[(1, 1)].norm() < 1e-15 && tau[(0, 1)].norm() < 1e-15);
    for k in 0..words.len() {
        assert!(crate::qcore::trace(&gamma.entry(k, k)).re <= 1.0 + 1e-12);
    }
}

#[test]
fn entry_ids_are_conjugate_symmetric() {
    for trust in [Trust::OneSided, Trust::DeviceIndependent] {
        let words = default_words(trust);
        let p = build_moment_problem(trust, &words, Objective::State, Inequality::Chsh, 2.5).unwrap();
        let n = p.size();
        for k in 0..n {
            for l in 0..n {
                assert_eq!(p.entry_word(l, k), &p.entry_word(k, l).adjoint());
            }
        }
        assert!(p.entry_word(0, 0).is_identity());
    }
}

#[test]
fn structure_counts() {
    let p1 = build_moment_problem(Trust::OneSided, &default_words(Trust::OneSided), Objective::State, Inequality::Steering, 2.0).unwrap();
    assert_eq!(p1.size(), 7);
    assert_eq!(p1.moments.len(), 13);
    let words = default_words(Trust::DeviceIndependent);
    let p = build_moment_problem(Trust::DeviceIndependent, &words, Objective::XaXb, Inequality::Chsh, 2.8).unwrap();
    assert_eq!(p.size(), 81);
    assert_eq!(p.moments.len(), 289);
    let (eq, adj, sa, norm) = p.constraint_breakdown();
    assert_eq!(eq + adj, 47_700);
    assert_eq!(sa, 1160);
    assert_eq!(norm, 1);
}

#[test]
fn missing_word_and_unsupported() {
    let short = generate_words(Trust::OneSided, 1);
    assert!(matches!(
        build_moment_problem(Trust::OneSided, &short, Objective::State, Inequality::Steering, 2.0),
        Err(NpaError::MissingWord(_))
    ));
    let words = default_words(Trust::DeviceIndependent);
    assert!(matches!(
        build_moment_problem(Trust::DeviceIndependent, &words, Objective::State, Inequality::Steering, 2.0),
        Err(NpaError::Unsupported(_))
    ));
    assert!(matches!(
        build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 2.0),
        Err(NpaError::MixedAlphabet)
    ));
    let single = generate_words(Trust::DeviceIndependent, 1);
    assert!(build_moment_problem(Trust::DeviceIndependent, &single, Objective::XaXb, Inequality::Chsh, 2.0).is_err());
}

#[test]
fn sdpa_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.dat-s");
    let words = default_words(Trust::OneSided);
    let problem = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 1.95).unwrap();
    export_sdpa(&problem, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(SIGN_CONVENTION));
    let inst = to_sdp_instance(&problem);
    let header: Vec<&str> = text.lines().skip_while(|l| l.starts_with('"') || l.starts_with('*')).take(3).collect();
    assert_eq!(header[0], format!("{} = mDIM", inst.constraints.len()));
    assert_eq!(header[1], "1 = nBLOCK");
    assert_eq!(header[2], format!("{} = bLOCKsTRUCT", inst.dim));
    let (back, back_inst) = import_sdpa(&path).unwrap();
    assert_eq!(back, problem);
    assert_eq!(back_inst, inst);
    // Tampered numeric data is detected.
    std::fs::write(&path, text.replacen("\n0 1 ", "\n0 1 1 1 0.5\n0 1 ", 1)).unwrap();
    assert!(import_sdpa(&path).is_err());
}

#[test]
fn word_list_json() {
    let list = WordList::new(Trust::DeviceIndependent, generate_words(Trust::DeviceIndependent, 2));
    let text = list.to_json();
    assert!(text.contains("npa/1"));
    assert_eq!(WordList::from_json(&text).unwrap(), list);
}
