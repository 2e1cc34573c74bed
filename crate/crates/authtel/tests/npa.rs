use authtel::npa::*;
use authtel::qcore::{self, random, trace, CMatrix, JointState, MeasurementModel};
use authtel::{Inequality, Trust};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![Just(Symbol::ZA), Just(Symbol::XA), Just(Symbol::ZB), Just(Symbol::XB)]
}

/// `⟨A_y ⊗ B_y'⟩` computed directly from the model's observables.
fn direct_correlation(state: &JointState, a: &CMatrix, b: &CMatrix) -> f64 {
    trace(&(qcore::kron(a, b) * state.matrix())).re
}

#[test]
fn word_counts_follow_alternation() {
    // A local word never repeats a symbol, so each length n ≥ 1 has exactly two words.
    for l in 1..=4 {
        assert_eq!(generate_words(Trust::OneSided, l).len(), 1 + 2 * l);
        assert_eq!(generate_words(Trust::DeviceIndependent, l).len(), (1 + 2 * l).pow(2));
    }
    assert_eq!(default_words(Trust::DeviceIndependent).len(), 81);
}

#[test]
fn inequality_functionals_match_direct_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let state = random::random_mixed_state((2, 3), 3, &mut rng);
        let model = random::random_one_sided_model(3, &mut rng);
        let f = inequality_functional(Trust::OneSided, Inequality::Steering).unwrap();
        let via_moments = f.evaluate(|w| moment_value(&model, &state, w, Trust::OneSided).unwrap());
        let direct = direct_correlation(&state, &qcore::pauli_z(), &model.bob.observable(0))
            + direct_correlation(&state, &qcore::pauli_x(), &model.bob.observable(1));
        assert!((via_moments - direct).abs() < 1e-10, "{via_moments} vs {direct}");

        let dims = (3, 2);
        let state = random::random_mixed_state(dims, 2, &mut rng);
        let model = random::random_di_model(dims, &mut rng);
        let alice = model.alice.as_ref().unwrap();
        let f = inequality_functional(Trust::DeviceIndependent, Inequality::Chsh).unwrap();
        let via_moments = f.evaluate(|w| moment_value(&model, &state, w, Trust::DeviceIndependent).unwrap());
        let e = |x: usize, y: usize| direct_correlation(&state, &alice.observable(x), &model.bob.observable(y));
        let direct = e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1);
        assert!((via_moments - direct).abs() < 1e-10, "{via_moments} vs {direct}");
    }
}

#[test]
fn ideal_models_reach_the_maximal_violation() {
    let words = default_words(Trust::OneSided);
    let gamma = instantiate_gamma(&MeasurementModel::ideal_one_sided(), &qcore::bell_state().to_joint(), &words, Trust::OneSided).unwrap();
    let problem = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 2.0).unwrap();
    assert!(gamma.constraint_violation(&problem) < 1e-12);
    assert!(gamma.min_eigenvalue() > -1e-12);
}

#[test]
fn sdpa_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.dat-s");
    let words = default_words(Trust::OneSided);
    let problem = build_moment_problem(Trust::OneSided, &words, Objective::Zb, Inequality::Chsh, 2.7).unwrap();
    export_sdpa(&problem, &path).unwrap();
    let (back, inst) = import_sdpa(&path).unwrap();
    assert_eq!(back, problem);
    assert_eq!(inst, to_sdp_instance(&problem));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_is_idempotent(symbols in prop::collection::vec(symbol(), 0..10)) {
        let w = canonicalize(&symbols).unwrap();
        prop_assert_eq!(canonicalize(w.symbols()).unwrap(), w.clone());
        // No adjacent repeats survive, and Alice's symbols come first.
        prop_assert!(w.symbols().windows(2).all(|p| p[0] != p[1]));
        let (a, b) = w.party_lengths();
        prop_assert_eq!(a + b, w.len());
        prop_assert!(w.symbols()[..a].iter().all(|s| s.party() == Party::Alice));
    }

    #[test]
    fn adjoint_reverses_products(x in prop::collection::vec(symbol(), 0..6), y in prop::collection::vec(symbol(), 0..6)) {
        let (wx, wy) = (canonicalize(&x).unwrap(), canonicalize(&y).unwrap());
        prop_assert_eq!(wx.adjoint().adjoint(), wx.clone());
        let lhs = wx.mul(&wy).unwrap().adjoint();
        let rhs = wy.adjoint().mul(&wx.adjoint()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn moments_respect_operator_algebra(seed: u64, x in prop::collection::vec(symbol(), 1..6)) {
        // Canonicalization must not change the operator a word denotes.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = (2, 3);
        let state = random::random_mixed_state(dims, 2, &mut rng);
        let model = random::random_di_model(dims, &mut rng);
        let w = canonicalize(&x).unwrap();
        let alice = model.alice.as_ref().unwrap();
        let op = |s: Symbol| match s {
            Symbol::ZA => qcore::kron(&alice.observable(0), &qcore::identity(3)),
            Symbol::XA => qcore::kron(&alice.observable(1), &qcore::identity(3)),
            Symbol::ZB => qcore::kron(&qcore::identity(2), &model.bob.observable(0)),
            Symbol::XB => qcore::kron(&qcore::identity(2), &model.bob.observable(1)),
            _ => unreachable!(),
        };
        let raw = x.iter().fold(qcore::identity(6), |acc, &s| acc * op(s));
        let direct = trace(&(raw * state.matrix()));
        let via = moment_value(&model, &state, &w, Trust::DeviceIndependent).unwrap()[(0, 0)];
        prop_assert!((direct - via).norm() < 1e-10);
    }
}
