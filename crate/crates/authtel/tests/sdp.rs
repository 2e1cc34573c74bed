use authtel::npa::{build_moment_problem, default_words, instantiate_gamma, moment_value, to_sdp_instance, Objective};
use authtel::qcore::{self, JointState, MeasurementModel};
use authtel::sdp::*;
use authtel::{Inequality, Trust};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn eq(terms: &[(usize, usize, f64)], rhs: f64) -> SdpConstraint {
    let mut f = LinearForm::new();
    for &(i, j, c) in terms {
        f.add(i, j, c);
    }
    SdpConstraint { matrix: f.build(), rhs }
}

fn form(terms: &[(usize, usize, f64)]) -> SparseSym {
    let mut f = LinearForm::new();
    for &(i, j, c) in terms {
        f.add(i, j, c);
    }
    f.build()
}

fn sym_from(m: &DMatrix<f64>) -> SparseSym {
    let n = m.nrows();
    SparseSym::from_entries((0..n).flat_map(|i| (i..n).map(move |j| (i, j))).map(|(i, j)| (i, j, m[(i, j)])))
}

fn random_sym(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    use rand::Rng;
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

#[test]
fn determinant_example() {
    for c in [-2.0, -0.5, 0.0, 0.3, 1.0, 1.7] {
        let inst = SdpInstance::new(2, form(&[(1, 1, 1.0)]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(0, 1, 1.0)], c)]).unwrap();
        let sol = solve(&inst, &Tolerances::default());
        assert_eq!(sol.status, SdpStatus::Optimal, "c = {c}: {}", sol.message);
        assert!((sol.lower_value() - c * c).abs() < 1e-6, "c = {c}: {}", sol.lower_value());
    }
}

#[test]
fn trace_example() {
    for n in 1..=6 {
        let obj = SparseSym::from_entries((0..n).map(|i| (i, i, 1.0)));
        let inst = SdpInstance::new(n, obj, vec![eq(&[(0, 0, 1.0)], 1.0)]).unwrap();
        let sol = solve(&inst, &Tolerances::default());
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.lower_value() - 1.0).abs() < 1e-7);
    }
}

#[test]
fn one_sided_maximal_violation_is_exact() {
    let words = default_words(Trust::OneSided);
    let p = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 2.0).unwrap();
    let sol = solve(&to_sdp_instance(&p), &Tolerances::default());
    assert!((sol.lower_value() - 1.0).abs() < 1e-5, "{:?} {}", sol.status, sol.lower_value());
    assert!((sol.primal_objective - 1.0).abs() < 1e-5);
}

#[test]
fn linear_infeasibility() {
    let inst = SdpInstance::new(2, form(&[(1, 1, 1.0)]), vec![eq(&[(0, 0, 1.0)], -1.0)]).unwrap();
    let sol = solve(&inst, &Tolerances::default());
    assert_eq!(sol.status, SdpStatus::Infeasible);
    assert_eq!(sol.infeasibility, Some(Infeasibility::Linear));

    let inst = SdpInstance::new(2, form(&[]), vec![eq(&[(0, 0, 1.0), (1, 1, 1.0)], 1.0), eq(&[(0, 0, 2.0), (1, 1, 2.0)], 3.0)]).unwrap();
    assert_eq!(solve(&inst, &Tolerances::default()).infeasibility, Some(Infeasibility::Linear));
}

#[test]
fn cone_infeasibility() {
    // |X01| + |X02| ≤ 2 on unit-diagonal PSD matrices, so a sum of 3 is out of reach.
    let inst = SdpInstance::new(
        3,
        form(&[(1, 2, 1.0)]),
        vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(1, 1, 1.0)], 1.0), eq(&[(2, 2, 1.0)], 1.0), eq(&[(0, 1, 1.0), (0, 2, 1.0)], 3.0)],
    )
    .unwrap();
    let sol = solve(&inst, &Tolerances::default());
    assert_eq!(sol.status, SdpStatus::Infeasible, "{}", sol.message);
    assert_eq!(sol.infeasibility, Some(Infeasibility::Primal));

    // Fully determined but indefinite.
    let inst = SdpInstance::new(2, form(&[]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(1, 1, 1.0)], 1.0), eq(&[(0, 1, 1.0)], 2.0)]).unwrap();
    let sol = solve(&inst, &Tolerances::default());
    assert_eq!(sol.status, SdpStatus::Infeasible, "{}", sol.message);
}

#[test]
fn unbounded_detection() {
    // X = [[t, s], [s, t]] ⪰ 0 iff t ≥ |s|; minimizing −s is unbounded.
    let inst = SdpInstance::new(2, form(&[(0, 1, -1.0)]), vec![eq(&[(0, 0, 1.0), (1, 1, -1.0)], 0.0)]).unwrap();
    let sol = solve(&inst, &Tolerances::default());
    assert_eq!(sol.status, SdpStatus::Infeasible, "{}", sol.message);
    assert_eq!(sol.infeasibility, Some(Infeasibility::Dual));
}

#[test]
fn never_optimal_without_contract() {
    let inst = SdpInstance::new(2, form(&[(1, 1, 1.0)]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(0, 1, 1.0)], 0.7)]).unwrap();
    let sol = solve(&inst, &Tolerances { max_iterations: 3, ..Tolerances::default() });
    assert_eq!(sol.status, SdpStatus::MaxIterations);
    assert!(!sol.message.is_empty());
}

#[test]
fn deterministic_output() {
    let words = default_words(Trust::OneSided);
    let p = build_moment_problem(Trust::OneSided, &words, Objective::Xb, Inequality::Steering, 1.9).unwrap();
    let inst = to_sdp_instance(&p);
    let a = solve(&inst, &Tolerances::default()).report(true).to_json();
    let b = solve(&inst, &Tolerances::default()).report(true).to_json();
    assert_eq!(a, b);
}

#[test]
fn report_round_trip() {
    let inst = SdpInstance::new(2, form(&[(1, 1, 1.0)]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(0, 1, 1.0)], 0.5)]).unwrap();
    let rep = solve(&inst, &Tolerances::default()).report(true);
    let back: SolutionReport = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
    assert_eq!(back.schema, "sdp/1");
    assert_eq!(back.iterations, back.trace.len());
}

#[test]
fn weak_duality_on_feasible_iterates() {
    let words = default_words(Trust::OneSided);
    for w in [1.8, 1.95] {
        let p = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, w).unwrap();
        let sol = solve(&to_sdp_instance(&p), &Tolerances::default());
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(sol.dual_objective <= sol.primal_objective + 1e-8);
        for it in sol.trace.iter().filter(|it| it.primal_residual < 1e-12 && it.dual_residual < 1e-9) {
            assert!(it.dual_objective <= it.primal_objective + 1e-8, "{it:?}");
        }
    }
}

#[test]
fn werner_moments_bound_the_minimum() {
    // A feasible moment matrix upper-bounds the minimum; the Werner family attains 1 − 3ε/8.
    let words = default_words(Trust::OneSided);
    let model = MeasurementModel::ideal_one_sided();
    for eps in [0.01, 0.05, 0.1, 0.2] {
        let v = 1.0 - eps / 2.0;
        let p = build_moment_problem(Trust::OneSided, &words, Objective::State, Inequality::Steering, 2.0 - eps).unwrap();
        let state = JointState::new(qcore::werner_state(v).unwrap().matrix().clone(), (2, 2)).unwrap();
        let gamma = instantiate_gamma(&model, &state, &words, Trust::OneSided).unwrap();
        assert!(gamma.constraint_violation(&p) < 1e-12);
        let attained = p.objective_functional.evaluate(|w| moment_value(&model, &state, w, Trust::OneSided).unwrap());
        assert!((attained - (1.0 - 0.375 * eps)).abs() < 1e-12);
        let sol = solve(&to_sdp_instance(&p), &Tolerances::default());
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!(sol.lower_value() <= attained + 1e-5);
    }
}

#[test]
fn rounding_plateau_returns_best_iterate() {
    // Rounding errors stop progress on this instance once the iterate already meets the
    // contract; the returned iterate must be that one, not the degraded tail.
    let words = default_words(Trust::OneSided);
    let p = build_moment_problem(Trust::OneSided, &words, Objective::Xb, Inequality::Steering, 1.98).unwrap();
    let sol = solve(&to_sdp_instance(&p), &Tolerances::default());
    assert_eq!(sol.status, SdpStatus::Optimal, "{}", sol.message);
    assert!(sol.meets_contract());
    assert!(sol.trace.len() < 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn determinant_condition(c in -3.0f64..3.0) {
        let inst = SdpInstance::new(2, form(&[(1, 1, 1.0)]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(0, 1, 1.0)], c)]).unwrap();
        let sol = solve(&inst, &Tolerances::default());
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        prop_assert!((sol.lower_value() - c * c).abs() < 1e-6 * (1.0 + c * c));
    }

    #[test]
    fn smallest_eigenvalue_oracle(seed in 0u64..1000, n in 2usize..7) {
        // min ⟨C, X⟩ over unit-trace PSD X is λ_min(C).
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_sym(n, &mut rng);
        let trace = SdpConstraint { matrix: SparseSym::from_entries((0..n).map(|i| (i, i, 1.0))), rhs: 1.0 };
        let inst = SdpInstance::new(n, sym_from(&c), vec![trace]).unwrap();
        let sol = solve(&inst, &Tolerances::default());
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        let lam = c.symmetric_eigenvalues().min();
        prop_assert!((sol.lower_value() - lam).abs() < 1e-6, "{} vs {}", sol.lower_value(), lam);
    }

    #[test]
    fn unit_diagonal_two_by_two(a in -2.0f64..2.0, b in -2.0f64..2.0, o in -2.0f64..2.0) {
        // With X00 = X11 = 1 the optimum is a + b − 2|o|.
        let inst = SdpInstance::new(2, form(&[(0, 0, a), (1, 1, b), (0, 1, o)]), vec![eq(&[(0, 0, 1.0)], 1.0), eq(&[(1, 1, 1.0)], 1.0)]).unwrap();
        let sol = solve(&inst, &Tolerances::default());
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        prop_assert!((sol.lower_value() - (a + b - o.abs())).abs() < 1e-6);
    }

    #[test]
    fn scale_covariance(seed in 0u64..1000, s in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let base = random_sym(n, &mut rng);
        let x0 = &base * base.transpose() + DMatrix::identity(n, n);
        let c = random_sym(n, &mut rng) + DMatrix::identity(n, n) * 3.0;
        let cons: Vec<SdpConstraint> = (0..3)
            .map(|_| {
                let a = random_sym(n, &mut rng);
                SdpConstraint { rhs: a.dot(&x0), matrix: sym_from(&a) }
            })
            .collect();
        let one = solve(&SdpInstance::new(n, sym_from(&c), cons.clone()).unwrap(), &Tolerances::default());
        let scaled = solve(&SdpInstance::new(n, sym_from(&(&c * s)), cons).unwrap(), &Tolerances::default());
        prop_assert_eq!(one.status, SdpStatus::Optimal);
        prop_assert_eq!(scaled.status, SdpStatus::Optimal);
        prop_assert!((scaled.lower_value() - s * one.lower_value()).abs() < 1e-6 * (1.0 + s * one.lower_value().abs()));
        prop_assert!(one.dual_objective <= one.primal_objective + 1e-8);
    }
}
