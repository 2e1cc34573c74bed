use authtel::npa::*;
use authtel::sdp::*;
use authtel::{Inequality, Trust};
fn main() {
    let args: Vec<String> = std::env::args().collect();
    let trust: Trust = args[1].parse().unwrap();
    let obj: Objective = args[2].parse().unwrap();
    let ineq: Inequality = args[3].parse().unwrap();
    let eps: f64 = args[4].parse().unwrap();
    let words = default_words(trust);
    let p = build_moment_problem(trust, &words, obj, ineq, ineq.max_value() - eps).unwrap();
    let inst = to_sdp_instance(&p);
    let t = std::time::Instant::now();
    let s = solve(&inst, &Tolerances::default());
    for (k, it) in s.trace.iter().enumerate() {
        println!("{k:3} p={:.9} d={:.9} pr={:.2e} dr={:.2e} mu={:.2e} a=({:.3},{:.3})", it.primal_objective, it.dual_objective, it.primal_residual, it.dual_residual, it.mu, it.primal_step, it.dual_step);
    }
    println!("{:?} {} p={} d={} gap={:.2e} pres={:.2e} dres={:.2e} cone={:.2e} eig={:.2e} vars={} red={} {:?} alpha={}", s.status, s.message, s.primal_objective, s.dual_objective, s.gap, s.primal_residual, s.dual_residual, s.cone_residual, s.min_eigenvalue, s.free_variables, s.redundant_constraints, t.elapsed(), (1.0 - s.lower_value()) / eps);
}
