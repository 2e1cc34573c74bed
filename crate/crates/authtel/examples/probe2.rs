use authtel::cert::*;
use authtel::{Inequality, Trust};
fn main() {
    let s2 = std::f64::consts::SQRT_2;
    for (ineq, iid, e) in [(Inequality::Steering, true, 0.25), (Inequality::Steering, false, 0.08), (Inequality::Chsh, true, 2.0*s2-2.49), (Inequality::Chsh, false, 2.0*s2-2.73)] {
        let b = PlanBounds { epsilon: Range::Fixed(e), ..PlanBounds::default() };
        let p = plan(2.0/3.0, 0.0, Trust::OneSided, ineq, iid, None, &b).unwrap();
        println!("{ineq} iid={iid} eps={e:.4} q={:.3} K={} F={:.5} p={:.4}", p.params.q, p.certificate.copies, p.certificate.fidelity, p.certificate.probability);
    }
    let t = std::time::Instant::now();
    for (iid, cap) in [(true, 120_000u64), (false, 100_000_000)] {
        let b = PlanBounds { max_copies: Some(cap), ..PlanBounds::default() };
        println!("werner iid={iid} v={}", min_werner_visibility(2.0/3.0, Trust::OneSided, Inequality::Steering, iid, &b).unwrap());
    }
    println!("{:?}", t.elapsed());
}
