use authtel::cert::*;
use authtel::{Inequality, Trust};
use proptest::prelude::*;

/// Closed forms written out independently of the library.
fn oracle(ineq: Inequality, iid: bool, e: f64, q: f64, x: f64, alpha: f64) -> (f64, f64, u64) {
    let l = (1.0 / e).ln();
    let (c, delta) = match (ineq, iid) {
        (Inequality::Steering, true) => (4.0, 2.0 * e / q + e),
        (Inequality::Steering, false) => {
            (16.0, 2.0 * e / q + e / 2.0 + (4.0 * q * q * x * e * l + 2.0 * e * e) / (8.0 * q * q * x * l + e * e))
        }
        (Inequality::Chsh, true) => (8.0, 4.0 * e / q + e),
        (Inequality::Chsh, false) => (
            32.0,
            4.0 * e / q + 0.75 * e + (4.0 * q * q * x * e * l + (2.0 + 2f64.sqrt()) * e * e) / (16.0 * q * q * x * l + 2.0 * e * e),
        ),
    };
    let g = if ineq == Inequality::Steering { 2 } else { 4 };
    let mut k = (c * q * q * x / (e * e) * l + 1.0).ceil() as u64;
    while !(k - 1).is_multiple_of(g) {
        k += 1;
    }
    let conf = 1.0 - e.powf(x);
    if iid {
        let f = (1.0 - alpha * delta).max(0.0);
        (f, conf, k)
    } else {
        let f = (1.0 - (alpha * delta).sqrt()).max(0.0);
        (f, (conf * f).max(0.0), k)
    }
}

#[test]
fn non_iid_steering_example() {
    let p = CertificateParams::new(Trust::OneSided, Inequality::Steering, false, 0.08, 20.0, 1.0).unwrap();
    let c = fidelity_bound(&p).unwrap();
    let (f, prob, k) = oracle(Inequality::Steering, false, 0.08, 20.0, 1.0, 1.26);
    assert!((c.fidelity - f).abs() < 1e-12);
    assert!((c.probability - prob).abs() < 1e-12);
    assert_eq!(c.copies, k);
    assert!((c.copies as f64 / 2.53e6 - 1.0).abs() < 0.01, "{}", c.copies);
    assert!((c.fidelity - 0.667).abs() < 0.002);
    assert!((c.probability - 0.61).abs() < 0.01);
}

#[test]
fn planned_q_is_minimal() {
    // At fixed ε the copy count grows with q, so the optimum is the smallest q reaching the target.
    for (ineq, iid, e) in [
        (Inequality::Steering, true, 0.25),
        (Inequality::Steering, false, 0.08),
        (Inequality::Chsh, true, 2.0 * 2f64.sqrt() - 2.49),
        (Inequality::Chsh, false, 2.0 * 2f64.sqrt() - 2.73),
    ] {
        let alpha = default_alpha(Trust::OneSided, ineq).unwrap();
        let bounds = PlanBounds { epsilon: Range::Fixed(e), ..PlanBounds::default() };
        let p = plan(CLASSICAL_FIDELITY, 0.0, Trust::OneSided, ineq, iid, None, &bounds).unwrap();
        let scan_q = (0..200_000)
            .map(|i| 1.0 + i as f64 * 0.001)
            .find(|&q| oracle(ineq, iid, e, q, 1.0, alpha).0 >= CLASSICAL_FIDELITY)
            .unwrap();
        assert!(p.params.q <= scan_q + 1e-9 && p.params.q > scan_q - 0.001 - 1e-9, "{ineq} {iid}: {} vs {scan_q}", p.params.q);
        let (_, _, k_scan) = oracle(ineq, iid, e, scan_q, 1.0, alpha);
        assert!(p.certificate.copies <= k_scan);
    }
}

#[test]
fn werner_visibility_matches_scan() {
    // Largest ε whose minimal certifying q fits under the cap, scanned on a fine grid.
    let cap = 120_000u64;
    let fits = |e: f64| {
        let mut q = 1.0;
        while q < 1e4 {
            let (f, _, k) = oracle(Inequality::Steering, true, e, q, 1.0, 1.26);
            if f >= CLASSICAL_FIDELITY {
                return k <= cap;
            }
            q *= 1.0005;
        }
        false
    };
    let e_scan = (1..=3000).map(|i| i as f64 * 1e-4).filter(|&e| fits(e)).fold(0.0, f64::max);
    let bounds = PlanBounds { max_copies: Some(cap), ..PlanBounds::default() };
    let v = min_werner_visibility(CLASSICAL_FIDELITY, Trust::OneSided, Inequality::Steering, true, &bounds).unwrap();
    assert!((v - (1.0 - e_scan / 2.0)).abs() < 2e-3, "{v} vs {}", 1.0 - e_scan / 2.0);
}

#[test]
fn infeasible_targets_name_the_binding_requirement() {
    let capped = PlanBounds { max_copies: Some(100), ..PlanBounds::default() };
    match plan(0.99, 0.0, Trust::OneSided, Inequality::Steering, true, None, &capped) {
        Err(CertError::Infeasible { binding, .. }) => assert_eq!(binding, Binding::Copies),
        other => panic!("{other:?}"),
    }
    let narrow = PlanBounds { epsilon: Range::Fixed(0.5), ..PlanBounds::default() };
    match plan(0.9, 0.0, Trust::DeviceIndependent, Inequality::Chsh, true, None, &narrow) {
        Err(CertError::Infeasible { binding, .. }) => assert_eq!(binding, Binding::Fidelity),
        other => panic!("{other:?}"),
    }
}

#[test]
fn certificate_document_round_trip() {
    let p = CertificateParams::new(Trust::DeviceIndependent, Inequality::Chsh, false, 0.05, 12.0, 2.0)
        .unwrap()
        .with_alpha(1.1735, AlphaSource::SdpDerived)
        .unwrap();
    let doc = CertificateDocument::new(fidelity_bound(&p).unwrap());
    let back = CertificateDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.schema, SCHEMA);
    assert!(doc.to_json().contains("\"sdp-derived\""));
}

#[test]
fn figure2_rows_follow_closed_forms() {
    let grid = [0.01, 0.05, 0.1, 0.2];
    let rows = figure2_rows(Trust::DeviceIndependent, Inequality::Chsh, None, &grid, 30.0, 10.0, 1.0).unwrap();
    for (r, &e) in rows.iter().zip(&grid) {
        let (fi, _, ki) = oracle(Inequality::Chsh, true, e, 30.0, 1.0, 1.19);
        let (fn_, _, kn) = oracle(Inequality::Chsh, false, e, 10.0, 1.0, 1.19);
        assert!((r.f_iid - fi).abs() < 1e-12 && (r.f_noniid - fn_).abs() < 1e-12);
        assert_eq!((r.k_iid, r.k_noniid), (ki, kn));
        assert!((r.violation - (2.0 * 2f64.sqrt() - e)).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bound_matches_oracle(e in 0.001f64..0.99, q in 1.0f64..200.0, x in 0.1f64..4.0, iid: bool, chsh: bool, di: bool) {
        let ineq = if chsh { Inequality::Chsh } else { Inequality::Steering };
        let trust = if di && chsh { Trust::DeviceIndependent } else { Trust::OneSided };
        let p = CertificateParams::new(trust, ineq, iid, e, q, x).unwrap();
        let c = fidelity_bound(&p).unwrap();
        let (f, prob, k) = oracle(ineq, iid, e, q, x, p.alpha);
        prop_assert!((c.fidelity - f.min(1.0)).abs() < 1e-12);
        prop_assert!((c.probability - prob.min(1.0)).abs() < 1e-12);
        prop_assert_eq!(c.copies, k);
    }

    #[test]
    fn plans_reverify(target in 0.5f64..0.8, iid: bool, chsh: bool, cap_exp in 5u32..9) {
        let ineq = if chsh { Inequality::Chsh } else { Inequality::Steering };
        let bounds = PlanBounds { max_copies: Some(10u64.pow(cap_exp)), ..PlanBounds::default() };
        if let Ok(p) = plan(target, 0.0, Trust::OneSided, ineq, iid, None, &bounds) {
            let c = fidelity_bound(&p.params).unwrap();
            prop_assert_eq!(&c, &p.certificate);
            prop_assert!(c.fidelity >= target);
            prop_assert!(c.copies <= 10u64.pow(cap_exp));
        }
    }
}
