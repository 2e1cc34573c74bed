use std::io::Write;

use serde::{Deserialize, Serialize};

use super::bound::fidelity_bound;
use super::{AlphaSource, CertError, CertificateParams};
use crate::{Inequality, Trust};

/// Average teleportation fidelity reachable without entanglement.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;

/// One row of an `(ε, F, K, p)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub fidelity: f64,
    pub copies: u64,
    pub probability: f64,
}

/// Fidelity and copy curves at one `ε`, in both statistical regimes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub trust: Trust,
    pub inequality: Inequality,
    pub alpha: f64,
    pub violation: f64,
    pub epsilon: f64,
    pub f_iid: f64,
    pub f_noniid: f64,
    pub k_iid: u64,
    pub k_noniid: u64,
}

/// Fidelity and copy curves over `grid`, with separate `q` for the two regimes.
#[allow(clippy::too_many_arguments)]
pub fn figure2_rows(
    trust: Trust,
    inequality: Inequality,
    alpha: Option<(f64, AlphaSource)>,
    grid: &[f64],
    q_iid: f64,
    q_noniid: f64,
    x: f64,
) -> Result<Vec<Figure2Row>, CertError> {
    grid.iter()
        .map(|&epsilon| {
            let mk = |iid: bool, q: f64| -> Result<_, CertError> {
                let p = CertificateParams::new(trust, inequality, iid, epsilon, q, x)?;
                let p = match alpha {
                    Some((a, s)) => p.with_alpha(a, s)?,
                    None => p,
                };
                fidelity_bound(&p)
            };
            let (i, n) = (mk(true, q_iid)?, mk(false, q_noniid)?);
            Ok(Figure2Row {
                trust,
                inequality,
                alpha: i.params.alpha,
                violation: inequality.max_value() - epsilon,
                epsilon,
                f_iid: i.fidelity,
                f_noniid: n.fidelity,
                k_iid: i.copies,
                k_noniid: n.copies,
            })
        })
        .collect()
}

/// First `ε` (linearly interpolated) at which an `(ε, F)` curve drops below the classical
/// bound, with the bracketing grid points. Points are sorted by `ε` first.
pub fn classical_crossing(curve: &[(f64, f64)]) -> Option<(f64, (f64, f64))> {
    let mut pts = curve.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).find_map(|w| {
        let ((e0, f0), (e1, f1)) = (w[0], w[1]);
        (f0 >= CLASSICAL_FIDELITY && f1 < CLASSICAL_FIDELITY).then(|| {
            let t = (f0 - CLASSICAL_FIDELITY) / (f0 - f1);
            (e0 + t * (e1 - e0), (e0, e1))
        })
    })
}

/// Writes `#`-prefixed comment lines followed by a header row and one line per record.
/// Comma separator, '.' decimals, LF line endings.
pub fn write_sweep_csv<W: Write, T: Serialize>(mut out: W, comments: &[String], rows: &[T]) -> Result<(), CertError> {
    for c in comments {
        for line in c.lines() {
            writeln!(out, "# {line}").map_err(|e| CertError::Csv(e.to_string()))?;
        }
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CertError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| CertError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_on_a_line() {
        let curve: Vec<(f64, f64)> = (1..=10).map(|k| (k as f64 * 0.05, 1.0 - 1.26 * k as f64 * 0.05)).collect();
        let (e, (lo, hi)) = classical_crossing(&curve).unwrap();
        assert!((e - 1.0 / (3.0 * 1.26)).abs() < 1e-12);
        assert!(lo <= e && e <= hi);
        assert!(classical_crossing(&[(0.1, 0.9), (0.2, 0.8)]).is_none());
    }

    #[test]
    fn figure2_monotone() {
        let grid: Vec<f64> = (1..=60).map(|k| k as f64 * 0.005).collect();
        let rows = figure2_rows(Trust::DeviceIndependent, Inequality::Chsh, None, &grid, 40.0, 16.0, 1.0).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].f_iid <= w[0].f_iid && w[1].f_noniid <= w[0].f_noniid);
            assert!(w[1].k_iid <= w[0].k_iid && w[1].k_noniid <= w[0].k_noniid);
        }
        assert!(rows.iter().all(|r| r.alpha == 1.19));
    }

    #[test]
    fn csv_layout() {
        let rows = [SweepRow { epsilon: 0.25, fidelity: 0.5, copies: 3, probability: 0.75 }];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &["config {\"a\":1}".into(), "seed 7".into()], &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# config {\"a\":1}\n# seed 7\nepsilon,fidelity,copies,probability\n0.25,0.5,3,0.75\n");
    }
}
