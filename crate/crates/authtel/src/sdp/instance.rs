use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SdpError;

/// Sparse symmetric matrix stored as its upper triangle: `(i, j, M_ij)` with `i ≤ j`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// Sums duplicate coordinates and drops zeros. Coordinates may be given in either order.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, v) in entries {
            *map.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
        }
        SparseSym { entries: map.into_iter().filter(|(_, v)| *v != 0.0).map(|((i, j), v)| (i, j, v)).collect() }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|&(_, j, _)| j).max()
    }

    /// `⟨M, X⟩ = tr(M X)` for symmetric `X`.
    pub fn dot(&self, x: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(i, j, v)| if i == j { v * x[(i, i)] } else { 2.0 * v * x[(i, j)] }).sum()
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    pub fn scaled(&self, s: f64) -> SparseSym {
        SparseSym { entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect() }
    }
}

/// Accumulates a linear functional `Σ c · X[i, j]` of a symmetric matrix.
#[derive(Debug, Clone, Default)]
pub struct LinearForm {
    terms: Vec<(usize, usize, f64)>,
}

impl LinearForm {
    pub fn new() -> Self {
        LinearForm::default()
    }

    /// Adds `coeff · X[i, j]`.
    pub fn add(&mut self, i: usize, j: usize, coeff: f64) -> &mut Self {
        let v = if i == j { coeff } else { 0.5 * coeff };
        self.terms.push((i, j, v));
        self
    }

    pub fn build(self) -> SparseSym {
        SparseSym::from_entries(self.terms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpConstraint {
    pub matrix: SparseSym,
    pub rhs: f64,
}

/// `min ⟨C, X⟩` subject to `⟨A_i, X⟩ = b_i` and `X ⪰ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpInstance {
    pub dim: usize,
    pub objective: SparseSym,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpInstance {
    pub fn new(dim: usize, objective: SparseSym, constraints: Vec<SdpConstraint>) -> Result<Self, SdpError> {
        let inst = SdpInstance { dim, objective, constraints };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        let check = |m: &SparseSym| -> Result<(), SdpError> {
            if let Some(j) = m.max_index() {
                if j >= self.dim {
                    return Err(SdpError::Index { index: j, dim: self.dim });
                }
            }
            if m.entries().iter().any(|e| !e.2.is_finite()) {
                return Err(SdpError::NonFinite);
            }
            Ok(())
        };
        check(&self.objective)?;
        for c in &self.constraints {
            check(&c.matrix)?;
            if !c.rhs.is_finite() {
                return Err(SdpError::NonFinite);
            }
        }
        Ok(())
    }

    /// Largest `|⟨A_i, X⟩ − b_i|`.
    pub fn max_residual(&self, x: &DMatrix<f64>) -> f64 {
        self.constraints.iter().map(|c| (c.matrix.dot(x) - c.rhs).abs()).fold(0.0, f64::max)
    }

    pub fn objective_value(&self, x: &DMatrix<f64>) -> f64 {
        self.objective.dot(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_form_reads_entries() {
        let mut f = LinearForm::new();
        f.add(0, 1, 3.0).add(2, 2, -1.0).add(1, 0, 1.0);
        let m = f.build();
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 2.0, 5.0, 0.0, 0.0, 0.0, 7.0]);
        assert_eq!(m.dot(&x), 3.0 * 2.0 - 7.0 + 2.0);
        assert_eq!(m.dot(&x), (m.to_dense(3) * &x).trace());
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let obj = SparseSym::from_entries([(0, 3, 1.0)]);
        assert!(SdpInstance::new(2, obj, vec![]).is_err());
    }
}
