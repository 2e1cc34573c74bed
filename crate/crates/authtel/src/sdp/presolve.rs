//! Reduction of `⟨A_i, X⟩ = b_i` to an explicit parameterization `X(z) = G0 + Σ z_j G_j`.
//!
//! Single-entry constraints fix entries, homogeneous two-entry constraints merge entries into
//! proportional classes (weighted union-find), and the remaining constraints are rank-checked
//! and solved for a set of basic classes with a column-pivoted QR factorization.

use nalgebra::DMatrix;

use super::{SdpInstance, SparseSym};

const RATIO_TOL: f64 = 1e-12;
const VALUE_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-10;

/// Constant and free-variable coefficients of an eliminated entry.
type Affine = (f64, Vec<(usize, f64)>);

/// Why presolve proved the constraints inconsistent.
#[derive(Debug, Clone, PartialEq)]
pub struct Inconsistent(pub String);

/// The affine parameterization of the feasible linear space.
#[derive(Debug, Clone)]
pub struct Reduced {
    pub dim: usize,
    pub g0: SparseSym,
    pub gs: Vec<SparseSym>,
    /// Objective `c0 + cᵀz`.
    pub c0: f64,
    pub c: Vec<f64>,
    /// Number of original constraints that were linearly dependent on the others.
    pub redundant: usize,
}

struct UnionFind {
    parent: Vec<usize>,
    /// `x_i = ratio_i · x_parent(i)`.
    ratio: Vec<f64>,
    fixed: Vec<Option<f64>>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), ratio: vec![1.0; n], fixed: vec![None; n] }
    }

    fn find(&mut self, a: usize) -> (usize, f64) {
        let mut path = Vec::new();
        let mut cur = a;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // Compress from the top so each ratio is relative to the root.
        for &node in path.iter().rev() {
            let p = self.parent[node];
            if p != root {
                self.ratio[node] *= self.ratio[p];
            }
            self.parent[node] = root;
        }
        (root, self.ratio[a])
    }

    /// Returns whether the fix was already implied.
    fn fix(&mut self, root: usize, value: f64) -> Result<bool, Inconsistent> {
        match self.fixed[root] {
            Some(v) if (v - value).abs() > VALUE_TOL * (1.0 + v.abs().max(value.abs())) => {
                Err(Inconsistent(format!("entry fixed to both {v} and {value}")))
            }
            Some(_) => Ok(true),
            None => {
                self.fixed[root] = Some(value);
                Ok(false)
            }
        }
    }

    /// Imposes `x_a = r · x_b`; returns whether the relation was already implied.
    fn union(&mut self, a: usize, b: usize, r: f64) -> Result<bool, Inconsistent> {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        // x_ra = (r sb / sa) x_rb
        let k = r * sb / sa;
        if ra == rb {
            if (k - 1.0).abs() > RATIO_TOL {
                return self.fix(ra, 0.0);
            }
            return Ok(true);
        }
        let fa = self.fixed[ra];
        self.parent[ra] = rb;
        self.ratio[ra] = k;
        if let Some(v) = fa {
            self.fix(rb, v / k)?;
        }
        Ok(false)
    }
}

/// Index of the upper-triangular entry `(i, j)`, `i ≤ j`.
fn var(dim: usize, i: usize, j: usize) -> usize {
    i * dim + j
}

/// Constraint as `Σ coef · x_(i,j) = rhs` over upper-triangular entries.
fn terms(m: &SparseSym, dim: usize) -> Vec<(usize, f64)> {
    m.entries().iter().map(|&(i, j, v)| (var(dim, i, j), if i == j { v } else { 2.0 * v })).collect()
}

fn sparse_dot(a: &SparseSym, b: &SparseSym) -> f64 {
    let (ea, eb) = (a.entries(), b.entries());
    let (mut p, mut q, mut s) = (0, 0, 0.0);
    while p < ea.len() && q < eb.len() {
        let (ka, kb) = ((ea[p].0, ea[p].1), (eb[q].0, eb[q].1));
        match ka.cmp(&kb) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                s += if ka.0 == ka.1 { ea[p].2 * eb[q].2 } else { 2.0 * ea[p].2 * eb[q].2 };
                p += 1;
                q += 1;
            }
        }
    }
    s
}

pub fn presolve(inst: &SdpInstance) -> Result<Reduced, Inconsistent> {
    let dim = inst.dim;
    let nvars = dim * dim;
    let mut uf = UnionFind::new(nvars);
    let mut fixes = Vec::new();
    let mut general = Vec::new();
    let mut redundant = 0;
    for (idx, c) in inst.constraints.iter().enumerate() {
        let t = terms(&c.matrix, dim);
        match t.as_slice() {
            [] => {
                if c.rhs.abs() > VALUE_TOL {
                    return Err(Inconsistent(format!("constraint {idx} reads 0 = {}", c.rhs)));
                }
                redundant += 1;
            }
            [(a, ca)] => fixes.push((*a, c.rhs / ca)),
            [(a, ca), (b, cb)] if c.rhs == 0.0 => redundant += usize::from(uf.union(*a, *b, -cb / ca)?),
            _ => general.push((t, c.rhs)),
        }
    }
    for (a, value) in fixes {
        let (root, r) = uf.find(a);
        redundant += usize::from(uf.fix(root, value / r)?);
    }
    for i in 0..dim {
        let (root, r) = uf.find(var(dim, i, i));
        if let Some(v) = uf.fixed[root] {
            if r * v < -VALUE_TOL {
                return Err(Inconsistent(format!("diagonal entry {i} fixed to negative value {}", r * v)));
            }
        }
    }

    // Rewrite the general constraints over free class roots.
    let mut column_of = vec![usize::MAX; nvars];
    let mut roots: Vec<usize> = Vec::new();
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for (t, rhs) in &general {
        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut b = *rhs;
        for &(a, ca) in t {
            let (root, r) = uf.find(a);
            match uf.fixed[root] {
                Some(v) => b -= ca * r * v,
                None => {
                    if column_of[root] == usize::MAX {
                        column_of[root] = roots.len();
                        roots.push(root);
                    }
                    row.push((column_of[root], ca * r));
                }
            }
        }
        rows.push((row, b));
    }

    // Basic classes from a column-pivoted QR of the general block.
    let (nr, nc) = (rows.len(), roots.len());
    let mut basic_expr: Vec<Option<Affine>> = vec![None; nc];
    if nr > 0 {
        let mut g = DMatrix::<f64>::zeros(nr, nc);
        let mut h = nalgebra::DVector::<f64>::zeros(nr);
        for (r, (row, b)) in rows.iter().enumerate() {
            for &(col, v) in row {
                g[(r, col)] += v;
            }
            h[r] = *b;
        }
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut order = DMatrix::<f64>::from_fn(1, nc, |_, j| j as f64);
        let (rank, qtb, r_mat, residual) = if nc == 0 {
            (0, h.clone(), DMatrix::zeros(0, 0), h.amax())
        } else {
            let qr = g.clone().col_piv_qr();
            qr.p().permute_columns(&mut order);
            let q = qr.q();
            let r_mat = qr.r();
            let diag = r_mat.nrows().min(nc);
            let rank = (0..diag).take_while(|&i| r_mat[(i, i)].abs() > RANK_TOL * scale).count();
            let qtb = q.transpose() * &h;
            // Part of h outside the span of the first `rank` columns of Q.
            let q1 = q.columns(0, rank);
            let residual = (&h - q1 * qtb.rows(0, rank)).amax();
            (rank, qtb, r_mat, residual)
        };
        if residual > VALUE_TOL * (1.0 + h.amax()) {
            return Err(Inconsistent(format!("general equalities are inconsistent (residual {residual:.3e})")));
        }
        redundant += nr - rank;
        if rank > 0 {
            let perm: Vec<usize> = order.iter().map(|&v| v as usize).collect();
            let r11 = r_mat.view((0, 0), (rank, rank)).into_owned();
            let r12 = r_mat.view((0, rank), (rank, nc - rank)).into_owned();
            let d = r11.solve_upper_triangular(&qtb.rows(0, rank).into_owned()).expect("nonsingular by rank test");
            let t = r11.solve_upper_triangular(&r12).expect("nonsingular by rank test");
            for (bi, &col) in perm[..rank].iter().enumerate() {
                let mut deps = Vec::new();
                for (ni, &ncol) in perm[rank..].iter().enumerate() {
                    let v = t[(bi, ni)];
                    if v.abs() > 1e-15 {
                        deps.push((ncol, v));
                    }
                }
                basic_expr[col] = Some((d[bi], deps));
            }
        }
    }

    // Free parameters: unfixed, non-basic roots.
    let mut param_of_root = vec![usize::MAX; nvars];
    let mut nparams = 0;
    let mut entries0 = Vec::new();
    let mut entries: Vec<Vec<(usize, usize, f64)>> = Vec::new();
    let mut param_for = |root: usize, entries: &mut Vec<Vec<(usize, usize, f64)>>| -> usize {
        if param_of_root[root] == usize::MAX {
            param_of_root[root] = nparams;
            nparams += 1;
            entries.push(Vec::new());
        }
        param_of_root[root]
    };
    for i in 0..dim {
        for j in i..dim {
            let (root, r) = uf.find(var(dim, i, j));
            if let Some(v) = uf.fixed[root] {
                entries0.push((i, j, r * v));
                continue;
            }
            let col = column_of[root];
            match (col != usize::MAX).then(|| basic_expr[col].clone()).flatten() {
                Some((d, deps)) => {
                    entries0.push((i, j, r * d));
                    for (ncol, tv) in deps {
                        let p = param_for(roots[ncol], &mut entries);
                        entries[p].push((i, j, -r * tv));
                    }
                }
                None => {
                    let p = param_for(root, &mut entries);
                    entries[p].push((i, j, r));
                }
            }
        }
    }
    let g0 = SparseSym::from_entries(entries0);
    let gs: Vec<SparseSym> = entries.into_iter().map(SparseSym::from_entries).collect();
    let c0 = sparse_dot(&inst.objective, &g0);
    let c = gs.iter().map(|g| sparse_dot(&inst.objective, g)).collect();
    Ok(Reduced { dim, g0, gs, c0, c, redundant })
}

impl Reduced {
    /// `G0 + Σ z_j G_j` as a dense matrix.
    pub fn assemble(&self, z: &[f64]) -> DMatrix<f64> {
        let mut x = self.g0.to_dense(self.dim);
        for (g, &zj) in self.gs.iter().zip(z) {
            for &(i, j, v) in g.entries() {
                x[(i, j)] += zj * v;
                if i != j {
                    x[(j, i)] += zj * v;
                }
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{LinearForm, SdpConstraint};

    fn constraint(terms: &[(usize, usize, f64)], rhs: f64) -> SdpConstraint {
        let mut f = LinearForm::new();
        for &(i, j, c) in terms {
            f.add(i, j, c);
        }
        SdpConstraint { matrix: f.build(), rhs }
    }

    #[test]
    fn parameterization_satisfies_constraints() {
        // X00 = 1, X01 = X11, X00 + X22 + X12 = 2, duplicate of the last one.
        let cons = vec![
            constraint(&[(0, 0, 1.0)], 1.0),
            constraint(&[(0, 1, 1.0), (1, 1, -1.0)], 0.0),
            constraint(&[(0, 0, 1.0), (2, 2, 1.0), (1, 2, 1.0)], 2.0),
            constraint(&[(0, 0, 2.0), (2, 2, 2.0), (1, 2, 2.0)], 4.0),
        ];
        let inst = SdpInstance::new(3, SparseSym::from_entries([(1, 1, 1.0)]), cons).unwrap();
        let red = presolve(&inst).unwrap();
        assert_eq!(red.redundant, 1);
        // 6 entries - 1 fixed - 1 merged - 1 basic = 3 parameters.
        assert_eq!(red.gs.len(), 3);
        for z in [[0.0, 0.0, 0.0], [0.3, -1.2, 2.0]] {
            let x = red.assemble(&z);
            assert!(inst.max_residual(&x) < 1e-12);
            let obj = red.c0 + red.c.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            assert!((obj - inst.objective_value(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_fixes() {
        let cons = vec![constraint(&[(0, 0, 1.0)], 1.0), constraint(&[(0, 0, 1.0), (1, 1, -1.0)], 0.0), constraint(&[(1, 1, 1.0)], 2.0)];
        let inst = SdpInstance::new(2, SparseSym::default(), cons).unwrap();
        assert!(presolve(&inst).is_err());
    }

    #[test]
    fn inconsistent_general_rows() {
        let cons = vec![
            constraint(&[(0, 0, 1.0), (1, 1, 1.0), (0, 1, 1.0)], 1.0),
            constraint(&[(0, 0, 2.0), (1, 1, 2.0), (0, 1, 2.0)], 3.0),
        ];
        let inst = SdpInstance::new(2, SparseSym::default(), cons).unwrap();
        assert!(presolve(&inst).is_err());
    }

    #[test]
    fn contradictory_cycle_forces_zero() {
        // x01 = x11 and x01 = -x11 imply both vanish.
        let cons = vec![constraint(&[(0, 1, 1.0), (1, 1, -1.0)], 0.0), constraint(&[(0, 1, 1.0), (1, 1, 1.0)], 0.0)];
        let inst = SdpInstance::new(2, SparseSym::default(), cons).unwrap();
        let red = presolve(&inst).unwrap();
        assert_eq!(red.gs.len(), 1);
        let x = red.assemble(&[5.0]);
        assert_eq!(x[(1, 1)], 0.0);
        assert_eq!(x[(0, 1)], 0.0);
    }
}
