//! Jacobi-preconditioned conjugate gradient and the masked quadratic subproblem
//! `(M_L + ρ AᵀA) x = rhs` solved in every ADMM x-update.

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::operator::StackedOperator;

/// A symmetric positive (semi)definite operator with an available diagonal.
pub trait SpdOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// `‖rhs − Mx‖ / ‖rhs‖` at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `M x = rhs` in place, starting from the current contents of `x`.
pub fn conjugate_gradient<M: SpdOperator>(op: &M, rhs: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> CgOutcome {
    let dim = op.dim();
    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgOutcome { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let inv_diag: Vec<f64> = op
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut ax = vec![0.0; dim];
    op.apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let target = rel_tol * rhs_norm;
    let mut res_norm = dot(&r, &r).sqrt();
    if res_norm <= target {
        return CgOutcome { iterations: 0, relative_residual: res_norm / rhs_norm, converged: true };
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; dim];
    for it in 1..=max_iter {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return CgOutcome { iterations: it, relative_residual: res_norm / rhs_norm, converged: false };
        }
        let alpha = rz / pq;
        for j in 0..dim {
            x[j] += alpha * p[j];
            r[j] -= alpha * q[j];
        }
        res_norm = dot(&r, &r).sqrt();
        if res_norm <= target {
            return CgOutcome { iterations: it, relative_residual: res_norm / rhs_norm, converged: true };
        }
        for j in 0..dim {
            z[j] = r[j] * inv_diag[j];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for j in 0..dim {
            p[j] = z[j] + beta * p[j];
        }
    }
    CgOutcome { iterations: max_iter, relative_residual: res_norm / rhs_norm, converged: false }
}

/// `M_L ⊕ 0 + ρ AᵀA` acting on `x = (f, μ)`.
pub struct MaskedGramSystem<'a> {
    pub op: &'a StackedOperator,
    pub mask: &'a [bool],
    pub rho: f64,
}

impl SpdOperator for MaskedGramSystem<'_> {
    fn dim(&self) -> usize {
        self.op.cols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.gram(x, y);
        for v in y.iter_mut() {
            *v *= self.rho;
        }
        for (i, &labeled) in self.mask.iter().enumerate() {
            if labeled {
                y[i] += x[i];
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let n = self.op.n();
        let mut d = Vec::with_capacity(self.op.cols());
        for i in 0..n {
            d.push(self.rho * self.op.degree()[i] as f64 + if self.mask[i] { 1.0 } else { 0.0 });
        }
        for k in 0..self.op.m() {
            d.push(self.rho * self.op.block_size(k) as f64);
        }
        d
    }
}

pub const SUBPROBLEM_TOL: f64 = 1e-10;

/// Fails with [`Error::SingularSystem`] when some connected component carries no label.
pub fn check_labeled_components(h: &Hypergraph, mask: &[bool]) -> Result<()> {
    let (components, nodes) = h.unlabeled_component_nodes(mask);
    if components > 0 {
        return Err(Error::SingularSystem { unlabeled_components: components, unlabeled_nodes: nodes.len() });
    }
    Ok(())
}

/// Solves `(M_L + ρAᵀA) x = rhs` for `x = (f, μ)`, warm-started from `x`.
///
/// The caller is responsible for the component check; on a singular system CG simply fails
/// to reach the tolerance.
pub fn solve_quadratic_subproblem(op: &StackedOperator, mask: &[bool], rho: f64, rhs: &[f64], x: &mut [f64]) -> CgOutcome {
    let system = MaskedGramSystem { op, mask, rho };
    let max_iter = 10 * op.cols() + 100;
    conjugate_gradient(&system, rhs, x, SUBPROBLEM_TOL, max_iter)
}
