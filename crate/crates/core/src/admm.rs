//! ADMM for the sparse edge penalties.
//!
//! Variables are `x = (f, μ)` and the stacked differences `z = Ax`, with
//!
//! ```text
//! minimize ½ Σ_{i ∈ L} (f_i − Y_i)² + Σ_k c_k · g(z_k)   subject to  z = Ax
//! ```
//!
//! where `c_k = λ·w(e_k)` and `g` is the max-norm, ℓ1 norm or squared ℓ1 norm of the block.
//! The x-update is the masked quadratic subproblem (conjugate gradient, warm-started) and the
//! z-update is an exact per-block prox.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linsolve::{check_labeled_components, solve_quadratic_subproblem};
use crate::operator::StackedOperator;
use crate::prox::{project_l1_ball, prox_l1, prox_linf, prox_sql1};
use crate::smoothness::median;

/// Per-edge penalty on the block `(f_i − μ_k)_{i ∈ e_k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgePenalty {
    /// `max_i |f_i − μ_k|`.
    MaxNorm,
    /// `Σ_i |f_i − μ_k|`.
    L1,
    /// `(Σ_i |f_i − μ_k|)²`.
    SquaredL1,
}

impl EdgePenalty {
    pub fn prox(&self, v: &[f64], tau: f64) -> Vec<f64> {
        match self {
            EdgePenalty::MaxNorm => prox_linf(v, tau),
            EdgePenalty::L1 => prox_l1(v, tau),
            EdgePenalty::SquaredL1 => prox_sql1(v, tau),
        }
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        match self {
            EdgePenalty::MaxNorm => z.iter().fold(0.0, |a, x| a.max(x.abs())),
            EdgePenalty::L1 => z.iter().map(|x| x.abs()).sum(),
            EdgePenalty::SquaredL1 => z.iter().map(|x| x.abs()).sum::<f64>().powi(2),
        }
    }

    /// `min_μ g(v − μ·1)` for the labels `v` of one edge.
    pub fn reduced(&self, v: &[f64]) -> f64 {
        match self {
            EdgePenalty::MaxNorm => {
                let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
                0.5 * (hi - lo)
            }
            EdgePenalty::L1 | EdgePenalty::SquaredL1 => {
                let mu = median(v);
                let s: f64 = v.iter().map(|x| (x - mu).abs()).sum();
                if *self == EdgePenalty::L1 {
                    s
                } else {
                    s * s
                }
            }
        }
    }

    /// Euclidean distance from `y` to the subdifferential `∂(c·g)(z)`.
    pub fn subgradient_distance(&self, z: &[f64], y: &[f64], c: f64) -> f64 {
        let clamp_dist = |bound: f64, sign_target: f64| {
            z.iter()
                .zip(y)
                .map(|(&zi, &yi)| {
                    let target = if zi != 0.0 { sign_target * zi.signum() } else { yi.clamp(-bound, bound) };
                    (yi - target).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        };
        match self {
            EdgePenalty::L1 => clamp_dist(c, c),
            EdgePenalty::SquaredL1 => {
                let s: f64 = z.iter().map(|x| x.abs()).sum();
                clamp_dist(2.0 * c * s, 2.0 * c * s)
            }
            EdgePenalty::MaxNorm => {
                let mx = z.iter().fold(0.0, |a: f64, x| a.max(x.abs()));
                if mx == 0.0 {
                    let p = project_l1_ball(y, c);
                    return y.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                }
                let cutoff = mx * (1.0 - 1e-9);
                let mut off = 0.0;
                let mut signed = Vec::new();
                for (&zi, &yi) in z.iter().zip(y) {
                    if zi.abs() >= cutoff {
                        signed.push(zi.signum() * yi);
                    } else {
                        off += yi * yi;
                    }
                }
                let proj = project_simplex(&signed, c);
                let on: f64 = signed.iter().zip(&proj).map(|(a, b)| (a - b).powi(2)).sum();
                (off + on).sqrt()
            }
        }
    }
}

/// Projection onto `{t ≥ 0, Σ t = total}`.
fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let candidate = (cumsum - total) / (k + 1) as f64;
        if s > candidate {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmConfig {
    pub rho: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub max_iter: usize,
    /// Relaxation parameter in `[1, 1.8]`.
    pub over_relaxation: f64,
    /// Residual-balancing penalty updates.
    pub adaptive_rho: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self { rho: 1.0, tol_abs: 1e-8, tol_rel: 1e-6, max_iter: 10_000, over_relaxation: 1.0, adaptive_rho: false }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rho > 0.0
            && self.tol_abs > 0.0
            && self.tol_rel > 0.0
            && self.max_iter >= 1
            && (1.0..=1.8).contains(&self.over_relaxation);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid ADMM configuration {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Lowest equivalent objective seen up to each iteration (the incumbent).
    pub objective_trace: Vec<f64>,
    /// Equivalent objective at each raw iterate; ADMM does not decrease it monotonically.
    pub iterate_objective: Vec<f64>,
    pub converged: bool,
    /// Max of the stationarity, dual-feasibility and primal residuals at the returned point.
    pub kkt_residual: f64,
    pub cg_iterations: usize,
}

/// Solver state reused for warm starts along a λ path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmState {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// Scaled dual `y / ρ`.
    pub u: Vec<f64>,
    pub rho: f64,
}

pub struct SparseProblem<'a> {
    pub hypergraph: &'a Hypergraph,
    pub labels: &'a [f64],
    pub mask: &'a [bool],
    pub penalty: EdgePenalty,
    /// `λ·w(e_k)` per edge.
    pub edge_scale: Vec<f64>,
}

impl SparseProblem<'_> {
    /// `½ Σ_{i ∈ L} (f_i − Y_i)² + Σ_k c_k min_μ g(f_{e_k} − μ)`.
    pub fn objective(&self, f: &[f64]) -> f64 {
        let fit = fit_term(f, self.labels, self.mask);
        let reg: f64 = self
            .hypergraph
            .edges()
            .iter()
            .zip(&self.edge_scale)
            .map(|(e, &c)| {
                let v: Vec<f64> = e.nodes.iter().map(|&i| f[i]).collect();
                c * self.penalty.reduced(&v)
            })
            .sum();
        fit + reg
    }
}

/// `½ Σ_{i ∈ L} (f_i − Y_i)²`; hidden labels are never read.
pub fn fit_term(f: &[f64], labels: &[f64], mask: &[bool]) -> f64 {
    0.5 * f
        .iter()
        .zip(labels)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|((fi, yi), _)| (fi - yi).powi(2))
        .sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct AdmmSolution {
    pub f: Vec<f64>,
    /// Raw representative labels from the x-update.
    pub mu: Vec<f64>,
    pub objective: f64,
    pub state: AdmmState,
    pub diagnostics: Diagnostics,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Initial point: labels where observed, the labeled mean elsewhere.
pub fn initial_point(labels: &[f64], mask: &[bool], op: &StackedOperator) -> Vec<f64> {
    let (sum, count) = labels
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold((0.0, 0usize), |(s, c), (y, _)| (s + y, c + 1));
    let mean = if count > 0 { sum / count as f64 } else { 0.0 };
    let mut x: Vec<f64> = labels.iter().zip(mask).map(|(&y, &m)| if m { y } else { mean }).collect();
    for k in 0..op.m() {
        let nodes = op.block_nodes(k);
        x.push(nodes.iter().map(|&i| x[i]).sum::<f64>() / nodes.len() as f64);
    }
    x
}

pub fn admm_solve(problem: &SparseProblem<'_>, cfg: &AdmmConfig, warm: Option<&AdmmState>) -> Result<AdmmSolution> {
    cfg.validate()?;
    let h = problem.hypergraph;
    let n = h.n();
    if problem.labels.len() != n {
        return Err(Error::DimensionMismatch { what: "labels", expected: n, got: problem.labels.len() });
    }
    if problem.mask.len() != n {
        return Err(Error::DimensionMismatch { what: "mask", expected: n, got: problem.mask.len() });
    }
    if problem.edge_scale.len() != h.m() {
        return Err(Error::DimensionMismatch { what: "edge scales", expected: h.m(), got: problem.edge_scale.len() });
    }
    if !problem.mask.iter().any(|&m| m) {
        return Err(Error::NoLabels);
    }
    check_labeled_components(h, problem.mask)?;

    let op = StackedOperator::new(h);
    let rows = op.rows();
    let cols = op.cols();
    let mut rho = cfg.rho;

    let (mut x, mut z, mut u) = match warm {
        Some(s) if s.x.len() == cols && s.z.len() == rows && s.u.len() == rows => {
            let scale = s.rho / rho;
            (s.x.clone(), s.z.clone(), s.u.iter().map(|v| v * scale).collect::<Vec<_>>())
        }
        _ => {
            let x = initial_point(problem.labels, problem.mask, &op);
            let mut z = vec![0.0; rows];
            op.apply(&x, &mut z);
            (x, z, vec![0.0; rows])
        }
    };

    let mut base_rhs = vec![0.0; cols];
    for i in 0..n {
        if problem.mask[i] {
            base_rhs[i] = problem.labels[i];
        }
    }

    let mut rhs = vec![0.0; cols];
    let mut ax = vec![0.0; rows];
    let mut diff = vec![0.0; rows];
    let mut tmp = vec![0.0; cols];
    let mut z_old = vec![0.0; rows];
    let mut diag = Diagnostics::default();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let alpha = cfg.over_relaxation;

    for iter in 1..=cfg.max_iter {
        for r in 0..rows {
            diff[r] = z[r] - u[r];
        }
        op.adjoint(&diff, &mut tmp);
        for j in 0..cols {
            rhs[j] = base_rhs[j] + rho * tmp[j];
        }
        let cg = solve_quadratic_subproblem(&op, problem.mask, rho, &rhs, &mut x);
        diag.cg_iterations += cg.iterations;
        op.apply(&x, &mut ax);

        z_old.copy_from_slice(&z);
        for k in 0..op.m() {
            let range = op.block(k);
            let v: Vec<f64> = range
                .clone()
                .map(|r| alpha * ax[r] + (1.0 - alpha) * z_old[r] + u[r])
                .collect();
            let zk = problem.penalty.prox(&v, problem.edge_scale[k] / rho);
            for (r, val) in range.zip(zk) {
                z[r] = val;
            }
        }
        for r in 0..rows {
            u[r] += alpha * ax[r] + (1.0 - alpha) * z_old[r] - z[r];
        }

        for r in 0..rows {
            diff[r] = ax[r] - z[r];
        }
        let primal = norm(&diff);
        for r in 0..rows {
            diff[r] = z[r] - z_old[r];
        }
        op.adjoint(&diff, &mut tmp);
        let dual = rho * norm(&tmp);
        op.adjoint(&u, &mut tmp);
        let eps_pri = (rows as f64).sqrt() * cfg.tol_abs + cfg.tol_rel * norm(&ax).max(norm(&z));
        let eps_dual = (cols as f64).sqrt() * cfg.tol_abs + cfg.tol_rel * rho * norm(&tmp);

        let obj = problem.objective(&x[..n]);
        diag.iterate_objective.push(obj);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x.clone()));
        }
        diag.objective_trace.push(best.as_ref().map_or(obj, |(b, _)| *b));
        diag.iterations = iter;
        diag.primal_residual = primal;
        diag.dual_residual = dual;

        if primal <= eps_pri && dual <= eps_dual {
            diag.converged = true;
            break;
        }

        if cfg.adaptive_rho && iter % 10 == 0 {
            let factor = if primal > 10.0 * dual {
                2.0
            } else if dual > 10.0 * primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                u.iter_mut().for_each(|v| *v /= factor);
            }
        }
    }

    if !diag.converged {
        if let Some((_, bx)) = best {
            x = bx;
        }
        log::warn!("ADMM stopped after {} iterations without meeting tolerances", diag.iterations);
    }
    diag.kkt_residual = kkt_residual(problem, &op, &x, &z, &u, rho);
    let objective = problem.objective(&x[..n]);
    let (f, mu) = x.split_at(n);
    Ok(AdmmSolution {
        f: f.to_vec(),
        mu: mu.to_vec(),
        objective,
        state: AdmmState { x: x.clone(), z, u, rho },
        diagnostics: diag,
    })
}

/// KKT violation certified by the scaled dual `u`: stationarity of the x-block, membership of
/// `ρu` in the penalty subdifferential at `z`, and the primal gap `‖Ax − z‖∞`.
fn kkt_residual(problem: &SparseProblem<'_>, op: &StackedOperator, x: &[f64], z: &[f64], u: &[f64], rho: f64) -> f64 {
    let n = op.n();
    let y: Vec<f64> = u.iter().map(|v| v * rho).collect();
    let mut grad = vec![0.0; op.cols()];
    op.adjoint(&y, &mut grad);
    for i in 0..n {
        if problem.mask[i] {
            grad[i] += x[i] - problem.labels[i];
        }
    }
    let stationarity = grad.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    let mut dual_feas: f64 = 0.0;
    for k in 0..op.m() {
        let r = op.block(k);
        dual_feas = dual_feas.max(problem.penalty.subgradient_distance(&z[r.clone()], &y[r], problem.edge_scale[k]));
    }
    let mut ax = vec![0.0; op.rows()];
    op.apply(x, &mut ax);
    let primal = ax.iter().zip(z).fold(0.0, |a: f64, (p, q)| a.max((p - q).abs()));
    stationarity.max(dual_feas).max(primal)
}
