//! The four regression models: dense (squared deviations from the edge mean), hyperedge
//! selection (half range), node selection (squared sum of absolute deviations) and joint
//! selection (sum of absolute deviations).

mod certificate;
mod support;

pub use certificate::{sparsistency_certificate, ProbabilityForm, SparsistencyCertificate};
pub use support::{classify_smoothness, classify_support, Gamma, SupportReport};

use serde::{Deserialize, Serialize};

use crate::admm::{admm_solve, fit_term, AdmmConfig, AdmmState, Diagnostics, EdgePenalty, SparseProblem};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, WeightScheme};
use crate::linsolve::{check_labeled_components, conjugate_gradient, SpdOperator};
use crate::smoothness::{restrict, ss1, ss2, ss_dense, EdgeSmoothness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Dense,
    HyperedgeSelection,
    NodeSelection,
    JointSelection,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] =
        [ModelKind::Dense, ModelKind::HyperedgeSelection, ModelKind::NodeSelection, ModelKind::JointSelection];

    pub fn default_weights(&self) -> WeightScheme {
        match self {
            ModelKind::HyperedgeSelection => WeightScheme::Unit,
            _ => WeightScheme::InverseCardinality,
        }
    }

    /// Block penalty used by ADMM; the dense model has none (closed-form solve).
    pub fn penalty(&self) -> Option<EdgePenalty> {
        match self {
            ModelKind::Dense => None,
            ModelKind::HyperedgeSelection => Some(EdgePenalty::MaxNorm),
            ModelKind::NodeSelection => Some(EdgePenalty::SquaredL1),
            ModelKind::JointSelection => Some(EdgePenalty::L1),
        }
    }

    /// Unweighted per-edge measure: `μ` and `δ` such that `ss = w·δ`.
    pub fn edge_measure(&self, values: &[f64]) -> EdgeSmoothness {
        match self {
            ModelKind::Dense => ss_dense(values, 1.0),
            ModelKind::HyperedgeSelection => ss2(values, 1.0),
            ModelKind::NodeSelection | ModelKind::JointSelection => ss1(values, 1.0),
        }
    }

    /// Per-edge contribution to the regularizer before multiplying by λ.
    pub fn penalty_term(&self, w: f64, delta: f64) -> f64 {
        match self {
            ModelKind::NodeSelection => w * delta * delta,
            _ => w * delta,
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            ModelKind::Dense => "dense",
            ModelKind::HyperedgeSelection => "edge",
            ModelKind::NodeSelection => "node",
            ModelKind::JointSelection => "joint",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(ModelKind::Dense),
            "edge" | "hyperedge" | "hyperedge_selection" => Ok(ModelKind::HyperedgeSelection),
            "node" | "node_selection" => Ok(ModelKind::NodeSelection),
            "joint" | "joint_selection" => Ok(ModelKind::JointSelection),
            other => Err(Error::InvalidArgument(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub model: ModelKind,
    pub lambda: f64,
    /// `None` selects the model's default scheme.
    #[serde(default)]
    pub weights: Option<WeightScheme>,
    #[serde(default)]
    pub solver: AdmmConfig,
    /// Pin components without any labeled node to the mean observed label instead of
    /// failing with a singular system.
    #[serde(default)]
    pub pin_unlabeled_components: bool,
}

impl LearnerConfig {
    pub fn new(model: ModelKind, lambda: f64) -> Self {
        Self { model, lambda, weights: None, solver: AdmmConfig::default(), pin_unlabeled_components: false }
    }

    pub fn weight_scheme(&self) -> WeightScheme {
        self.weights.unwrap_or_else(|| self.model.default_weights())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub model: ModelKind,
    pub lambda: f64,
    /// Resolved edge weights `w(e_k)`.
    pub weights: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub mu_hat: Vec<f64>,
    /// Per-edge slack `δ_k`; the model's smoothness measure is `w_k·δ_k`.
    pub delta_hat: Vec<f64>,
    pub objective: f64,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub state: Option<AdmmState>,
}

impl FitResult {
    /// Per-edge smoothness `ss(f̂, e_k) = w_k·δ̂_k`.
    pub fn edge_smoothness(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.delta_hat).map(|(w, d)| w * d).collect()
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }
}

/// `½|f − Y|²_L + λ Σ_k T-term(w_k, δ_k(f))` with `μ` minimized out.
pub fn model_objective(model: ModelKind, lambda: f64, h: &Hypergraph, weights: &[f64], f: &[f64], labels: &[f64], mask: &[bool]) -> f64 {
    let reg: f64 = h
        .edges()
        .iter()
        .zip(weights)
        .map(|(e, &w)| model.penalty_term(w, model.edge_measure(&restrict(f, &e.nodes)).value))
        .sum();
    fit_term(f, labels, mask) + lambda * reg
}

pub fn fit(h: &Hypergraph, labels: &[f64], mask: &[bool], cfg: &LearnerConfig) -> Result<FitResult> {
    fit_warm(h, labels, mask, cfg, None)
}

/// Like [`fit`], reusing solver state from a previous fit when the model is solved by ADMM.
pub fn fit_warm(h: &Hypergraph, labels: &[f64], mask: &[bool], cfg: &LearnerConfig, warm: Option<&AdmmState>) -> Result<FitResult> {
    let n = h.n();
    if labels.len() != n {
        return Err(Error::DimensionMismatch { what: "labels", expected: n, got: labels.len() });
    }
    if mask.len() != n {
        return Err(Error::DimensionMismatch { what: "mask", expected: n, got: mask.len() });
    }
    if !(cfg.lambda >= 0.0 && cfg.lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonnegative, got {}", cfg.lambda)));
    }
    if !mask.iter().any(|&m| m) {
        return Err(Error::NoLabels);
    }
    let weights = h.resolve_weights(cfg.weight_scheme())?;

    let pinned;
    let (labels, mask): (&[f64], &[bool]) = if cfg.pin_unlabeled_components {
        let (components, nodes) = h.unlabeled_component_nodes(mask);
        if components > 0 {
            let (sum, count) = labels.iter().zip(mask).filter(|(_, &m)| m).fold((0.0, 0), |(s, c), (y, _)| (s + y, c + 1));
            let mean = sum / count as f64;
            let mut y2: Vec<f64> = labels.iter().zip(mask).map(|(&y, &m)| if m { y } else { 0.0 }).collect();
            let mut m2 = mask.to_vec();
            for i in nodes {
                y2[i] = mean;
                m2[i] = true;
            }
            log::warn!("pinned {components} unlabeled component(s) to the mean observed label {mean}");
            pinned = (y2, m2);
            (&pinned.0, &pinned.1)
        } else {
            (labels, mask)
        }
    } else {
        (labels, mask)
    };

    let (f_hat, diagnostics, state) = if cfg.lambda == 0.0 {
        let unlabeled = mask.iter().filter(|m| !**m).count();
        if unlabeled > 0 {
            return Err(Error::SingularSystem { unlabeled_components: unlabeled, unlabeled_nodes: unlabeled });
        }
        let diag = Diagnostics { converged: true, ..Default::default() };
        (labels.to_vec(), diag, None)
    } else if let Some(penalty) = cfg.model.penalty() {
        let problem = SparseProblem {
            hypergraph: h,
            labels,
            mask,
            penalty,
            edge_scale: weights.iter().map(|w| cfg.lambda * w).collect(),
        };
        let sol = admm_solve(&problem, &cfg.solver, warm)?;
        (sol.f, sol.diagnostics, Some(sol.state))
    } else {
        let (f, diag) = solve_dense(h, labels, mask, &weights, cfg.lambda)?;
        (f, diag, None)
    };

    let mut f_hat = f_hat;
    complete_unlabeled(cfg.model, h, &weights, mask, &mut f_hat);
    let (mu_hat, delta_hat) = edge_centers(cfg.model, h, &f_hat);
    let objective = model_objective(cfg.model, cfg.lambda, h, &weights, &f_hat, labels, mask);
    Ok(FitResult { model: cfg.model, lambda: cfg.lambda, weights, f_hat, mu_hat, delta_hat, objective, diagnostics, state })
}

fn edge_centers(model: ModelKind, h: &Hypergraph, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    h.edges()
        .iter()
        .map(|e| {
            let s = model.edge_measure(&restrict(f, &e.nodes));
            (s.mu, s.value)
        })
        .unzip()
}

/// Under the max-norm and L1 penalties an unlabeled node's optimal value is generally an
/// interval, and which point the solver lands on depends on its path. Move each unlabeled node
/// to the midpoint of that interval (μ held at its canonical value), which never raises the
/// objective:
///
/// * hyperedge selection: `∩_k [μ_k − δ^L_k, μ_k + δ^L_k]` with `δ^L_k` the largest deviation of
///   a labeled member of `e_k`; nodes with an empty intersection keep their value
/// * joint selection: the weighted median of `{(μ_k, w_k)}` over the node's edges
pub fn complete_unlabeled(model: ModelKind, h: &Hypergraph, weights: &[f64], mask: &[bool], f: &mut [f64]) {
    if !matches!(model, ModelKind::HyperedgeSelection | ModelKind::JointSelection) || mask.iter().all(|&m| m) {
        return;
    }
    let (mu, _) = edge_centers(model, h, f);
    let memberships = h.memberships();
    let radius: Vec<f64> = h
        .edges()
        .iter()
        .zip(&mu)
        .map(|(e, &c)| e.nodes.iter().filter(|&&j| mask[j]).map(|&j| (f[j] - c).abs()).fold(0.0, f64::max))
        .collect();
    for i in (0..f.len()).filter(|&i| !mask[i] && !memberships[i].is_empty()) {
        let ks = &memberships[i];
        match model {
            ModelKind::HyperedgeSelection => {
                let lo = ks.iter().map(|&k| mu[k] - radius[k]).fold(f64::NEG_INFINITY, f64::max);
                let hi = ks.iter().map(|&k| mu[k] + radius[k]).fold(f64::INFINITY, f64::min);
                if lo <= hi {
                    f[i] = 0.5 * (lo + hi);
                }
            }
            _ => {
                let pts: Vec<(f64, f64)> = ks.iter().map(|&k| (mu[k], weights[k])).collect();
                f[i] = weighted_median(&pts);
            }
        }
    }
}

/// `M_L + 2λ L_w` with `L_w f = Σ_k w_k (f_{e_k} − mean_k)` scattered back to the nodes.
struct DenseSystem<'a> {
    h: &'a Hypergraph,
    mask: &'a [bool],
    weights: &'a [f64],
    lambda: f64,
}

impl SpdOperator for DenseSystem<'_> {
    fn dim(&self) -> usize {
        self.h.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..x.len() {
            y[i] = if self.mask[i] { x[i] } else { 0.0 };
        }
        for (e, &w) in self.h.edges().iter().zip(self.weights) {
            let mean = e.nodes.iter().map(|&i| x[i]).sum::<f64>() / e.len() as f64;
            let c = 2.0 * self.lambda * w;
            for &i in &e.nodes {
                y[i] += c * (x[i] - mean);
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d: Vec<f64> = self.mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        for (e, &w) in self.h.edges().iter().zip(self.weights) {
            let c = 2.0 * self.lambda * w * (1.0 - 1.0 / e.len() as f64);
            for &i in &e.nodes {
                d[i] += c;
            }
        }
        d
    }
}

pub const DENSE_TOL: f64 = 1e-13;

fn solve_dense(h: &Hypergraph, labels: &[f64], mask: &[bool], weights: &[f64], lambda: f64) -> Result<(Vec<f64>, Diagnostics)> {
    check_labeled_components(h, mask)?;
    let system = DenseSystem { h, mask, weights, lambda };
    let rhs: Vec<f64> = labels.iter().zip(mask).map(|(&y, &m)| if m { y } else { 0.0 }).collect();
    let mut f = crate::admm::initial_point(labels, mask, &crate::operator::StackedOperator::new(h));
    f.truncate(h.n());
    let out = conjugate_gradient(&system, &rhs, &mut f, DENSE_TOL, 20 * h.n() + 100);
    let diag = Diagnostics {
        iterations: 1,
        cg_iterations: out.iterations,
        converged: out.converged,
        primal_residual: out.relative_residual,
        ..Default::default()
    };
    if !out.converged {
        log::warn!("dense solve reached relative residual {:.3e}", out.relative_residual);
    }
    Ok((f, diag))
}

/// The λ grid `{10^{i−5}}, i = 1..7`, ascending.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=7).map(|i| 10f64.powi(i - 5)).collect()
}

/// Fits every grid point in the given order, warm-starting each ADMM solve from the previous
/// successful one. Errors are recorded per point and the path continues.
pub fn lambda_path(h: &Hypergraph, labels: &[f64], mask: &[bool], base: &LearnerConfig, grid: &[f64]) -> Vec<Result<FitResult>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut warm: Option<AdmmState> = None;
    for &lambda in grid {
        let cfg = LearnerConfig { lambda, ..*base };
        let res = fit_warm(h, labels, mask, &cfg, warm.as_ref());
        if let Ok(r) = &res {
            if r.state.is_some() {
                warm = r.state.clone();
            }
        }
        out.push(res);
    }
    out
}

/// Fits every grid point from the largest λ down, warm-starting each solve from the previous
/// one, and returns the results in grid order.
pub fn fit_grid(h: &Hypergraph, labels: &[f64], mask: &[bool], base: &LearnerConfig, grid: &[f64]) -> Vec<Result<FitResult>> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));
    let path_grid: Vec<f64> = order.iter().map(|&k| grid[k]).collect();
    let mut out: Vec<Option<Result<FitResult>>> = (0..grid.len()).map(|_| None).collect();
    for (res, &k) in lambda_path(h, labels, mask, base, &path_grid).into_iter().zip(&order) {
        out[k] = Some(res);
    }
    out.into_iter().map(|r| r.expect("every grid point fitted")).collect()
}

/// Predicts the label of a new node from its edge memberships with `μ` fixed at `μ̂`.
pub fn predict_out_of_sample(fitted: &FitResult, memberships: &[usize]) -> Result<f64> {
    if memberships.is_empty() {
        return Err(Error::EmptyMembership);
    }
    let m = fitted.mu_hat.len();
    if let Some(&k) = memberships.iter().find(|&&k| k >= m) {
        return Err(Error::InvalidArgument(format!("edge {k} out of range ({m} edges)")));
    }
    let pts: Vec<(f64, f64)> = memberships.iter().map(|&k| (fitted.mu_hat[k], fitted.weights[k])).collect();
    Ok(match fitted.model {
        ModelKind::Dense => {
            let wsum: f64 = pts.iter().map(|p| p.1).sum();
            pts.iter().map(|(mu, w)| mu * w).sum::<f64>() / wsum
        }
        ModelKind::HyperedgeSelection => weighted_center(&pts),
        ModelKind::NodeSelection | ModelKind::JointSelection => weighted_median(&pts),
    })
}

/// Minimizer of `Σ w_k |x − μ_k|`; when the minimizers form an interval, its midpoint.
pub fn weighted_median(points: &[(f64, f64)]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pts.iter().map(|p| p.1).sum();
    let half = 0.5 * total;
    let eps = 1e-12 * total;
    let mut cum = 0.0;
    for (j, &(mu, w)) in pts.iter().enumerate() {
        cum += w;
        if (cum - half).abs() <= eps && j + 1 < pts.len() {
            return 0.5 * (mu + pts[j + 1].0);
        }
        if cum > half {
            return mu;
        }
    }
    pts.last().map(|p| p.0).unwrap_or(f64::NAN)
}

/// Minimizer of `max_k w_k |x − μ_k|` (weighted mid-range). The optimum is fixed by the pair
/// `(j, k)` with the largest `w_j w_k (μ_k − μ_j) / (w_j + w_k)`.
pub fn weighted_center(points: &[(f64, f64)]) -> f64 {
    let mut best = (f64::NEG_INFINITY, points[0].0);
    for (a, &(mu_j, w_j)) in points.iter().enumerate() {
        for &(mu_k, w_k) in &points[a + 1..] {
            let (lo, wl, hi, wh) = if mu_j <= mu_k { (mu_j, w_j, mu_k, w_k) } else { (mu_k, w_k, mu_j, w_j) };
            let value = wl * wh * (hi - lo) / (wl + wh);
            if value > best.0 {
                best = (value, (wl * lo + wh * hi) / (wl + wh));
            }
        }
    }
    best.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lambda_full_mask_is_identity() {
        let h = Hypergraph::from_node_lists(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap();
        let y = [0.1, 0.4, -0.3, 2.0];
        for model in ModelKind::ALL {
            let r = fit(&h, &y, &[true; 4], &LearnerConfig::new(model, 0.0)).unwrap();
            assert_eq!(r.f_hat, y.to_vec());
        }
    }

    #[test]
    fn dense_two_node_closed_form() {
        let h = Hypergraph::from_node_lists(2, &[vec![0, 1]]).unwrap();
        let mut cfg = LearnerConfig::new(ModelKind::Dense, 0.5);
        cfg.weights = Some(WeightScheme::Unit);
        let r = fit(&h, &[0.0, 1.0], &[true; 2], &cfg).unwrap();
        let f1 = 0.5 / (1.0 + 2.0 * 0.5);
        assert!((r.f_hat[0] - f1).abs() < 1e-12);
        assert!((r.f_hat[1] - (1.0 - f1)).abs() < 1e-12);
    }

    #[test]
    fn joint_fuses_edge() {
        let h = Hypergraph::from_node_lists(3, &[vec![0, 1, 2]]).unwrap();
        let r = fit(&h, &[0.0, 0.0, 1.0], &[true; 3], &LearnerConfig::new(ModelKind::JointSelection, 10.0)).unwrap();
        assert!(r.delta_hat[0] < 1e-6);
        assert!(r.converged());
    }

    #[test]
    fn hidden_labels_are_never_read() {
        let h = Hypergraph::from_node_lists(4, &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let mask = [true, false, true, true];
        for model in ModelKind::ALL {
            let cfg = LearnerConfig::new(model, 0.1);
            let a = fit(&h, &[0.0, 0.5, 1.0, 0.2], &mask, &cfg).unwrap();
            let b = fit(&h, &[0.0, f64::NAN, 1.0, 0.2], &mask, &cfg).unwrap();
            assert_eq!(a.f_hat, b.f_hat);
        }
    }

    #[test]
    fn singular_and_pinned() {
        let h = Hypergraph::from_node_lists(5, &[vec![0, 1], vec![2, 3]]).unwrap();
        let y = [1.0, 3.0, 0.0, 0.0, 0.0];
        let mask = [true, true, false, false, false];
        let cfg = LearnerConfig::new(ModelKind::JointSelection, 0.1);
        assert!(matches!(fit(&h, &y, &mask, &cfg), Err(Error::SingularSystem { .. })));
        let cfg = LearnerConfig { pin_unlabeled_components: true, ..cfg };
        let r = fit(&h, &y, &mask, &cfg).unwrap();
        for i in 2..5 {
            assert!((r.f_hat[i] - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn out_of_sample_rules() {
        let mk = |model, mu: Vec<f64>| FitResult {
            model,
            lambda: 1.0,
            weights: vec![1.0; mu.len()],
            f_hat: vec![],
            delta_hat: vec![0.0; mu.len()],
            mu_hat: mu,
            objective: 0.0,
            diagnostics: Diagnostics::default(),
            state: None,
        };
        for model in ModelKind::ALL {
            assert_eq!(predict_out_of_sample(&mk(model, vec![0.8]), &[0]).unwrap(), 0.8);
        }
        let joint = mk(ModelKind::JointSelection, vec![0.2, 0.8, 0.8]);
        assert_eq!(predict_out_of_sample(&joint, &[0, 1, 2]).unwrap(), 0.8);
        assert!((predict_out_of_sample(&joint, &[0, 1]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(predict_out_of_sample(&joint, &[]), Err(Error::EmptyMembership));
        let edge = mk(ModelKind::HyperedgeSelection, vec![0.0, 0.3, 1.0]);
        assert!((predict_out_of_sample(&edge, &[0, 1, 2]).unwrap() - 0.5).abs() < 1e-15);
        let dense = mk(ModelKind::Dense, vec![0.0, 0.3, 1.0]);
        assert!((predict_out_of_sample(&dense, &[0, 1, 2]).unwrap() - 1.3 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn weighted_center_unequal_weights() {
        // max(2|x|, |x − 1|) is minimized where 2x = 1 − x.
        let x = weighted_center(&[(0.0, 2.0), (1.0, 1.0)]);
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn default_grid() {
        let g = default_lambda_grid();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[6], 1e2);
    }

    #[test]
    fn path_with_zero_grid() {
        let h = Hypergraph::from_node_lists(3, &[vec![0, 1, 2]]).unwrap();
        let y = [0.0, 0.5, 1.0];
        let path = lambda_path(&h, &y, &[true; 3], &LearnerConfig::new(ModelKind::JointSelection, 1.0), &[0.0]);
        assert_eq!(path.len(), 1);
        assert_eq!(path[0].as_ref().unwrap().f_hat, y.to_vec());
    }
}
