//! Smoothness measures on hypergraphs.
//!
//! [`sh_general`] evaluates the two-level combinator form
//! `sh(f) = T_e( t_{i<j ∈ e}( w_ij · |f_i − f_j|^p ) )`, which covers graph Laplacians,
//! clique/star expansion quadratics, total variation and the ℓp variants.
//!
//! [`ss1`], [`ss2`] and [`ss_dense`] are the per-edge measures that introduce a representative
//! label `μ` for each edge and minimize over it in closed form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hypergraph::{Hypergraph, WeightScheme};

/// Reduction applied to a list of nonnegative terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Combinator {
    Sum,
    Max,
    /// `(Σ x)^{1/q}`. Paired with kernel exponent `q` this yields the ℓq norm of the gaps.
    LpNorm(f64),
}

impl Combinator {
    fn combine(&self, terms: impl Iterator<Item = f64>) -> f64 {
        match self {
            Combinator::Sum => terms.sum(),
            Combinator::Max => terms.fold(0.0, f64::max),
            Combinator::LpNorm(q) => terms.sum::<f64>().powf(1.0 / q),
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            Combinator::LpNorm(q) => q.is_finite() && *q >= 1.0,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinatorSpec {
    /// Combination across hyperedges.
    pub outer: Combinator,
    /// Combination across node pairs inside one hyperedge.
    pub inner: Combinator,
    /// Exponent of the pairwise kernel `|f_i − f_j|^p`.
    pub exponent: f64,
}

impl CombinatorSpec {
    pub const fn new(outer: Combinator, inner: Combinator, exponent: f64) -> Self {
        Self { outer, inner, exponent }
    }

    /// Sum over edges of squared differences: the clique/star expansion quadratic form.
    pub const CLIQUE_QUADRATIC: Self = Self::new(Combinator::Sum, Combinator::Sum, 2.0);
    /// Clique expansion with the 1-Laplacian kernel.
    pub const CLIQUE_ONE_LAPLACIAN: Self = Self::new(Combinator::Sum, Combinator::Sum, 1.0);
    /// Sum over edges of the largest gap.
    pub const TOTAL_VARIATION: Self = Self::new(Combinator::Sum, Combinator::Max, 1.0);
    /// Largest gap anywhere.
    pub const INF_MINIMIZER: Self = Self::new(Combinator::Max, Combinator::Max, 1.0);
    /// Largest per-edge sum of gaps.
    pub const MAX_EDGE: Self = Self::new(Combinator::Max, Combinator::Sum, 1.0);

    pub fn is_valid(&self) -> bool {
        self.exponent.is_finite() && self.exponent >= 1.0 && self.outer.is_valid() && self.inner.is_valid()
    }
}

/// Weights `w_ij` for node pairs inside an edge.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PairWeights {
    /// `w_ij = w(e)` for every pair of `e`.
    #[default]
    Uniform,
    /// Explicit weights keyed by `(min(i,j), max(i,j))`; pairs not present weigh 0.
    Given(BTreeMap<(usize, usize), f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShEvaluation {
    pub value: f64,
    /// Set when the hypergraph has no edges; `value` is then 0.
    pub empty_hypergraph: bool,
}

pub fn sh_general(
    f: &[f64],
    h: &Hypergraph,
    ws: WeightScheme,
    spec: &CombinatorSpec,
    pair_weights: &PairWeights,
) -> Result<ShEvaluation> {
    if f.len() != h.n() {
        return Err(crate::Error::DimensionMismatch { what: "label vector", expected: h.n(), got: f.len() });
    }
    if !spec.is_valid() {
        return Err(crate::Error::InvalidArgument(format!("invalid combinator spec {spec:?}")));
    }
    if h.m() == 0 {
        log::warn!("smoothness of a hypergraph with no edges is 0");
        return Ok(ShEvaluation { value: 0.0, empty_hypergraph: true });
    }
    let w = h.resolve_weights(ws)?;
    let p = spec.exponent;
    let per_edge = h.edges().iter().zip(&w).map(|(e, &we)| {
        let nodes = &e.nodes;
        let pairs = nodes.iter().enumerate().flat_map(|(a, &i)| nodes[a + 1..].iter().map(move |&j| (i, j)));
        spec.inner.combine(pairs.map(|(i, j)| {
            let wij = match pair_weights {
                PairWeights::Uniform => we,
                PairWeights::Given(map) => map.get(&(i, j)).copied().unwrap_or(0.0),
            };
            wij * (f[i] - f[j]).abs().powf(p)
        }))
    });
    Ok(ShEvaluation { value: spec.outer.combine(per_edge), empty_hypergraph: false })
}

/// Representative label and smoothness value of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSmoothness {
    pub mu: f64,
    pub value: f64,
}

/// Median; for even length the midpoint of the two middle order statistics.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    let n = v.len();
    let mid = n / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// `min_μ w Σ |f_i − μ|`, attained at the median.
pub fn ss1(values: &[f64], w: f64) -> EdgeSmoothness {
    let mu = median(values);
    let value = w * values.iter().map(|x| (x - mu).abs()).sum::<f64>();
    EdgeSmoothness { mu, value }
}

/// `min_μ w max |f_i − μ|`, attained at the mid-range; equals half the largest gap times `w`.
pub fn ss2(values: &[f64], w: f64) -> EdgeSmoothness {
    let (lo, hi) = min_max(values);
    EdgeSmoothness { mu: 0.5 * (lo + hi), value: 0.5 * w * (hi - lo) }
}

/// `min_μ w Σ (f_i − μ)^2`, attained at the mean.
pub fn ss_dense(values: &[f64], w: f64) -> EdgeSmoothness {
    let mu = values.iter().sum::<f64>() / values.len() as f64;
    let value = w * values.iter().map(|x| (x - mu).powi(2)).sum::<f64>();
    EdgeSmoothness { mu, value }
}

/// Gathers `f` restricted to the nodes of an edge.
pub fn restrict(f: &[f64], nodes: &[usize]) -> Vec<f64> {
    nodes.iter().map(|&i| f[i]).collect()
}
