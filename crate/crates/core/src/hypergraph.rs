//! Hypergraph data model, weight schemes, graph expansions and growth-model statistics.
//!
//! Nodes are dense ids `0..n`. A hyperedge is a sorted set of at least two distinct node ids
//! with an optional stored weight; the weight actually used by a model is resolved through a
//! [`WeightScheme`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub nodes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

impl Hyperedge {
    /// Builds an edge with its node list sorted ascending. Duplicates are kept so that
    /// validation can reject them.
    pub fn new(mut nodes: Vec<usize>, weight: Option<f64>) -> Self {
        nodes.sort_unstable();
        Self { nodes, weight }
    }

    pub fn unweighted(nodes: Vec<usize>) -> Self {
        Self::new(nodes, None)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// `w(e) = 1`.
    Unit,
    /// `w(e) = 1/|e|`.
    InverseCardinality,
    /// Use the weight stored on each edge.
    Explicit,
}

impl WeightScheme {
    pub fn weight(&self, edge: &Hyperedge) -> Option<f64> {
        match self {
            WeightScheme::Unit => Some(1.0),
            WeightScheme::InverseCardinality => Some(1.0 / edge.len() as f64),
            WeightScheme::Explicit => edge.weight,
        }
    }
}

impl std::str::FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(WeightScheme::Unit),
            "invcard" | "inverse_cardinality" => Ok(WeightScheme::InverseCardinality),
            "explicit" => Ok(WeightScheme::Explicit),
            other => Err(Error::InvalidArgument(format!("unknown weight scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawHypergraph {
    n: usize,
    #[serde(default)]
    edges: Vec<Hyperedge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

/// A validated hypergraph. Every instance satisfies the node-range, edge-size and weight
/// invariants, so solvers never re-check them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHypergraph")]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Hyperedge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl TryFrom<RawHypergraph> for Hypergraph {
    type Error = Error;

    fn try_from(raw: RawHypergraph) -> Result<Self> {
        let edges = raw
            .edges
            .into_iter()
            .map(|e| Hyperedge::new(e.nodes, e.weight))
            .collect();
        let mut h = Hypergraph::new(raw.n, edges)?;
        h.name = raw.name;
        Ok(h)
    }
}

impl Hypergraph {
    pub fn new(n: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        validate(n, &edges)?;
        Ok(Self { n, edges, name: None })
    }

    /// Convenience constructor from plain node lists (no stored weights).
    pub fn from_node_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        Self::new(n, lists.iter().map(|l| Hyperedge::unweighted(l.clone())).collect())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Hyperedge {
        &self.edges[k]
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Total number of (edge, member) incidences, `Σ_k |e_k|`.
    pub fn incidence_count(&self) -> usize {
        self.edges.iter().map(Hyperedge::len).sum()
    }

    /// Resolves per-edge weights under a scheme. Resolved weights are strictly positive.
    pub fn resolve_weights(&self, scheme: WeightScheme) -> Result<Vec<f64>> {
        self.edges
            .iter()
            .enumerate()
            .map(|(k, e)| match scheme.weight(e) {
                Some(w) if w > 0.0 && w.is_finite() => Ok(w),
                _ => Err(Error::MissingWeight { edge: k }),
            })
            .collect()
    }

    /// For each node, the ids of the edges containing it.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (k, e) in self.edges.iter().enumerate() {
            for &i in &e.nodes {
                out[i].push(k);
            }
        }
        out
    }

    /// Connected components of the star expansion restricted to original nodes: component id
    /// per node. Isolated nodes form singleton components.
    pub fn node_components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let root = find(&mut parent, e.nodes[0]);
            for &i in &e.nodes[1..] {
                let r = find(&mut parent, i);
                if r != root {
                    parent[r] = root;
                }
            }
        }
        let mut ids = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut out = vec![0; self.n];
        for i in 0..self.n {
            let r = find(&mut parent, i);
            if ids[r] == usize::MAX {
                ids[r] = next;
                next += 1;
            }
            out[i] = ids[r];
        }
        out
    }

    /// Nodes lying in a connected component that contains no labeled node.
    pub fn unlabeled_component_nodes(&self, mask: &[bool]) -> (usize, Vec<usize>) {
        let comp = self.node_components();
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut labeled = vec![false; count];
        for (i, &c) in comp.iter().enumerate() {
            if mask[i] {
                labeled[c] = true;
            }
        }
        let nodes: Vec<usize> = (0..self.n).filter(|&i| !labeled[comp[i]]).collect();
        let components = labeled.iter().filter(|l| !**l).count();
        (components, nodes)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("hypergraph serialization cannot fail")
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// Checks the hypergraph invariants for a node count and edge list.
pub fn validate(n: usize, edges: &[Hyperedge]) -> Result<()> {
    for (k, e) in edges.iter().enumerate() {
        if e.nodes.len() < 2 {
            return Err(Error::DegenerateEdge {
                edge: k,
                reason: format!("{} node(s), at least 2 required", e.nodes.len()),
            });
        }
        if let Some(&node) = e.nodes.iter().find(|&&i| i >= n) {
            return Err(Error::OutOfRangeNode { edge: k, node, n });
        }
        let mut sorted = e.nodes.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DegenerateEdge {
                edge: k,
                reason: format!("duplicate node {}", w[0]),
            });
        }
        if let Some(w) = e.weight {
            if w < 0.0 || w.is_nan() {
                return Err(Error::NegativeWeight { edge: k, weight: w });
            }
        }
    }
    Ok(())
}

/// Growth-model constants used by the sparsistency bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthStats {
    /// `|e_k| / n` per edge.
    pub r: Vec<f64>,
    /// `max_k r_k` (zero when there are no edges).
    pub r_max: f64,
    /// `min_k r_k` (zero when there are no edges).
    pub r_min: f64,
    /// Scaled degree `d_i = n · Σ_{k : i ∈ e_k} w(e_k)`.
    pub d: Vec<f64>,
    /// `max_i d_i`.
    pub d_max: f64,
}

pub fn growth_stats(h: &Hypergraph, ws: WeightScheme) -> Result<GrowthStats> {
    let n = h.n() as f64;
    let w = h.resolve_weights(ws)?;
    let r: Vec<f64> = h.edges().iter().map(|e| e.len() as f64 / n).collect();
    let r_max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    let mut d = vec![0.0; h.n()];
    for (e, wk) in h.edges().iter().zip(&w) {
        for &i in &e.nodes {
            d[i] += wk;
        }
    }
    for di in &mut d {
        *di *= n;
    }
    let d_max = d.iter().copied().fold(0.0, f64::max);
    let (r_max, r_min) = if r.is_empty() { (0.0, 0.0) } else { (r_max, r_min) };
    Ok(GrowthStats { r, r_max, r_min, d, d_max })
}

/// Weighted simple graph over `n` nodes, stored as unordered pairs `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub n: usize,
    pub pairs: BTreeMap<(usize, usize), f64>,
}

impl WeightedGraph {
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pairs.get(&key).copied().unwrap_or(0.0)
    }

    /// `f^T L f = Σ_{i<j} W_ij (f_i − f_j)^2` for the graph Laplacian `L = D − W`.
    pub fn laplacian_quadratic(&self, f: &[f64]) -> f64 {
        self.pairs
            .iter()
            .map(|(&(i, j), &w)| w * (f[i] - f[j]).powi(2))
            .sum()
    }
}

/// Connects every co-occurring node pair; pair weights add over the edges containing both.
pub fn clique_expansion(h: &Hypergraph, ws: WeightScheme) -> Result<WeightedGraph> {
    let w = h.resolve_weights(ws)?;
    let mut pairs = BTreeMap::new();
    for (e, wk) in h.edges().iter().zip(&w) {
        for (a, &i) in e.nodes.iter().enumerate() {
            for &j in &e.nodes[a + 1..] {
                *pairs.entry((i, j)).or_insert(0.0) += wk;
            }
        }
    }
    Ok(WeightedGraph { n: h.n(), pairs })
}

/// Bipartite expansion: star node `n + k` is joined to each member of `e_k` with weight `w(e_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarGraph {
    pub node_count: usize,
    /// `(star node, member node, weight)`.
    pub edges: Vec<(usize, usize, f64)>,
}

pub fn star_expansion(h: &Hypergraph, ws: WeightScheme) -> Result<StarGraph> {
    let w = h.resolve_weights(ws)?;
    let edges = h
        .edges()
        .iter()
        .zip(&w)
        .enumerate()
        .flat_map(|(k, (e, &wk))| e.nodes.iter().map(move |&i| (h.n() + k, i, wk)))
        .collect();
    Ok(StarGraph { node_count: h.n() + h.m(), edges })
}
