use serde::{Deserialize, Serialize};

use super::sim::{gen_simulation, SimSpec};
use crate::error::{Error, Result};
use crate::learners::{classify_support, fit_grid, Gamma, LearnerConfig, SupportReport};

/// Per-λ smoothness of every edge after fitting on all observed labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapTable {
    pub grid: Vec<f64>,
    pub relevant: Vec<bool>,
    /// `smoothness[l][k] = ss(f̂_λl, e_k)`.
    pub smoothness: Vec<Vec<f64>>,
    /// `min(irrelevant ss) − max(relevant ss)` per λ.
    pub gap: Vec<f64>,
    pub auto_support: Vec<SupportReport>,
    /// Whether the automatic threshold reproduces the planted split exactly.
    pub recovered: Vec<bool>,
    pub converged: Vec<bool>,
}

pub fn support_gap(ss: &[f64], relevant: &[bool]) -> f64 {
    let max_rel = ss.iter().zip(relevant).filter(|(_, &r)| r).map(|(s, _)| *s).fold(f64::NEG_INFINITY, f64::max);
    let min_irr = ss.iter().zip(relevant).filter(|(_, &r)| !r).map(|(s, _)| *s).fold(f64::INFINITY, f64::min);
    min_irr - max_rel
}

pub fn lambda_gap_experiment(spec: &SimSpec, cfg: &LearnerConfig, grid: &[f64], seed: u64) -> Result<GapTable> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("lambda grid is empty".into()));
    }
    let sim = gen_simulation(spec, seed)?;
    if sim.relevant.iter().all(|&r| r) || sim.relevant.iter().all(|&r| !r) {
        return Err(Error::InvalidArgument("need both relevant and irrelevant edges".into()));
    }
    let mask = vec![true; sim.hypergraph.n()];
    let fits = fit_grid(&sim.hypergraph, &sim.labels, &mask, cfg, grid).into_iter().collect::<Result<Vec<_>>>()?;

    let planted: Vec<usize> = (0..sim.relevant.len()).filter(|&k| sim.relevant[k]).collect();
    let smoothness: Vec<Vec<f64>> = fits.iter().map(|f| f.edge_smoothness()).collect();
    let gap = smoothness.iter().map(|ss| support_gap(ss, &sim.relevant)).collect();
    let auto_support: Vec<SupportReport> = fits.iter().map(|f| classify_support(f, Gamma::Auto)).collect();
    let recovered = auto_support.iter().map(|r| !r.zero_gap && r.relevant == planted).collect();
    Ok(GapTable {
        grid: grid.to_vec(),
        relevant: sim.relevant,
        smoothness,
        gap,
        auto_support,
        recovered,
        converged: fits.iter().map(|f| f.converged()).collect(),
    })
}
