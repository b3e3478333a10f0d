use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sim::{derive_seed, gen_simulation, rng_from_seed, SimSpec};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, WeightScheme};
use crate::learners::{default_lambda_grid, fit_grid, LearnerConfig, ModelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvSpec {
    pub folds: usize,
    pub grid: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for CvSpec {
    fn default() -> Self {
        Self { folds: 10, grid: default_lambda_grid(), repeats: 10, seed: 0 }
    }
}

impl CvSpec {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 folds, got {}", self.folds)));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidArgument("lambda grid is empty".into()));
        }
        if let Some(l) = self.grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidArgument(format!("invalid lambda {l} in grid")));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidArgument("repeats must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// One row of the long-format results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    pub model: ModelKind,
    /// Sweep value of the simulation setting; 0 outside simulation studies.
    pub setting: usize,
    pub lambda: f64,
    pub fold: usize,
    pub repeat: usize,
    /// `NaN` when the fit failed.
    pub rmse: f64,
    pub converged: bool,
    #[serde(skip)]
    sse: f64,
    #[serde(skip)]
    count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    pub model: ModelKind,
    pub grid: Vec<f64>,
    /// Per λ: mean over repeats of the RMSE pooled over all test folds.
    pub mean_rmse: Vec<f64>,
    pub std_rmse: Vec<f64>,
    /// Per repeat, per λ.
    pub repeat_rmse: Vec<Vec<f64>>,
    pub best_lambda: f64,
    pub best_rmse: f64,
    pub best_std: f64,
    pub failed_fits: usize,
    pub unconverged_fits: usize,
}

impl CvSummary {
    /// Lowest RMSE over the grid within each repeat.
    pub fn per_repeat_best(&self) -> Vec<f64> {
        self.repeat_rmse.iter().map(|r| r.iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min)).collect()
    }
}

pub fn rmse(pred: &[f64], truth: &[f64]) -> f64 {
    assert_eq!(pred.len(), truth.len());
    if pred.is_empty() {
        return 0.0;
    }
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    (sse / pred.len() as f64).sqrt()
}

/// Node → fold index, balanced, from a seeded shuffle.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

/// Worker pool honoring `HYPERSPARSE_THREADS`.
pub fn thread_pool() -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = std::env::var("HYPERSPARSE_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).filter(|&t| t > 0) {
        b = b.num_threads(t);
    }
    b.build().expect("thread pool")
}

/// Fits one fold over the whole grid and scores the held-out nodes.
fn score_fold(
    h: &Hypergraph,
    labels: &[f64],
    assignment: &[usize],
    fold: usize,
    cfg: &LearnerConfig,
    grid: &[f64],
) -> Vec<(f64, usize, bool, bool)> {
    let mask: Vec<bool> = assignment.iter().map(|&a| a != fold).collect();
    let test: Vec<usize> = (0..labels.len()).filter(|&i| !mask[i]).collect();
    let mut out = vec![(f64::NAN, test.len(), false, false); grid.len()];
    for (k, res) in fit_grid(h, labels, &mask, cfg, grid).into_iter().enumerate() {
        out[k] = match res {
            Ok(fit) => {
                let sse = test.iter().map(|&i| (fit.f_hat[i] - labels[i]).powi(2)).sum();
                (sse, test.len(), true, fit.converged())
            }
            Err(e) => {
                log::warn!("fold {fold}, lambda {}: {e}", grid[k]);
                (f64::NAN, test.len(), false, false)
            }
        };
    }
    out
}

fn run_repeat(
    h: &Hypergraph,
    labels: &[f64],
    cfg: &LearnerConfig,
    cv: &CvSpec,
    setting: usize,
    repeat: usize,
    fold_seed: u64,
) -> Vec<CvRecord> {
    let assignment = fold_assignment(h.n(), cv.folds, fold_seed);
    let mut records = Vec::with_capacity(cv.folds * cv.grid.len());
    for fold in 0..cv.folds {
        for (k, (sse, count, ok, converged)) in score_fold(h, labels, &assignment, fold, cfg, &cv.grid).into_iter().enumerate() {
            let rmse = if ok { if count == 0 { 0.0 } else { (sse / count as f64).sqrt() } } else { f64::NAN };
            records.push(CvRecord { model: cfg.model, setting, lambda: cv.grid[k], fold, repeat, rmse, converged, sse, count });
        }
    }
    records
}

/// Summarizes records of a single model. Within a repeat the RMSE is pooled over all test folds;
/// a repeat with any failed fold is `NaN` at that λ and excluded from the mean.
pub fn summarize(model: ModelKind, grid: &[f64], repeats: usize, records: &[CvRecord]) -> CvSummary {
    let mut sse = vec![vec![0.0; grid.len()]; repeats];
    let mut count = vec![vec![0usize; grid.len()]; repeats];
    let mut failed = vec![vec![false; grid.len()]; repeats];
    let (mut failed_fits, mut unconverged_fits) = (0, 0);
    for r in records.iter().filter(|r| r.model == model) {
        let k = grid.iter().position(|&l| l == r.lambda).expect("lambda in grid");
        if r.rmse.is_nan() {
            failed[r.repeat][k] = true;
            failed_fits += 1;
        } else {
            sse[r.repeat][k] += r.sse;
            count[r.repeat][k] += r.count;
            if !r.converged {
                unconverged_fits += 1;
            }
        }
    }
    let repeat_rmse: Vec<Vec<f64>> = (0..repeats)
        .map(|rep| {
            (0..grid.len())
                .map(|k| match (failed[rep][k], count[rep][k]) {
                    (true, _) => f64::NAN,
                    (false, 0) => 0.0,
                    (false, c) => (sse[rep][k] / c as f64).sqrt(),
                })
                .collect()
        })
        .collect();
    let mut mean_rmse = Vec::with_capacity(grid.len());
    let mut std_rmse = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let vals: Vec<f64> = repeat_rmse.iter().map(|r| r[k]).filter(|v| !v.is_nan()).collect();
        if vals.is_empty() {
            mean_rmse.push(f64::NAN);
            std_rmse.push(f64::NAN);
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
        mean_rmse.push(mean);
        std_rmse.push(var.sqrt());
    }
    // First minimum in grid order wins ties.
    let best = (0..grid.len()).filter(|&k| !mean_rmse[k].is_nan()).fold(None, |acc: Option<usize>, k| match acc {
        Some(b) if mean_rmse[b] <= mean_rmse[k] => Some(b),
        _ => Some(k),
    });
    let (best_lambda, best_rmse, best_std) = match best {
        Some(b) => (grid[b], mean_rmse[b], std_rmse[b]),
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    CvSummary {
        model,
        grid: grid.to_vec(),
        mean_rmse,
        std_rmse,
        repeat_rmse,
        best_lambda,
        best_rmse,
        best_std,
        failed_fits,
        unconverged_fits,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub summary: CvSummary,
    pub records: Vec<CvRecord>,
}

/// Transductive k-fold cross-validation: every node stays in the hypergraph, test-fold labels
/// are hidden from the fit, and RMSE is taken against the held-out labels.
pub fn cross_validate(h: &Hypergraph, labels: &[f64], cfg: &LearnerConfig, cv: &CvSpec) -> Result<CvOutcome> {
    cv.validate()?;
    if labels.len() != h.n() {
        return Err(Error::DimensionMismatch { what: "labels", expected: h.n(), got: labels.len() });
    }
    let per_repeat: Vec<Vec<CvRecord>> = thread_pool().install(|| {
        (0..cv.repeats)
            .into_par_iter()
            .map(|rep| run_repeat(h, labels, cfg, cv, 0, rep, derive_seed(cv.seed, &[rep as u64])))
            .collect()
    });
    let records: Vec<CvRecord> = per_repeat.into_iter().flatten().collect();
    let summary = summarize(cfg.model, &cv.grid, cv.repeats, &records);
    Ok(CvOutcome { summary, records })
}

/// Simulation parameter swept by a study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Irrelevant,
    Noisy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStudy {
    pub base: SimSpec,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub models: Vec<ModelKind>,
    pub cv: CvSpec,
    /// Solver settings shared by all models.
    pub learner: LearnerConfig,
}

impl SimStudy {
    fn preset(base: SimSpec, axis: SweepAxis) -> Self {
        let mut learner = LearnerConfig::new(ModelKind::Dense, 0.0);
        learner.solver.adaptive_rho = true;
        learner.pin_unlabeled_components = true;
        learner.weights = Some(WeightScheme::Unit);
        Self { base, axis, values: (1..=10).collect(), models: ModelKind::ALL.to_vec(), cv: CvSpec::default(), learner }
    }

    /// Irrelevant edges 1..10, no noisy nodes.
    pub fn irrelevant_sweep() -> Self {
        Self::preset(SimSpec::default(), SweepAxis::Irrelevant)
    }

    /// Noisy nodes 1..10 per relevant edge, no irrelevant edges.
    pub fn noisy_sweep() -> Self {
        Self::preset(SimSpec::default(), SweepAxis::Noisy)
    }

    /// Five irrelevant edges plus noisy nodes 1..10 per relevant edge.
    pub fn mixed_sweep() -> Self {
        Self::preset(SimSpec { n_irrelevant: 5, ..SimSpec::default() }, SweepAxis::Noisy)
    }

    pub fn spec_for(&self, value: usize) -> SimSpec {
        let mut s = self.base.clone();
        match self.axis {
            SweepAxis::Irrelevant => s.n_irrelevant = value,
            SweepAxis::Noisy => s.noisy_per_edge = value,
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.cv.validate()?;
        self.learner.solver.validate()?;
        if self.values.is_empty() || self.models.is_empty() {
            return Err(Error::InvalidArgument("study needs at least one setting and one model".into()));
        }
        self.values.iter().try_for_each(|&v| self.spec_for(v).validate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingSummary {
    pub setting: usize,
    pub models: Vec<CvSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyOutcome {
    pub settings: Vec<SettingSummary>,
    pub records: Vec<CvRecord>,
}

/// Runs a sweep. Each repeat draws a fresh dataset and a fresh fold split; all models in a
/// repeat share the same data and folds.
pub fn run_study(study: &SimStudy) -> Result<StudyOutcome> {
    study.validate()?;
    let jobs: Vec<(usize, usize, usize)> = (0..study.values.len())
        .flat_map(|s| (0..study.cv.repeats).flat_map(move |r| (0..study.models.len()).map(move |m| (s, r, m))))
        .collect();
    let results: Vec<Result<Vec<CvRecord>>> = thread_pool().install(|| {
        jobs.par_iter()
            .map(|&(s, rep, m)| {
                let value = study.values[s];
                let data_seed = derive_seed(study.cv.seed, &[value as u64, rep as u64, 0]);
                let fold_seed = derive_seed(study.cv.seed, &[value as u64, rep as u64, 1]);
                let sim = gen_simulation(&study.spec_for(value), data_seed)?;
                let cfg = LearnerConfig { model: study.models[m], ..study.learner };
                Ok(run_repeat(&sim.hypergraph, &sim.labels, &cfg, &study.cv, value, rep, fold_seed))
            })
            .collect()
    });
    let mut records = Vec::new();
    for r in results {
        records.extend(r?);
    }
    let settings = study
        .values
        .iter()
        .map(|&value| {
            let recs: Vec<CvRecord> = records.iter().filter(|r| r.setting == value).cloned().collect();
            let models = study.models.iter().map(|&m| summarize(m, &study.cv.grid, study.cv.repeats, &recs)).collect();
            SettingSummary { setting: value, models }
        })
        .collect();
    Ok(StudyOutcome { settings, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_formula() {
        assert!((rmse(&[0.0, 1.0], &[0.0, 0.0]) - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn folds_are_balanced() {
        let a = fold_assignment(23, 5, 3);
        let mut counts = [0; 5];
        a.iter().for_each(|&f| counts[f] += 1);
        assert!(counts.iter().all(|&c| c == 4 || c == 5));
    }

    #[test]
    fn constant_labels_give_zero_rmse() {
        let h = Hypergraph::from_node_lists(12, &[vec![0, 1, 2, 3, 4, 5], vec![5, 6, 7, 8, 9, 10, 11]]).unwrap();
        let labels = vec![0.3; 12];
        let cv = CvSpec { folds: 3, repeats: 2, grid: vec![0.01, 1.0], seed: 1 };
        for model in ModelKind::ALL {
            let out = cross_validate(&h, &labels, &LearnerConfig::new(model, 0.0), &cv).unwrap();
            assert!(out.summary.mean_rmse.iter().all(|&r| r < 1e-6), "{model}: {:?}", out.summary.mean_rmse);
        }
    }

    #[test]
    fn hidden_labels_are_never_read() {
        let h = Hypergraph::from_node_lists(10, &[vec![0, 1, 2, 3, 4], vec![4, 5, 6, 7, 8, 9]]).unwrap();
        let labels: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let assignment = fold_assignment(10, 5, 0);
        let mut poisoned = labels.clone();
        for i in 0..10 {
            if assignment[i] == 2 {
                poisoned[i] = 1e6;
            }
        }
        let mask: Vec<bool> = assignment.iter().map(|&a| a != 2).collect();
        let cfg = LearnerConfig::new(ModelKind::JointSelection, 0.1);
        let a = crate::learners::fit(&h, &labels, &mask, &cfg).unwrap();
        let b = crate::learners::fit(&h, &poisoned, &mask, &cfg).unwrap();
        assert_eq!(a.f_hat, b.f_hat);
    }
}
